"""Monte Carlo solver built on uniformization of the jump chain.

Each sample draws a Poisson number of jump epochs at the uniform rate
lam, walks that many steps of the embedded chain P = I + Q/lam, and
records only the terminal node.  The empirical law of the terminal
nodes is an unbiased estimate of the forward solution at the final
time, whatever lam >= max total rate was chosen.

Randomness is counter based: sample m owns substream m of a splitmix
generator, so histograms are bit-identical for a fixed seed no matter
how samples are ordered or partitioned.  The hot loop is compiled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba as nb
import numpy as np

from .errors import InternalCheckError, PreconditionError
from .fields import FieldVec, as_values
from .scheme import Rates, uniformization_rate

__all__ = [
    "MCConfig",
    "MCResult",
    "embedded_transition",
    "sample_poisson",
    "run_mc",
]

_U64 = np.uint64
_PHI = _U64(0x9E3779B97F4A7C15)
_MIX_A = _U64(0xBF58476D1CE4E5B9)
_MIX_B = _U64(0x94D049BB133111EB)
_INV53 = 1.0 / 9007199254740992.0

# inversion sampling below this mean, transformed rejection above
_POISSON_SPLIT = 30.0
_INVERSION_CAP = 1000

_MASS_RTOL = 1e-12


@nb.njit(nb.uint64(nb.uint64), cache=True)
def _mix64(z):
    z = (z ^ (z >> _U64(30))) * _MIX_A
    z = (z ^ (z >> _U64(27))) * _MIX_B
    return z ^ (z >> _U64(31))


@nb.njit(cache=True)
def _u01(base, idx):
    return float(_mix64(base + (idx + _U64(1)) * _PHI) >> _U64(11)) * _INV53


@nb.njit(cache=True)
def _poisson_draw(lam_t, base, idx):
    """One Poisson draw from the substream, returning the moved counter."""
    if lam_t <= 0.0:
        return 0, idx
    if lam_t < _POISSON_SPLIT:
        u = _u01(base, idx)
        idx += _U64(1)
        p = math.exp(-lam_t)
        s = p
        k = 0
        while u > s and k < _INVERSION_CAP:
            k += 1
            p *= lam_t / k
            s += p
        return k, idx
    b = 0.931 + 2.53 * math.sqrt(lam_t)
    a = -0.059 + 0.02483 * b
    inv_alpha = 1.1239 + 1.1328 / (b - 3.4)
    vr = 0.9277 - 3.6224 / (b - 2.0)
    while True:
        u = _u01(base, idx)
        idx += _U64(1)
        v = _u01(base, idx)
        idx += _U64(1)
        u -= 0.5
        us = 0.5 - abs(u)
        if us < 1e-9:
            continue
        k = int(math.floor((2.0 * a / us + b) * u + lam_t + 0.43))
        if us >= 0.07 and v <= vr:
            return k, idx
        if k < 0 or (us < 0.013 and v > us):
            continue
        if (
            math.log(v * inv_alpha / (a / (us * us) + b))
            <= k * math.log(lam_t) - lam_t - math.lgamma(k + 1.0)
        ):
            return k, idx


@nb.njit(cache=True)
def _poisson_batch(lam_t, seed, out):
    for m in range(out.size):
        base = _mix64(seed + (_U64(m) + _U64(1)) * _PHI)
        k, _ = _poisson_draw(lam_t, base, _U64(0))
        out[m] = k


@nb.njit(cache=True)
def _mc_kernel(seed, lam_t, cdf, pleft, pboth, out):
    n = pleft.size
    for m in range(out.size):
        base = _mix64(seed + (_U64(m) + _U64(1)) * _PHI)
        idx = _U64(0)
        u = _u01(base, idx)
        idx += _U64(1)
        j = np.searchsorted(cdf, u, side="right")
        if j >= n:
            j = n - 1
        jumps, idx = _poisson_draw(lam_t, base, idx)
        for _ in range(jumps):
            u = _u01(base, idx)
            idx += _U64(1)
            if u < pleft[j]:
                j -= 1
                if j < 0:
                    j += n
            elif u < pboth[j]:
                j += 1
                if j >= n:
                    j -= n
        out[m] = j


def _seed64(seed: int) -> np.uint64:
    return np.uint64(int(seed) & 0xFFFFFFFFFFFFFFFF)


def sample_poisson(lam_t: float, seed: int = 0, size: int = 1) -> np.ndarray:
    """Deterministic Poisson draws, one counter substream per slot."""
    if not math.isfinite(lam_t) or lam_t < 0.0:
        raise ValueError("lam_t must be finite and nonnegative")
    if size < 1:
        raise ValueError("size must be positive")
    out = np.empty(size, dtype=np.int64)
    _poisson_batch(float(lam_t), _seed64(seed), out)
    return out


def embedded_transition(rates: Rates, lam: float, j: int) -> np.ndarray:
    """Down, stay, up probabilities of the embedded chain at one node."""
    n = rates.alpha.size
    if not 0 <= j < n:
        raise ValueError("node index out of range")
    if lam < uniformization_rate(rates):
        raise PreconditionError(
            f"lam = {lam:.6e} is below the top total rate "
            f"{uniformization_rate(rates):.6e}"
        )
    down = rates.beta[j] / lam
    up = rates.alpha[j] / lam
    return np.array([down, 1.0 - down - up, up])


@dataclass(frozen=True)
class MCConfig:
    """Sampler settings; p0 is coerced to a checked probability vector."""

    t_final: float
    n_samples: int
    p0: FieldVec
    lambda_pad: float = 10.0
    seed: int = 0
    rho_l1: float = 1.0

    def __post_init__(self) -> None:
        if not math.isfinite(self.t_final) or self.t_final < 0.0:
            raise ValueError("t_final must be finite and nonnegative")
        if int(self.n_samples) < 1:
            raise ValueError("n_samples must be positive")
        if not math.isfinite(self.lambda_pad) or self.lambda_pad < 0.0:
            raise ValueError("lambda_pad must be finite and nonnegative")
        if not math.isfinite(self.rho_l1) or self.rho_l1 <= 0.0:
            raise ValueError("rho_l1 must be finite and positive")
        object.__setattr__(
            self, "p0", FieldVec.probability(as_values(self.p0))
        )


@dataclass(frozen=True)
class MCResult:
    """Terminal-node histogram and the density estimate built from it."""

    counts: np.ndarray
    p_tilde: np.ndarray
    rho_tilde: np.ndarray
    stderr: np.ndarray
    n_samples: int
    lam: float
    seed: int
    t_final: float


def run_mc(rates: Rates, cfg: MCConfig) -> MCResult:
    """Run the sampler and histogram the terminal nodes.

    rho_tilde rescales the empirical frequencies to a density carrying
    the initial mass rho_l1; stderr is the per-node binomial band
    sqrt(p (1 - p) / M).
    """
    n = rates.alpha.size
    p0 = as_values(cfg.p0)
    if p0.size != n:
        raise ValueError("p0 length does not match the grid")
    lam = uniformization_rate(rates) + cfg.lambda_pad
    if lam <= 0.0:
        raise PreconditionError("uniformization rate must be positive")
    pleft = rates.beta / lam
    pboth = (rates.beta + rates.alpha) / lam
    cdf = np.cumsum(p0)
    cdf[-1] = 1.0
    out = np.empty(int(cfg.n_samples), dtype=np.int64)
    _mc_kernel(
        _seed64(cfg.seed), lam * cfg.t_final, cdf, pleft, pboth, out
    )
    counts = np.bincount(out, minlength=n).astype(np.int64)
    m = int(cfg.n_samples)
    if int(counts.sum()) != m:
        raise InternalCheckError("histogram lost samples")
    p_tilde = counts / m
    rho_tilde = (cfg.rho_l1 / rates.h) * p_tilde
    stderr = np.sqrt(p_tilde * (1.0 - p_tilde) / m)
    mass = rates.h * float(rho_tilde.sum())
    if abs(mass - cfg.rho_l1) > _MASS_RTOL * cfg.rho_l1:
        raise InternalCheckError(
            f"estimated density carries mass {mass:.17g}, "
            f"expected {cfg.rho_l1:.17g}"
        )
    return MCResult(
        counts=counts,
        p_tilde=p_tilde,
        rho_tilde=rho_tilde,
        stderr=stderr,
        n_samples=m,
        lam=float(lam),
        seed=int(cfg.seed),
        t_final=float(cfg.t_final),
    )
