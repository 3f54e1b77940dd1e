"""Problem setup: domains, grids, coefficients and reference densities.

A problem is a drift b(x) and a diffusion sigma(x) on either a truncated
line or a circle.  The effective advection used by the scheme is
s = b - sigma*sigma', split into nonnegative parts s+ and s-.

The continuum stationary density solves the first integral of the
stationary equation.  On the line the probability flux vanishes and

    (sigma^2 pi)' = 2 b pi,

so sigma^2 pi is an exponential of an antiderivative of 2 b / sigma^2.
On the circle the flux J = b pi - (sigma^2 pi)'/2 is a nonzero constant
in general; writing v = sigma^2 pi,

    v' = (2 b / sigma^2) v - 2 J,

and J is fixed by periodicity of v.  Both routes are integrated with a
composite Gauss-Legendre rule, so the returned density is accurate to
quadrature precision and can be sampled on auxiliary grids much finer
than the working one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CoefficientError, InternalCheckError
from .exprparse import Expr, eval_expr, parse, print_expr
from .fields import FieldVec

__all__ = [
    "LineDomain",
    "TorusDomain",
    "Grid",
    "Coefficient",
    "Problem",
    "SplitDrift",
    "split_drift",
    "reference_stationary",
    "reference_stationary_values",
    "PRESETS",
]

TWO_PI = 2.0 * math.pi

# Relative step for the one-sided of the central difference fallback
# used when no exact sigma' is supplied.
_FD_REL_STEP = 1e-6


@dataclass(frozen=True)
class LineDomain:
    x_min: float
    x_max: float

    def __post_init__(self):
        if not (self.x_min < self.x_max):
            raise ValueError("line domain needs x_min < x_max")


@dataclass(frozen=True)
class TorusDomain:
    length: float

    def __post_init__(self):
        if not (self.length > 0.0):
            raise ValueError("torus domain needs a positive length")


Domain = LineDomain | TorusDomain


@dataclass(frozen=True)
class Grid:
    """Uniform nodes on a domain.

    Line grids place n nodes x_j = x_min + j*h with h chosen so the last
    node lands on x_max.  Torus grids place n nodes x_j = j*h with
    h = length/n; the index wraps.
    """

    domain: Domain
    n: int
    h: float
    nodes: np.ndarray

    @classmethod
    def line(cls, domain: LineDomain, n: int) -> "Grid":
        if n < 2:
            raise ValueError("line grid needs at least 2 nodes")
        h = (domain.x_max - domain.x_min) / (n - 1)
        nodes = domain.x_min + h * np.arange(n)
        return cls(domain, n, h, nodes)

    @classmethod
    def torus(cls, domain: TorusDomain, n: int) -> "Grid":
        if n < 3:
            raise ValueError("torus grid needs at least 3 nodes")
        h = domain.length / n
        nodes = h * np.arange(n)
        return cls(domain, n, h, nodes)

    @property
    def wrap(self) -> bool:
        return isinstance(self.domain, TorusDomain)

    def anchor_index(self) -> int:
        """Index of the node nearest x = 0."""
        return int(np.argmin(np.abs(self.nodes)))


@dataclass(frozen=True)
class Coefficient:
    """A scalar function of x defined by an expression tree."""

    source: str
    tree: Expr

    @classmethod
    def from_source(cls, source: str) -> "Coefficient":
        return cls(source, parse(source))

    def __call__(self, x):
        return eval_expr(self.tree, x)


@dataclass(frozen=True)
class Problem:
    """Drift, diffusion and optional metadata for one equation.

    sigma_prime, when present, is the exact derivative of sigma; the
    presets carry one.  Without it, derivatives fall back to a central
    difference with step 1e-6 * max(1, |x|).  sigma_bounds is a claimed
    positive bracket (S1, S2) for sigma^2 on the domain; it is checked
    wherever the coefficients get sampled on a grid.
    """

    drift: Coefficient
    sigma: Coefficient
    sigma_prime: Coefficient | None = None
    sigma_bounds: tuple[float, float] | None = None
    preset: str | None = None

    def __post_init__(self):
        if self.sigma_bounds is not None:
            s1, s2 = self.sigma_bounds
            if not (0.0 < s1 <= s2):
                raise ValueError("sigma_bounds must satisfy 0 < S1 <= S2")

    @classmethod
    def from_expressions(
        cls,
        b: str,
        sigma: str,
        sigma_prime: str | None = None,
        sigma_bounds: tuple[float, float] | None = None,
    ) -> "Problem":
        return cls(
            drift=Coefficient.from_source(b),
            sigma=Coefficient.from_source(sigma),
            sigma_prime=(
                Coefficient.from_source(sigma_prime) if sigma_prime is not None else None
            ),
            sigma_bounds=sigma_bounds,
        )

    @classmethod
    def from_preset(cls, name: str) -> "Problem":
        try:
            spec = PRESETS[name]
        except KeyError:
            raise ValueError(
                f"unknown preset {name!r}, have {sorted(PRESETS)}"
            ) from None
        return cls(
            drift=Coefficient.from_source(spec.b),
            sigma=Coefficient.from_source(spec.sigma),
            sigma_prime=Coefficient.from_source(spec.sigma_prime),
            sigma_bounds=spec.sigma_bounds,
            preset=name,
        )

    def sigma_sq(self, x):
        s = self.sigma(x)
        return s * s

    def sigma_prime_at(self, x):
        if self.sigma_prime is not None:
            return self.sigma_prime(x)
        step = _FD_REL_STEP * np.maximum(1.0, np.abs(x))
        return (self.sigma(x + step) - self.sigma(x - step)) / (2.0 * step)

    def effective_drift(self, x):
        """s = b - sigma * sigma', the advection the scheme upwinds."""
        return self.drift(x) - self.sigma(x) * self.sigma_prime_at(x)


@dataclass(frozen=True)
class PresetSpec:
    b: str
    sigma: str
    sigma_prime: str
    domain: Domain
    sigma_bounds: tuple[float, float]
    default_n: int


PRESETS: dict[str, PresetSpec] = {
    # Ornstein-Uhlenbeck: confining linear drift, unit diffusion.
    "ou": PresetSpec(
        b="-x",
        sigma="1",
        sigma_prime="0",
        domain=LineDomain(-6.0, 6.0),
        sigma_bounds=(1.0, 1.0),
        default_n=121,
    ),
    # Circle problem with smoothly varying drift and diffusion whose
    # continuum stationary density is proportional to exp(sin x).
    "torus_sin": PresetSpec(
        b="cos(x)*exp(sin(x))",
        sigma="exp(sin(x)/2)",
        sigma_prime="cos(x)/2*exp(sin(x)/2)",
        domain=TorusDomain(TWO_PI),
        sigma_bounds=(math.exp(-1.0), math.e),
        default_n=64,
    ),
}


@dataclass(frozen=True)
class SplitDrift:
    """Effective drift at the nodes, split into nonnegative parts."""

    s: np.ndarray
    s_plus: np.ndarray
    s_minus: np.ndarray


def check_coefficients(problem: Problem, grid: Grid) -> None:
    """Sample b, sigma, sigma' on the nodes and validate them."""
    x = grid.nodes
    for label, values in (
        ("drift", problem.drift(x)),
        ("sigma", problem.sigma(x)),
        ("sigma_prime", problem.sigma_prime_at(x)),
    ):
        values = np.asarray(values, dtype=float)
        if not np.all(np.isfinite(values)):
            j = int(np.argmax(~np.isfinite(np.broadcast_to(values, x.shape))))
            raise CoefficientError(
                f"{label} is not finite at node x = {x[j]!r}"
            )
    sig2 = np.broadcast_to(np.asarray(problem.sigma_sq(x), dtype=float), x.shape)
    if np.any(sig2 <= 0.0):
        j = int(np.argmax(sig2 <= 0.0))
        raise CoefficientError(f"sigma^2 vanishes at node x = {x[j]!r}")
    if problem.sigma_bounds is not None:
        s1 = problem.sigma_bounds[0]
        if np.any(sig2 < s1 * (1.0 - 1e-9)):
            j = int(np.argmax(sig2 < s1 * (1.0 - 1e-9)))
            raise CoefficientError(
                f"sigma^2 = {sig2[j]!r} at x = {x[j]!r} is below the claimed "
                f"lower bound {s1!r}"
            )


def split_drift(problem: Problem, grid: Grid) -> SplitDrift:
    """Evaluate s = b - sigma*sigma' at the nodes and split its sign.

    The parts satisfy s+ >= 0, s- >= 0, s+ - s- == s and s+ * s- == 0
    exactly, because each node takes its value from max(+-s, 0).
    """
    check_coefficients(problem, grid)
    x = grid.nodes
    s = np.broadcast_to(
        np.asarray(problem.effective_drift(x), dtype=float), x.shape
    ).astype(float)
    if not np.all(np.isfinite(s)):
        j = int(np.argmax(~np.isfinite(s)))
        raise CoefficientError(f"effective drift is not finite at x = {x[j]!r}")
    return SplitDrift(s=s, s_plus=np.maximum(s, 0.0), s_minus=np.maximum(-s, 0.0))


# ----------------------------------------------------------------------
# Continuum stationary densities
# ----------------------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(10)


def _segment_integrals(f, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Gauss-Legendre integral of f over each interval [a_i, b_i]."""
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    pts = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    vals = np.broadcast_to(
        np.asarray(f(pts.ravel()), dtype=float), pts.size
    ).reshape(pts.shape)
    return (vals * _GL_WEIGHTS[None, :]).sum(axis=1) * half


def _cumulative_integral(f, xs: np.ndarray) -> np.ndarray:
    """Integral of f from xs[0] to each point of the sorted array xs."""
    if xs.size == 1:
        return np.zeros(1)
    seg = _segment_integrals(f, xs[:-1], xs[1:])
    return np.concatenate(([0.0], np.cumsum(seg)))


def _values_on(f, anchors: np.ndarray, f_anchors: np.ndarray, pts: np.ndarray):
    """Cumulative integral values at pts, each lying past its anchor."""
    flat_a = np.repeat(anchors, pts.shape[1])
    return f_anchors[:, None] + _segment_integrals(f, flat_a, pts.ravel()).reshape(
        pts.shape
    )


def _line_density(problem: Problem, xs: np.ndarray) -> np.ndarray:
    def b1(z):
        return 2.0 * problem.drift(z) / problem.sigma_sq(z)

    log_v = _cumulative_integral(b1, xs)
    log_v -= log_v.max()
    return np.exp(log_v) / problem.sigma_sq(xs)


def _torus_density(problem: Problem, domain: TorusDomain, xs: np.ndarray) -> np.ndarray:
    length = domain.length
    if xs[0] < 0.0 or xs[-1] > length:
        raise ValueError("torus sample points must lie in [0, length]")

    def b1(z):
        return 2.0 * problem.drift(z) / problem.sigma_sq(z)

    # breakpoints covering [0, L]; the cumulative B starts at zero there
    brk = np.unique(np.concatenate((xs, [0.0, length])))
    big_b = _cumulative_integral(b1, brk)

    # integrand exp(-B(z)) needs B at the quadrature points of each
    # segment; integrate b1 from the segment start to each point
    mid = 0.5 * (brk[:-1] + brk[1:])
    half = 0.5 * (brk[1:] - brk[:-1])
    pts = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    b_at_pts = _values_on(b1, brk[:-1], big_b[:-1], pts)
    integrand = np.exp(-b_at_pts)
    seg = (integrand * _GL_WEIGHTS[None, :]).sum(axis=1) * half
    i_part = np.concatenate(([0.0], np.cumsum(seg)))

    b_end = big_b[-1]
    i_end = i_part[-1]
    if i_end <= 0.0:
        raise InternalCheckError("periodic quadrature produced a nonpositive integral")
    # constant flux from periodicity of v = sigma^2 pi, with v(0) = 1
    flux = (1.0 - math.exp(-b_end)) / (2.0 * i_end)
    v = np.exp(big_b) * (1.0 - 2.0 * flux * i_part)
    idx = np.searchsorted(brk, xs)
    v_at = v[idx]
    dens = v_at / problem.sigma_sq(xs)
    if np.any(dens <= 0.0):
        raise InternalCheckError(
            "continuum stationary density is not positive; coefficients are "
            "too extreme for the quadrature"
        )
    return dens


def reference_stationary_values(
    problem: Problem, domain: Domain, xs: np.ndarray
) -> np.ndarray:
    """Continuum stationary density sampled at sorted points xs.

    Normalized so the trapezoid rule over xs (periodic trapezoid when
    the domain is a torus) integrates to one.
    """
    xs = np.asarray(xs, dtype=float)
    if xs.ndim != 1 or xs.size < 2:
        raise ValueError("need at least two sample points")
    if np.any(np.diff(xs) <= 0.0):
        raise ValueError("sample points must be strictly increasing")
    if isinstance(domain, LineDomain):
        dens = _line_density(problem, xs)
        total = np.trapezoid(dens, xs)
    else:
        dens = _torus_density(problem, domain, xs)
        # uniform periodic trapezoid: every node weight is h
        step = np.diff(xs)
        if not np.allclose(step, step[0], rtol=1e-12, atol=0.0):
            raise ValueError("torus sampling must be uniform")
        total = step[0] * dens.sum()
    if not (total > 0.0 and np.isfinite(total)):
        raise InternalCheckError("reference density failed to normalize")
    return dens / total


def reference_stationary(problem: Problem, grid: Grid) -> FieldVec:
    """Continuum stationary density on the grid nodes, trapezoid normalized."""
    return FieldVec.density(
        reference_stationary_values(problem, grid.domain, grid.nodes)
    )
