"""Stationary distributions of the jump chain.

On a truncated line the chain is in detailed balance, so the stationary
weights follow the product recursion

    pi_{j+1} / pi_j = alpha_j / beta_{j+1},

accumulated in log space from the node nearest x = 0 and normalized
with log-sum-exp.  On a torus detailed balance generically fails; the
stationary vector is the null space of the transposed generator,
computed by replacing one row of the singular system with the
normalization constraint.  The resulting edge flux is a nonzero
constant in general, and the chain can be rebalanced by the reversed
rates

    beta~_j  = alpha_{j-1} pi_{j-1} / pi_j,
    alpha~_j = beta_{j+1} pi_{j+1} / pi_j,

which keep every per-node total rate and leave pi stationary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse
import scipy.sparse.linalg
from scipy.special import logsumexp

from .errors import InternalCheckError, PreconditionError
from .fields import FieldVec
from .scheme import Rates, apply_forward, flux, uniformization_rate

__all__ = [
    "StationaryResult",
    "stationary_line",
    "stationary_torus",
    "stationary_distribution",
    "modified_rates",
    "ComparisonReport",
    "comparison_check",
]

# Dense null-space solve up to this size; banded-plus-corner sparse LU above.
_DENSE_LIMIT = 2048

_FLUX_SPREAD_RTOL = 1e-10
_RESIDUAL_RTOL = 1e-10
_MODIFIED_RTOL = 1e-10


@dataclass(frozen=True)
class StationaryResult:
    """Stationary weights plus the invariants that certify them.

    pi_h sums to one.  flux is the common edge flux (zero on a line),
    flux_spread its standard deviation over edges, and db_residual the
    largest detailed-balance defect max_j |alpha_j pi_j - beta_{j+1}
    pi_{j+1}|.
    """

    pi_h: FieldVec
    flux: float
    db_residual: float
    flux_spread: float = 0.0


def _db_residual(rates: Rates, pi: np.ndarray) -> float:
    a = rates.alpha * pi
    b = rates.beta * pi
    if rates.wrap:
        return float(np.max(np.abs(a - np.roll(b, -1))))
    return float(np.max(np.abs(a[:-1] - b[1:])))


def _check_residual(rates: Rates, pi: np.ndarray) -> None:
    resid = np.max(np.abs(apply_forward(rates, pi)))
    bound = _RESIDUAL_RTOL * uniformization_rate(rates) * pi.max()
    if resid > bound:
        raise InternalCheckError(
            f"stationary residual {resid:.3e} exceeds {bound:.3e}"
        )


def stationary_line(rates: Rates) -> StationaryResult:
    """Stationary weights of a reflecting line chain via log products."""
    if rates.wrap:
        raise ValueError("stationary_line needs a line chain")
    n = rates.n
    alpha, beta = rates.alpha, rates.beta
    if np.any(alpha[:-1] <= 0.0) or np.any(beta[1:] <= 0.0):
        raise PreconditionError(
            "an interior rate vanishes; the product recursion would divide by zero"
        )
    anchor = rates.grid.anchor_index()
    logpi = np.zeros(n)
    if anchor < n - 1:
        steps = np.log(alpha[anchor:-1]) - np.log(beta[anchor + 1 :])
        logpi[anchor + 1 :] = np.cumsum(steps)
    if anchor > 0:
        steps = np.log(beta[anchor:0:-1]) - np.log(alpha[anchor - 1 :: -1])
        logpi[anchor - 1 :: -1] = np.cumsum(steps)
    logpi -= logsumexp(logpi)
    pi = np.exp(logpi)
    pi /= pi.sum()
    result = StationaryResult(
        pi_h=FieldVec.stationary(pi),
        flux=0.0,
        db_residual=_db_residual(rates, pi),
    )
    _check_residual(rates, pi)
    return result


def _null_space_solve(rates: Rates) -> np.ndarray:
    """Solve Q^T pi = 0 with the last row replaced by sum(pi) = 1."""
    n = rates.n
    alpha, beta = rates.alpha, rates.beta
    diag = -(alpha + beta)
    if n <= _DENSE_LIMIT:
        a = np.zeros((n, n))
        idx = np.arange(n)
        a[idx, idx] = diag
        a[idx, (idx - 1) % n] = alpha[(idx - 1) % n]
        a[idx, (idx + 1) % n] = beta[(idx + 1) % n]
        a[n - 1, :] = 1.0
        rhs = np.zeros(n)
        rhs[n - 1] = 1.0
        try:
            return np.linalg.solve(a, rhs)
        except np.linalg.LinAlgError as exc:
            raise PreconditionError(f"stationary solve failed: {exc}") from exc
    rows = np.concatenate([np.arange(n - 1)] * 3 + [np.full(n, n - 1)])
    cols = np.concatenate(
        [
            np.arange(n - 1),
            (np.arange(n - 1) - 1) % n,
            (np.arange(n - 1) + 1) % n,
            np.arange(n),
        ]
    )
    data = np.concatenate(
        [
            diag[: n - 1],
            alpha[(np.arange(n - 1) - 1) % n],
            beta[(np.arange(n - 1) + 1) % n],
            np.ones(n),
        ]
    )
    mat = scipy.sparse.csc_matrix((data, (rows, cols)), shape=(n, n))
    rhs = np.zeros(n)
    rhs[n - 1] = 1.0
    try:
        return scipy.sparse.linalg.splu(mat).solve(rhs)
    except RuntimeError as exc:
        raise PreconditionError(f"stationary solve failed: {exc}") from exc


def stationary_torus(rates: Rates) -> StationaryResult:
    """Stationary weights of a wrapped chain via the null-space solve."""
    if not rates.wrap:
        raise ValueError("stationary_torus needs a wrapped chain")
    pi = _null_space_solve(rates)
    if not np.all(np.isfinite(pi)) or np.any(pi <= 0.0):
        raise PreconditionError(
            "stationary solve produced nonpositive weights; the chain may be "
            "degenerate (zero rates)"
        )
    pi /= pi.sum()
    edge_flux = flux(rates, pi)
    mean_flux = float(edge_flux.mean())
    spread = float(edge_flux.std())
    # a constant edge flux is forced by stationarity; when the mean flux
    # is essentially zero (reversible chain) fall back to a rate scale
    tol = _FLUX_SPREAD_RTOL * max(abs(mean_flux), uniformization_rate(rates) * rates.h)
    if spread > tol:
        raise InternalCheckError(
            f"stationary edge flux varies by {spread:.3e} around {mean_flux:.3e}"
        )
    result = StationaryResult(
        pi_h=FieldVec.stationary(pi),
        flux=mean_flux,
        db_residual=_db_residual(rates, pi),
        flux_spread=spread,
    )
    _check_residual(rates, pi)
    return result


def stationary_distribution(rates: Rates) -> StationaryResult:
    """Dispatch on the domain kind."""
    if rates.wrap:
        return stationary_torus(rates)
    return stationary_line(rates)


def modified_rates(rates: Rates, result: StationaryResult) -> Rates:
    """Reversed-chain rates sharing pi and the per-node total rate.

    The identity alpha~ + beta~ == alpha + beta follows from
    stationarity and is verified to 1e-10 relative; a larger defect
    raises InternalCheckError.
    """
    pi = result.pi_h.values
    alpha, beta = rates.alpha, rates.beta
    if rates.wrap:
        beta_mod = np.roll(alpha * pi, 1) / pi
        alpha_mod = np.roll(beta * pi, -1) / pi
    else:
        beta_mod = np.zeros(rates.n)
        alpha_mod = np.zeros(rates.n)
        beta_mod[1:] = alpha[:-1] * pi[:-1] / pi[1:]
        alpha_mod[:-1] = beta[1:] * pi[1:] / pi[:-1]
    defect = np.max(np.abs((alpha + beta) - (alpha_mod + beta_mod)))
    if defect > _MODIFIED_RTOL * uniformization_rate(rates):
        raise InternalCheckError(
            f"reversed rates change a total rate by {defect:.3e}"
        )
    return Rates(grid=rates.grid, alpha=alpha_mod, beta=beta_mod)


@dataclass(frozen=True)
class ComparisonReport:
    """Extreme-value ratio of pi over a centered window."""

    ratio: float
    radius: float
    n_nodes: int


def comparison_check(
    rates: Rates, result: StationaryResult, radius: float | None = None
) -> ComparisonReport:
    """Ratio max pi / min pi over nodes with |x| <= radius.

    With no radius every node participates (the natural choice on a
    torus).  The ratio certifies how far from flat the weights are on
    the window.
    """
    pi = result.pi_h.values
    x = rates.grid.nodes
    if radius is None:
        mask = np.ones(rates.n, dtype=bool)
        radius = float(np.max(np.abs(x)))
    else:
        if radius <= 0.0:
            raise ValueError("radius must be positive")
        mask = np.abs(x) <= radius
        if not np.any(mask):
            raise ValueError("window contains no nodes")
    window = pi[mask]
    low = float(window.min())
    if low <= 0.0:
        raise PreconditionError("pi underflowed to zero inside the window")
    return ComparisonReport(
        ratio=float(window.max()) / low, radius=radius, n_nodes=int(mask.sum())
    )
