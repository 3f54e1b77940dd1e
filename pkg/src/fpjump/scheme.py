"""Upwind rates and the induced jump-process generator.

Each node j carries a right rate alpha_j and a left rate beta_j:

    alpha_j = s+(x_j)/h + sigma^2(x_j + h/2) / (2 h^2)
    beta_j  = s-(x_j)/h + sigma^2(x_j - h/2) / (2 h^2)

with s = b - sigma*sigma' evaluated at the nodes and sigma^2 at the
exact half nodes.  The rates define a tridiagonal generator Q with
Q(j, j-1) = beta_j, Q(j, j+1) = alpha_j and zero row sums; it is stored
as the two rate arrays, never as a dense matrix.  On a truncated line
the outward rates at the two end nodes are set to zero, which conserves
mass and keeps the chain in detailed balance; on a torus the index
wraps and each half-node diffusion value is shared by the edge's two
endpoints.

Forward action (on distributions), backward action (on observables) and
the edge flux

    J_{j+1/2} = h * alpha_j * rho_j - h * beta_{j+1} * rho_{j+1}

are all linear passes over the three diagonals.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CoefficientError
from .fields import FieldVec, as_values
from .model import Grid, Problem, SplitDrift, split_drift

__all__ = [
    "Rates",
    "build_rates",
    "uniformization_rate",
    "apply_forward",
    "apply_backward",
    "flux",
]


@dataclass(frozen=True)
class Rates:
    """Jump rates of the chain on a grid.

    alpha[j] is the rate of j -> j+1, beta[j] of j -> j-1.  Line grids
    must have beta[0] == alpha[-1] == 0 (reflecting truncation).
    """

    grid: Grid
    alpha: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        alpha = np.asarray(self.alpha, dtype=float)
        beta = np.asarray(self.beta, dtype=float)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)
        n = self.grid.n
        if alpha.shape != (n,) or beta.shape != (n,):
            raise ValueError("rate arrays must match the grid size")
        if not (np.all(np.isfinite(alpha)) and np.all(np.isfinite(beta))):
            raise ValueError("rates must be finite")
        # negative rates cannot arise from the construction above
        assert np.all(alpha >= 0.0) and np.all(beta >= 0.0), "negative jump rate"
        if not self.grid.wrap:
            if beta[0] != 0.0 or alpha[-1] != 0.0:
                raise ValueError(
                    "line chains need beta[0] == 0 and alpha[-1] == 0"
                )

    @property
    def wrap(self) -> bool:
        return self.grid.wrap

    @property
    def n(self) -> int:
        return self.grid.n

    @property
    def h(self) -> float:
        return self.grid.h

    def total(self) -> np.ndarray:
        """Per-node total jump rate alpha + beta."""
        return self.alpha + self.beta


def build_rates(problem: Problem, grid: Grid, sd: SplitDrift | None = None) -> Rates:
    """Assemble the upwind rates for a problem on a grid."""
    if sd is None:
        sd = split_drift(problem, grid)
    h = grid.h
    x = grid.nodes
    inv2h2 = 1.0 / (2.0 * h * h)
    if grid.wrap:
        # one diffusion value per edge j+1/2, shared by both endpoints
        edge_sig2 = _at_edges(problem, x + 0.5 * h)
        alpha = sd.s_plus / h + edge_sig2 * inv2h2
        beta = sd.s_minus / h + np.roll(edge_sig2, 1) * inv2h2
    else:
        edge_sig2 = _at_edges(problem, x[:-1] + 0.5 * h)
        alpha = np.zeros(grid.n)
        beta = np.zeros(grid.n)
        alpha[:-1] = sd.s_plus[:-1] / h + edge_sig2 * inv2h2
        beta[1:] = sd.s_minus[1:] / h + edge_sig2 * inv2h2
    return Rates(grid=grid, alpha=alpha, beta=beta)


def _at_edges(problem: Problem, pts: np.ndarray) -> np.ndarray:
    vals = np.broadcast_to(
        np.asarray(problem.sigma_sq(pts), dtype=float), pts.shape
    ).astype(float)
    if not np.all(np.isfinite(vals)) or np.any(vals <= 0.0):
        j = int(np.argmax(~(np.isfinite(vals) & (vals > 0.0))))
        raise CoefficientError(f"sigma^2 is unusable at half node x = {pts[j]!r}")
    return vals


def uniformization_rate(rates: Rates) -> float:
    """Largest total jump rate max_j (alpha_j + beta_j)."""
    return float(rates.total().max())


def _forward_values(rates: Rates, p: np.ndarray) -> np.ndarray:
    alpha, beta = rates.alpha, rates.beta
    out = -(alpha + beta) * p
    if rates.wrap:
        out += np.roll(alpha * p, 1) + np.roll(beta * p, -1)
    else:
        out[1:] += alpha[:-1] * p[:-1]
        out[:-1] += beta[1:] * p[1:]
    return out


def _backward_values(rates: Rates, u: np.ndarray) -> np.ndarray:
    alpha, beta = rates.alpha, rates.beta
    out = -(alpha + beta) * u
    if rates.wrap:
        out += beta * np.roll(u, 1) + alpha * np.roll(u, -1)
    else:
        out[1:] += beta[1:] * u[:-1]
        out[:-1] += alpha[:-1] * u[1:]
    return out


def _apply(rates: Rates, v, kernel):
    vals = as_values(v)
    if vals.shape != (rates.n,):
        raise ValueError("vector length does not match the grid")
    out = kernel(rates, vals)
    if isinstance(v, FieldVec):
        return FieldVec.density(out)
    return out


def apply_forward(rates: Rates, p):
    """Action of the forward generator on a distribution vector.

    (Q^T p)_j = alpha_{j-1} p_{j-1} + beta_{j+1} p_{j+1}
                - (alpha_j + beta_j) p_j
    """
    return _apply(rates, p, _forward_values)


def apply_backward(rates: Rates, u):
    """Action of the backward generator on an observable vector.

    (Q u)_j = beta_j u_{j-1} - (alpha_j + beta_j) u_j + alpha_j u_{j+1}
    """
    return _apply(rates, u, _backward_values)


def flux(rates: Rates, rho) -> np.ndarray:
    """Edge fluxes J_{j+1/2} = h(alpha_j rho_j - beta_{j+1} rho_{j+1}).

    On a torus the result has one entry per wrapped edge j -> j+1.  On a
    line it has n+1 entries, edges (j-1/2) for j = 0..n, and the two
    outermost entries are exactly zero by the reflecting truncation.
    """
    vals = as_values(rho)
    if vals.shape != (rates.n,):
        raise ValueError("vector length does not match the grid")
    h = rates.h
    a = rates.alpha * vals
    b = rates.beta * vals
    if rates.wrap:
        return h * (a - np.roll(b, -1))
    inner = h * (a[:-1] - b[1:])
    out = np.zeros(rates.n + 1)
    out[1:-1] = inner
    return out
