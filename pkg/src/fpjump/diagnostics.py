"""Norms, distances, decay functionals and slope fitting.

Two norm conventions coexist on purpose.  Grid norms carry the mesh
width, ||v||_p = (sum_j h |v_j|^p)^(1/p), so they approximate their
continuum counterparts under refinement.  Weighted norms against a
probability weight carry no h.  Total variation between probability
vectors is reported in both the plain sum and the halved convention,
labeled, since both appear in practice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .fields import FieldVec, as_values
from .scheme import Rates

__all__ = [
    "lp_norm",
    "weighted_lp",
    "TvDistance",
    "tv_distance",
    "tv_seminorm",
    "restrict",
    "chi_square",
    "dissipation",
    "relative_entropy",
    "fit_order",
    "fit_decay",
    "SnapshotMetrics",
    "snapshot_metrics",
]

# fit_decay window: keep samples with F between these fractions of F(0)
_DECAY_WINDOW_LOW = 1e-12
_DECAY_WINDOW_HIGH = 0.5


def lp_norm(v, h: float, p: float = 1.0) -> float:
    """Grid norm (sum_j h |v_j|^p)^(1/p); p = inf gives the max norm."""
    vals = np.abs(as_values(v))
    if h <= 0.0:
        raise ValueError("h must be positive")
    if math.isinf(p):
        return float(vals.max())
    if p < 1.0:
        raise ValueError("p must be >= 1")
    return float((h * (vals**p).sum()) ** (1.0 / p))


def weighted_lp(v, w, p: float = 2.0) -> float:
    """Weighted norm (sum_j w_j |v_j|^p)^(1/p) without a mesh factor."""
    vals = np.abs(as_values(v))
    weights = as_values(w)
    if vals.shape != weights.shape:
        raise ValueError("weight length does not match")
    if np.any(weights < 0.0):
        raise ValueError("weights must be nonnegative")
    if math.isinf(p):
        return float(vals[weights > 0.0].max())
    if p < 1.0:
        raise ValueError("p must be >= 1")
    return float((weights * vals**p).sum() ** (1.0 / p))


class TvDistance(NamedTuple):
    """Total variation in both conventions: plain sum and half sum."""

    total: float
    half: float


def tv_distance(p, q) -> TvDistance:
    a = as_values(p)
    b = as_values(q)
    if a.shape != b.shape:
        raise ValueError("length mismatch")
    s = float(np.abs(a - b).sum())
    return TvDistance(total=s, half=0.5 * s)


def tv_seminorm(v, wrap: bool = False) -> float:
    """Sum of absolute neighbor differences; cyclic when wrap is set."""
    vals = as_values(v)
    if wrap:
        return float(np.abs(np.roll(vals, -1) - vals).sum())
    return float(np.abs(np.diff(vals)).sum())


def restrict(fn: Callable, grid, kind: str = "observable") -> FieldVec:
    """Pointwise restriction of a function to the grid nodes."""
    vals = np.asarray(fn(grid.nodes), dtype=float)
    vals = np.broadcast_to(vals, grid.nodes.shape).astype(float)
    return FieldVec(vals, kind)


def chi_square(p, pi) -> float:
    """Half the pi-weighted variance of the ratio q = p / pi.

    F = 0.5 * sum_j pi_j (q_j - qbar)^2 with qbar = sum_j pi_j q_j.
    Decays along the flow at twice the spectral gap.
    """
    pv = as_values(p)
    piv = as_values(pi)
    if pv.shape != piv.shape:
        raise ValueError("length mismatch")
    if np.any(piv <= 0.0):
        raise ValueError("pi must be strictly positive")
    q = pv / piv
    qbar = float((piv * q).sum())
    return float(0.5 * (piv * (q - qbar) ** 2).sum())


def dissipation(rates: Rates, p, pi) -> float:
    """Dirichlet-form dissipation of the chi-square functional.

    Line chains use sum_j alpha_j pi_j (q_{j+1} - q_j)^2 over interior
    edges.  Wrapped chains use the symmetrized edge weights
    (beta_{j+1} pi_{j+1} + alpha_j pi_j) / 2, which is what the defect
    of the nonreversible flow actually contracts.
    """
    pv = as_values(p)
    piv = as_values(pi)
    q = pv / piv
    if rates.wrap:
        w = 0.5 * (np.roll(rates.beta * piv, -1) + rates.alpha * piv)
        dq = np.roll(q, -1) - q
        return float((w * dq * dq).sum())
    w = (rates.alpha * piv)[:-1]
    dq = np.diff(q)
    return float((w * dq * dq).sum())


def relative_entropy(p, pi) -> float:
    """sum_j p_j log(p_j / pi_j) with the 0 log 0 convention."""
    pv = as_values(p)
    piv = as_values(pi)
    if pv.shape != piv.shape:
        raise ValueError("length mismatch")
    if np.any(pv < 0.0):
        raise ValueError("p must be nonnegative")
    mask = pv > 0.0
    if np.any(piv[mask] <= 0.0):
        return math.inf
    return float((pv[mask] * np.log(pv[mask] / piv[mask])).sum())


def fit_order(hs, errors) -> float:
    """Least-squares slope of log error against log h."""
    h = np.asarray(hs, dtype=float)
    e = np.asarray(errors, dtype=float)
    if h.shape != e.shape or h.size < 2:
        raise ValueError("need at least two (h, error) pairs")
    if np.any(h <= 0.0) or np.any(e <= 0.0):
        raise ValueError("h and errors must be positive to fit a slope")
    return float(np.polyfit(np.log(h), np.log(e), 1)[0])


def fit_decay(times, values) -> float:
    """Exponential decay rate fitted on a relative window.

    Fits the slope of log F against t over samples with F between
    1e-12 * F(0) and 0.5 * F(0), skipping the early transient and the
    roundoff floor.  When fewer than two samples land in the window
    (already-flat series) the fit uses everything above the floor.
    Returns the positive rate r for F ~ exp(-r t).
    """
    t = np.asarray(times, dtype=float)
    f = np.asarray(values, dtype=float)
    if t.shape != f.shape or t.size < 2:
        raise ValueError("need at least two (t, F) pairs")
    if np.any(f < 0.0):
        raise ValueError("F must be nonnegative")
    f0 = f[0]
    if f0 <= 0.0:
        return 0.0
    mask = (f >= _DECAY_WINDOW_LOW * f0) & (f <= _DECAY_WINDOW_HIGH * f0)
    if mask.sum() < 2:
        mask = f >= _DECAY_WINDOW_LOW * f0
    if mask.sum() < 2:
        return 0.0
    slope = np.polyfit(t[mask], np.log(f[mask]), 1)[0]
    return float(-slope)


@dataclass(frozen=True)
class SnapshotMetrics:
    """Health record of one distribution snapshot against pi."""

    t: float
    mass: float
    min_value: float
    tv_seminorm: float
    l1_error: float
    l2_pi_error: float
    f_h: float
    d_h: float
    relative_entropy: float


def snapshot_metrics(rates: Rates, p, pi, t: float) -> SnapshotMetrics:
    """Full snapshot record against a strictly positive pi."""
    pv = as_values(p)
    piv = as_values(pi)
    q = pv / piv
    return SnapshotMetrics(
        t=float(t),
        mass=float(pv.sum()),
        min_value=float(pv.min()),
        tv_seminorm=tv_seminorm(pv, wrap=rates.wrap),
        l1_error=float(np.abs(pv - piv).sum()),
        l2_pi_error=weighted_lp(q - 1.0, piv, 2.0),
        f_h=chi_square(pv, piv),
        d_h=dissipation(rates, pv, piv),
        relative_entropy=relative_entropy(pv, piv),
    )
