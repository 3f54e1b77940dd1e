"""Time evolution of the jump process: forward and backward flows.

Two integrators with complementary guarantees.  The explicit Euler
step is positivity and mass preserving exactly when dt stays below the
inverse of the largest total jump rate, and snapshots are hit exactly
by splitting each interval into full steps plus one shorter step.  The
uniformization series evaluates exp(tQ)v to a prescribed tail
tolerance with log-space Poisson weights, so it serves as the accurate
reference the cheaper stepper is judged against.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass

import numpy as np

from .errors import CflError, InternalCheckError, SeriesLengthError
from .fields import as_values
from .scheme import Rates, apply_backward, apply_forward, uniformization_rate

__all__ = [
    "EvolveResult",
    "cfl_limit",
    "euler_step",
    "evolve",
    "uniform_series",
    "green_function",
]

_DEFAULT_SAFETY = 0.9
_DEFAULT_TOL = 1e-12
_DEFAULT_MAX_TERMS = 2_000_000

# skip the closing partial step when it is this small relative to dt
_STEP_SKIP = 1e-12

# backward flow must not create new extrema beyond roundoff
_MAX_PRINCIPLE_SLACK = 1e-12


@dataclass(frozen=True)
class EvolveResult:
    """Snapshots of the forward flow at requested times."""

    times: np.ndarray
    states: np.ndarray
    method: str
    dt: float
    steps: int

    def state_at(self, t: float) -> np.ndarray:
        idx = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[idx] - t) > 1e-9 * max(1.0, abs(t)):
            raise KeyError(f"no snapshot recorded at t = {t!r}")
        return self.states[idx]


def cfl_limit(rates: Rates) -> float:
    """Largest stable Euler step, the inverse of the top total rate."""
    lam = uniformization_rate(rates)
    if lam == 0.0:
        return math.inf
    return 1.0 / lam


def euler_step(rates: Rates, p, dt: float):
    """One forward step p + dt * (flux balance)."""
    vals = as_values(p)
    return vals + dt * apply_forward(rates, vals)


def _check_times(t_final: float, snapshots) -> np.ndarray:
    if snapshots is None:
        ts = np.asarray([t_final], dtype=float)
    else:
        ts = np.asarray(snapshots, dtype=float)
    if ts.ndim != 1 or ts.size == 0:
        raise ValueError("snapshots must be a nonempty 1-D sequence")
    if np.any(~np.isfinite(ts)) or np.any(ts < 0.0):
        raise ValueError("snapshot times must be finite and nonnegative")
    if np.any(np.diff(ts) <= 0.0):
        raise ValueError("snapshot times must be strictly increasing")
    if ts[-1] > t_final * (1.0 + 1e-12):
        raise ValueError("snapshot times must not exceed the final time")
    return ts


def _euler_span(rates: Rates, p: np.ndarray, span: float, dt: float):
    """Advance by span, hitting it exactly with full steps plus one rest."""
    n_full = int(math.floor(span / dt))
    rest = span - n_full * dt
    for _ in range(n_full):
        p = euler_step(rates, p, dt)
    steps = n_full
    if rest > _STEP_SKIP * dt:
        p = euler_step(rates, p, rest)
        steps += 1
    return p, steps


def evolve(
    rates: Rates,
    p0,
    t_final: float,
    *,
    method: str = "euler",
    snapshots=None,
    dt: float | None = None,
    safety: float = _DEFAULT_SAFETY,
    tol: float = _DEFAULT_TOL,
    max_terms: int = _DEFAULT_MAX_TERMS,
) -> EvolveResult:
    """Run the forward flow and record it at the snapshot times.

    Intervals between snapshots are integrated independently, so the
    recorded times carry no accumulated step drift.
    """
    if not math.isfinite(t_final) or t_final < 0.0:
        raise ValueError("t_final must be finite and nonnegative")
    ts = _check_times(t_final, snapshots)
    p = as_values(p0).copy()
    if p.shape != rates.alpha.shape:
        raise ValueError("initial state length does not match the grid")

    lam = uniformization_rate(rates)
    if method == "euler":
        if dt is None:
            if not 0.0 < safety <= 1.0:
                raise ValueError("safety must lie in (0, 1]")
            dt = safety / lam if lam > 0.0 else max(t_final, 1.0)
        if dt <= 0.0:
            raise ValueError("dt must be positive")
        if dt * lam > 1.0:
            raise CflError(
                f"dt = {dt:.6e} exceeds the stability limit {1.0 / lam:.6e}"
            )
    elif method == "series":
        dt = 0.0
    else:
        raise ValueError(f"unknown method {method!r}")

    states = np.empty((ts.size, p.size))
    total_steps = 0
    t_prev = 0.0
    for k, t_next in enumerate(ts):
        span = t_next - t_prev
        if span > 0.0:
            if method == "euler":
                p, steps = _euler_span(rates, p, span, dt)
            else:
                p, steps = _series_apply(
                    rates, p, span, forward=True, tol=tol, max_terms=max_terms
                )
            total_steps += steps
        states[k] = p
        t_prev = t_next
    return EvolveResult(
        times=ts, states=states, method=method, dt=float(dt), steps=total_steps
    )


def _series_apply(
    rates: Rates,
    v: np.ndarray,
    t: float,
    *,
    forward: bool,
    tol: float,
    max_terms: int,
):
    """exp(tQ^T)v or exp(tQ)v by uniformization, with term count."""
    if not 1e-15 <= tol <= 0.1:
        raise ValueError("tol must lie in [1e-15, 0.1]")
    lam = uniformization_rate(rates)
    lt = lam * t
    if lt == 0.0:
        return v.copy(), 0
    # Poisson(lt) mass beyond lt + 10 sqrt(lt) + 20 is far below any
    # admissible tol, so this cap is an upper bound on the terms needed.
    n_cap = int(math.ceil(lt + 10.0 * math.sqrt(lt) + 20.0))
    if n_cap > max_terms:
        raise SeriesLengthError(n_cap, max_terms)

    step = apply_forward if forward else apply_backward
    inv_lam = 1.0 / lam
    log_lt = math.log(lt)
    # Each log weight is formed from terms of size O(lt + n log lt), so the
    # accumulated weight mass can miss 1 by that many ulps even when no tail
    # mass is actually missing.  The bar below accounts for it, and the
    # result is renormalized by the accumulated mass, which keeps the sum of
    # weights exactly one and the backward values a convex combination.
    eps = sys.float_info.epsilon
    slack = 64.0 * eps * (lt + (n_cap + 1.0) * (abs(log_lt) + 1.0) + 1.0)
    bar = 1.0 - tol - slack
    term = v.astype(float).copy()
    w = math.exp(-lt)
    cum = w
    acc = w * term
    n = 0
    while n < n_cap and (cum < bar or n < lt):
        n += 1
        term = term + inv_lam * step(rates, term)
        w = math.exp(n * log_lt - lt - math.lgamma(n + 1.0))
        cum += w
        acc += w * term
    if cum < bar:
        raise InternalCheckError(
            f"series stopped at {n} terms with weight mass {cum:.17g}"
        )
    acc /= cum
    return acc, n


def uniform_series(
    rates: Rates,
    v,
    t: float,
    *,
    forward: bool = True,
    tol: float = _DEFAULT_TOL,
    max_terms: int = _DEFAULT_MAX_TERMS,
):
    """Evaluate the semigroup at one time by truncated Poisson mixing.

    The forward direction propagates mass vectors, the backward one
    observables.  The backward result is checked against the discrete
    maximum principle: it must stay inside the initial range up to
    roundoff slack.
    """
    vals = as_values(v)
    if vals.shape != rates.alpha.shape:
        raise ValueError("vector length does not match the grid")
    if not math.isfinite(t) or t < 0.0:
        raise ValueError("t must be finite and nonnegative")
    out, _ = _series_apply(
        rates, vals, t, forward=forward, tol=tol, max_terms=max_terms
    )
    if not forward:
        lo = float(vals.min())
        hi = float(vals.max())
        slack = _MAX_PRINCIPLE_SLACK * max(1.0, abs(lo), abs(hi))
        if float(out.min()) < lo - slack or float(out.max()) > hi + slack:
            raise InternalCheckError(
                "backward flow left the initial range: "
                f"[{out.min():.17g}, {out.max():.17g}] vs [{lo:.17g}, {hi:.17g}]"
            )
    return out


def green_function(
    rates: Rates,
    start: int,
    t: float,
    *,
    tol: float = _DEFAULT_TOL,
    max_terms: int = _DEFAULT_MAX_TERMS,
) -> np.ndarray:
    """Occupation probabilities at time t for a walk started at a node.

    When the series ran long enough for mass to reach every node the
    result is checked for strict positivity, which the connected chain
    guarantees.
    """
    n = rates.alpha.size
    if not 0 <= start < n:
        raise ValueError("start node out of range")
    if not math.isfinite(t) or t < 0.0:
        raise ValueError("t must be finite and nonnegative")
    v = np.zeros(n)
    v[start] = 1.0
    out, terms = _series_apply(
        rates, v, t, forward=True, tol=tol, max_terms=max_terms
    )
    diameter = n // 2 if rates.wrap else n - 1
    if terms > diameter and np.any(out <= 0.0):
        raise InternalCheckError(
            "transition probabilities must be strictly positive once the "
            "series covers the chain diameter"
        )
    return out
