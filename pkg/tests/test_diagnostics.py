"""Norms, divergences, decay fits, snapshot records."""

from __future__ import annotations

import numpy as np
import pytest

import fpjump as fp
from fpjump import Grid, LineDomain, Rates
from fpjump.diagnostics import SnapshotMetrics, TvDistance


def test_lp_norm_hand_values():
    v = np.array([1.0, -2.0, 3.0])
    assert fp.lp_norm(v, 0.5, 1.0) == 3.0
    assert fp.lp_norm(v, 0.5, 2.0) == pytest.approx(np.sqrt(7.0), rel=1e-15)
    assert fp.lp_norm(v, 0.5, np.inf) == 3.0
    with pytest.raises(ValueError):
        fp.lp_norm(v, 0.0)
    with pytest.raises(ValueError):
        fp.lp_norm(v, 0.5, 0.5)


def test_weighted_lp_hand_values():
    v = np.array([1.0, -2.0, 3.0])
    w = np.array([1.0, 2.0, 1.0])
    assert fp.weighted_lp(v, w, 2.0) == pytest.approx(np.sqrt(18.0), rel=1e-15)
    assert fp.weighted_lp(v, np.array([1.0, 0.0, 1.0]), np.inf) == 3.0
    with pytest.raises(ValueError):
        fp.weighted_lp(v, np.array([1.0, -1.0, 1.0]))
    with pytest.raises(ValueError):
        fp.weighted_lp(v, np.ones(2))


def test_tv_distance_both_conventions():
    got = fp.tv_distance(np.array([0.5, 0.5]), np.array([1.0, 0.0]))
    assert isinstance(got, TvDistance)
    assert got.total == 1.0
    assert got.half == 0.5
    with pytest.raises(ValueError):
        fp.tv_distance(np.ones(3), np.ones(2))


def test_tv_seminorm_line_and_wrap():
    spike = np.array([0.0, 1.0, 0.0])
    assert fp.tv_seminorm(spike) == 2.0
    assert fp.tv_seminorm(spike, wrap=True) == 2.0
    ramp = np.array([0.0, 1.0, 3.0])
    assert fp.tv_seminorm(ramp) == 3.0
    assert fp.tv_seminorm(ramp, wrap=True) == 6.0


def test_chi_square_hand_value_and_zero():
    pi = np.array([0.5, 0.5])
    assert fp.chi_square(pi, pi) == 0.0
    assert fp.chi_square(np.array([0.75, 0.25]), pi) == pytest.approx(0.125, rel=1e-15)
    with pytest.raises(ValueError):
        fp.chi_square(pi, np.array([1.0, 0.0]))
    with pytest.raises(ValueError):
        fp.chi_square(np.ones(3), np.ones(2))


def test_dissipation_line_hand_value():
    grid = Grid.line(LineDomain(0.0, 2.0), 3)
    rates = Rates(
        grid=grid,
        alpha=np.array([2.0, 3.0, 0.0]),
        beta=np.array([0.0, 1.0, 1.0]),
    )
    pi = np.array([0.25, 0.5, 0.25])
    p = np.array([0.5, 0.25, 0.25])
    # q = (2, 0.5, 1): edges contribute 0.5*2.25 and 1.5*0.25
    assert fp.dissipation(rates, p, pi) == pytest.approx(1.5, rel=1e-15)
    assert fp.dissipation(rates, pi, pi) == 0.0


def test_dissipation_is_chi_square_decay_rate(torus_chain, ou_chain):
    for _, _, rates, stat in (torus_chain, ou_chain):
        pi = stat.pi_h.values
        n = rates.n
        p0 = pi * (1.0 + 0.3 * np.cos(2.0 * np.pi * np.arange(n) / n))
        p0 /= p0.sum()
        t0, dlt = 0.6, 1e-5
        pm = fp.uniform_series(rates, p0, t0 - dlt, tol=1e-13, max_terms=2_000_000)
        pt = fp.uniform_series(rates, p0, t0, tol=1e-13, max_terms=2_000_000)
        pp = fp.uniform_series(rates, p0, t0 + dlt, tol=1e-13, max_terms=2_000_000)
        fd = (fp.chi_square(pp, pi) - fp.chi_square(pm, pi)) / (2.0 * dlt)
        d = fp.dissipation(rates, pt, pi)
        assert fd == pytest.approx(-d, rel=1e-6)


def test_relative_entropy_hand_values():
    pi = np.array([0.5, 0.5])
    assert fp.relative_entropy(pi, pi) == 0.0
    assert fp.relative_entropy(np.array([1.0, 0.0]), pi) == pytest.approx(
        np.log(2.0), rel=1e-15
    )
    assert fp.relative_entropy(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == np.inf
    with pytest.raises(ValueError):
        fp.relative_entropy(np.array([-0.1, 1.1]), pi)


def test_relative_entropy_nonnegative_on_random_pairs():
    rng = np.random.default_rng(8)
    for _ in range(30):
        n = int(rng.integers(2, 40))
        p = rng.uniform(0.0, 1.0, n)
        p /= p.sum()
        pi = rng.uniform(0.1, 1.0, n)
        pi /= pi.sum()
        assert fp.relative_entropy(p, pi) >= -1e-15


def test_fit_order_recovers_exact_slope():
    hs = np.array([0.4, 0.2, 0.1, 0.05])
    errors = 2.7 * hs**1.7
    assert fp.fit_order(hs, errors) == pytest.approx(1.7, rel=1e-12)
    with pytest.raises(ValueError):
        fp.fit_order(hs, errors[:-1])
    with pytest.raises(ValueError):
        fp.fit_order(np.array([0.1, -0.1]), np.array([1.0, 1.0]))


def test_fit_decay_recovers_exact_rate():
    t = np.linspace(0.0, 30.0, 40)
    f = 3.0 * np.exp(-0.8 * t)
    assert fp.fit_decay(t, f) == pytest.approx(0.8, rel=1e-10)


def test_fit_decay_skips_roundoff_floor():
    t = np.linspace(0.0, 30.0, 60)
    f = np.exp(-2.0 * t) + 1e-13
    assert fp.fit_decay(t, f) == pytest.approx(2.0, rel=0.02)


def test_fit_decay_flat_and_degenerate():
    t = np.linspace(0.0, 5.0, 10)
    assert fp.fit_decay(t, np.ones(10)) == pytest.approx(0.0, abs=1e-12)
    assert fp.fit_decay(t, np.zeros(10)) == 0.0
    with pytest.raises(ValueError):
        fp.fit_decay(t, -np.ones(10))


def test_snapshot_metrics_consistency(torus_chain):
    _, _, rates, stat = torus_chain
    pi = stat.pi_h.values
    rng = np.random.default_rng(11)
    p = pi * rng.uniform(0.5, 1.5, rates.n)
    p /= p.sum()
    rec = fp.snapshot_metrics(rates, p, pi, 2.5)
    assert isinstance(rec, SnapshotMetrics)
    assert rec.t == 2.5
    assert rec.mass == p.sum()
    assert rec.min_value == p.min()
    assert rec.tv_seminorm == fp.tv_seminorm(p, wrap=True)
    assert rec.l1_error == np.abs(p - pi).sum()
    assert rec.l2_pi_error == fp.weighted_lp(p / pi - 1.0, pi, 2.0)
    assert rec.f_h == fp.chi_square(p, pi)
    assert rec.d_h == fp.dissipation(rates, p, pi)
    assert rec.relative_entropy == fp.relative_entropy(p, pi)


def test_restrict_samples_nodes(torus_chain):
    _, grid, _, _ = torus_chain
    fv = fp.restrict(np.sin, grid)
    assert fv.kind == "observable"
    np.testing.assert_array_equal(fv.values, np.sin(grid.nodes))
    const = fp.restrict(lambda x: 2.0, grid, kind="density")
    assert const.kind == "density"
    np.testing.assert_array_equal(const.values, np.full(grid.n, 2.0))


def test_ratio_l2_identity_and_holder():
    # for probability inputs the weighted mean of q is 1, so the centered
    # second moment is exactly twice the quadratic free energy
    rng = np.random.default_rng(12)
    for _ in range(30):
        n = int(rng.integers(4, 40))
        p = rng.uniform(0.05, 1.0, n)
        p /= p.sum()
        pi = rng.uniform(0.05, 1.0, n)
        pi /= pi.sum()
        q = p / pi
        l2 = fp.weighted_lp(q - 1.0, pi, 2)
        assert l2 * l2 == pytest.approx(
            2.0 * fp.chi_square(p, pi), rel=1e-12, abs=1e-15
        )
        assert fp.weighted_lp(q - 1.0, pi, 1) <= l2 * (1.0 + 1e-12)


def test_tv_squared_below_half_relative_entropy():
    rng = np.random.default_rng(13)
    for _ in range(30):
        n = int(rng.integers(4, 40))
        p = rng.uniform(0.05, 1.0, n)
        p /= p.sum()
        pi = rng.uniform(0.05, 1.0, n)
        pi /= pi.sum()
        tvh = fp.tv_distance(p, pi).half
        assert tvh * tvh <= 0.5 * fp.relative_entropy(p, pi) + 1e-15


def test_restrict_riemann_sum_high_order():
    # node sums of a fast-decaying smooth profile converge to the integral
    # far faster than first order; the tails at +-6 sit below eps
    ref = float(np.sqrt(np.pi))
    hs, errs = [], []
    for n in (6, 11, 21):
        grid = Grid.line(LineDomain(-6.0, 6.0), n)
        f = fp.restrict(lambda x: np.exp(-x * x), grid)
        hs.append(grid.h)
        errs.append(abs(fp.lp_norm(f.values, grid.h, 1) - ref))
    assert fp.fit_order(hs, errs) >= 2.0
    assert errs[-1] <= 1e-11
