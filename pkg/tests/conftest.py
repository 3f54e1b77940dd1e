"""Shared fixtures: preset chains and the fixed random configuration pool."""

from __future__ import annotations

import sys

import numpy as np
import pytest

import fpjump as fp


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Print one line per shipping criterion collected by the battery."""
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.write_sep("=", "criteria")
    for num in sorted(results):
        status, detail = results[num]
        terminalreporter.write_line(f"{status} criterion {num}: {detail}")


@pytest.fixture(scope="session")
def ou_chain():
    """OU preset on its native window at h = 0.1."""
    problem = fp.Problem.from_preset("ou")
    grid = fp.Grid.line(fp.PRESETS["ou"].domain, 121)
    rates = fp.build_rates(problem, grid)
    stat = fp.stationary_distribution(rates)
    return problem, grid, rates, stat


@pytest.fixture(scope="session")
def ou_chain_coarse():
    """OU preset at h = 0.5 where the rates are small integers."""
    problem = fp.Problem.from_preset("ou")
    grid = fp.Grid.line(fp.PRESETS["ou"].domain, 25)
    rates = fp.build_rates(problem, grid)
    stat = fp.stationary_distribution(rates)
    return problem, grid, rates, stat


@pytest.fixture(scope="session")
def torus_chain():
    """Periodic preset at its default resolution."""
    problem = fp.Problem.from_preset("torus_sin")
    grid = fp.Grid.torus(fp.PRESETS["torus_sin"].domain, 64)
    rates = fp.build_rates(problem, grid)
    stat = fp.stationary_distribution(rates)
    return problem, grid, rates, stat


def make_random_configs(count: int = 50, seed: int = 424242):
    """Fixed pool of random well-posed chains, half wrapped, half line.

    Drift fields are confining on the line and bounded trigonometric on
    the torus; diffusion stays away from zero.  The pool is deterministic
    so test values are reproducible run to run.
    """
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        wrap = bool(rng.integers(0, 2))
        n = int(rng.integers(16, 49))
        c0, c1, c2 = rng.uniform(-1.5, 1.5, 3)
        s0 = rng.uniform(0.4, 1.6)
        s1 = rng.uniform(0.0, 0.8)
        if wrap:
            b = f"{c0}+{c1}*cos(x)+{c2}*sin(2*x)"
            sg = f"{s0}+{s1}*0.5*cos(x)"
            problem = fp.Problem.from_expressions(b, sg)
            grid = fp.Grid.torus(fp.TorusDomain(2.0 * np.pi), n)
        else:
            b = f"{c0}-{max(0.3, abs(c1))}*x"
            sg = f"{s0}+{s1}*0.5*tanh(x)"
            problem = fp.Problem.from_expressions(b, sg)
            grid = fp.Grid.line(fp.LineDomain(-4.0, 4.0), n)
        rates = fp.build_rates(problem, grid)
        out.append(rates)
    return out


@pytest.fixture(scope="session")
def random_chain_pool():
    return make_random_configs()
