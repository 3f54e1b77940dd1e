"""Command line front end: config resolution, experiments, CSV/JSON.

Config is a flat key=value namespace with optional [section] headers in
files; every key has a typed entry in the registry below and unknown
keys are rejected by name.  Resolution order is registry defaults,
per-command defaults, config file, then --set overrides.  Each run
writes its data files plus a manifest echoing the fully resolved
config; data files are byte-stable across reruns, the timestamp lives
only in the manifest.

Exit codes: 0 ok, 2 config error, 3 numerical precondition violation,
4 failed internal assertion.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .diagnostics import fit_decay, fit_order, snapshot_metrics, tv_distance
from .errors import ConfigError, ExprSyntaxError, PreconditionError, ToolkitError
from .evolve import evolve, uniform_series
from .exprparse import eval_expr, parse, print_expr
from .fields import FieldVec, as_values
from .gap import gap_report, hardy_B, line_hardy_input, witness_scan
from .model import (
    Coefficient,
    Grid,
    LineDomain,
    PRESETS,
    Problem,
    TorusDomain,
    TWO_PI,
    check_coefficients,
    reference_stationary,
)
from .montecarlo import MCConfig, run_mc
from .scheme import build_rates
from .stationary import modified_rates, stationary_distribution

__all__ = ["main"]


# ---------------------------------------------------------------------------
# config registry


@dataclass(frozen=True)
class _Key:
    kind: str
    default: object
    help: str


_KEYS: dict[str, _Key] = {
    "domain.type": _Key("str", "", "line or torus; presets bring their own"),
    "domain.xmin": _Key("float", -6.0, "left end of a line window"),
    "domain.xmax": _Key("float", 6.0, "right end of a line window"),
    "domain.L": _Key("float", TWO_PI, "circumference of a torus"),
    "coeff.preset": _Key("str", "ou", "named problem; empty for custom"),
    "coeff.b": _Key("str", "", "drift expression in x (custom problems)"),
    "coeff.sigma": _Key("str", "", "diffusion expression in x"),
    "coeff.sigma_prime": _Key("str", "", "exact sigma derivative; empty = finite difference"),
    "coeff.s1": _Key("float", 0.0, "claimed lower bound on sigma^2 (0 disables)"),
    "coeff.s2": _Key("float", 0.0, "claimed upper bound on sigma^2 (0 disables)"),
    "grid.N": _Key("int", 0, "node count; 0 takes the preset default"),
    "init.rho0": _Key("str", "1", "initial density expression, normalized on the grid"),
    "evolve.T": _Key("float", 10.0, "final time"),
    "evolve.method": _Key("str", "euler", "euler or series"),
    "evolve.safety": _Key("float", 0.9, "fraction of the stability limit for auto dt"),
    "evolve.dt": _Key("float", 0.0, "explicit step; 0 = automatic"),
    "evolve.tol": _Key("float", 1e-12, "series tail tolerance"),
    "evolve.snapshots": _Key("str", "", "comma separated times; empty = 9 even in [0, T]"),
    "mc.T": _Key("float", 1.0, "sampling horizon"),
    "mc.M": _Key("int", 100_000, "sample count"),
    "mc.pad": _Key("float", 10.0, "uniformization rate pad above the top total rate"),
    "mc.seed": _Key("int", 0, "base seed for the counter generator"),
    "fig1.times": _Key("str", "1,4,10,12", "sampling horizons, one density column each"),
    "order.levels": _Key("int", 4, "number of dyadic refinements in the sweep"),
    "output.dir": _Key("str", "out", "directory for CSV/JSON artifacts"),
}

_COMMAND_DEFAULTS: dict[str, dict[str, object]] = {
    "fig1": {"coeff.preset": "torus_sin", "mc.M": 1_000_000},
}


def _parse_value(key: str, raw: str):
    kind = _KEYS[key].kind
    try:
        if kind == "float":
            val = float(raw)
            if not math.isfinite(val):
                raise ValueError("not finite")
            return val
        if kind == "int":
            return int(raw)
        return raw
    except ValueError as exc:
        raise ConfigError(f"{key}: cannot parse {raw!r} as {kind} ({exc})") from None


def _read_config_file(path: str) -> list[tuple[str, str]]:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"--config: cannot read {path!r} ({exc})") from None
    pairs: list[tuple[str, str]] = []
    section = ""
    for ln, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        if s.startswith("[") and s.endswith("]"):
            section = s[1:-1].strip()
            continue
        if "=" not in s:
            raise ConfigError(f"{path}:{ln}: expected key=value, got {s!r}")
        key, raw = s.split("=", 1)
        key = key.strip()
        if "." not in key and section:
            key = f"{section}.{key}"
        pairs.append((key, raw.strip()))
    return pairs


def _resolve(args) -> tuple[dict, set]:
    cfg = {key: spec.default for key, spec in _KEYS.items()}
    cfg.update(_COMMAND_DEFAULTS.get(args.command, {}))
    explicit: set[str] = set()
    pairs: list[tuple[str, str]] = []
    if args.config:
        pairs.extend(_read_config_file(args.config))
    for item in args.overrides:
        if "=" not in item:
            raise ConfigError(f"--set: expected key=value, got {item!r}")
        key, raw = item.split("=", 1)
        pairs.append((key.strip(), raw.strip()))
    for key, raw in pairs:
        if key not in _KEYS:
            raise ConfigError(f"unknown config key {key!r}")
        cfg[key] = _parse_value(key, raw)
        explicit.add(key)
    if args.seed is not None:
        cfg["mc.seed"] = int(args.seed)
        explicit.add("mc.seed")
    if args.out is not None:
        cfg["output.dir"] = args.out
        explicit.add("output.dir")
    return cfg, explicit


# ---------------------------------------------------------------------------
# model construction from config


def _coefficient(key: str, source: str) -> Coefficient:
    try:
        return Coefficient.from_source(source)
    except ExprSyntaxError as exc:
        raise ConfigError(f"{key}: {exc}") from None


def _build_model(cfg: dict, explicit: set) -> tuple[Problem, Grid]:
    preset = cfg["coeff.preset"]
    if preset:
        if preset not in PRESETS:
            raise ConfigError(
                f"coeff.preset: unknown preset {preset!r}, have {sorted(PRESETS)}"
            )
        spec = PRESETS[preset]
        problem = Problem.from_preset(preset)
        domain = spec.domain
        if isinstance(domain, LineDomain):
            if "domain.type" in explicit and cfg["domain.type"] != "line":
                raise ConfigError(f"domain.type: preset {preset!r} runs on a line")
            if "domain.xmin" in explicit or "domain.xmax" in explicit:
                domain = _line_domain(cfg)
        else:
            if "domain.type" in explicit and cfg["domain.type"] != "torus":
                raise ConfigError(f"domain.type: preset {preset!r} runs on a torus")
            if "domain.L" in explicit:
                domain = _torus_domain(cfg)
        n = int(cfg["grid.N"]) or spec.default_n
    else:
        dtype = cfg["domain.type"]
        if dtype not in ("line", "torus"):
            raise ConfigError(
                "domain.type: set 'line' or 'torus' (or choose a preset)"
            )
        for key in ("coeff.b", "coeff.sigma"):
            if not cfg[key]:
                raise ConfigError(f"{key}: required when coeff.preset is empty")
        bounds = None
        if cfg["coeff.s1"] > 0.0:
            s2 = cfg["coeff.s2"] if cfg["coeff.s2"] > 0.0 else None
            bounds = (cfg["coeff.s1"], s2 if s2 is not None else np.inf)
            if not bounds[0] <= bounds[1]:
                raise ConfigError("coeff.s1: must not exceed coeff.s2")
        problem = Problem(
            drift=_coefficient("coeff.b", cfg["coeff.b"]),
            sigma=_coefficient("coeff.sigma", cfg["coeff.sigma"]),
            sigma_prime=(
                _coefficient("coeff.sigma_prime", cfg["coeff.sigma_prime"])
                if cfg["coeff.sigma_prime"]
                else None
            ),
            sigma_bounds=bounds,
        )
        domain = _line_domain(cfg) if dtype == "line" else _torus_domain(cfg)
        n = int(cfg["grid.N"])
        if n == 0:
            raise ConfigError("grid.N: required when coeff.preset is empty")
    try:
        if isinstance(domain, LineDomain):
            grid = Grid.line(domain, n)
        else:
            grid = Grid.torus(domain, n)
    except ValueError as exc:
        raise ConfigError(f"grid.N: {exc}") from None
    return problem, grid


def _line_domain(cfg: dict) -> LineDomain:
    try:
        return LineDomain(cfg["domain.xmin"], cfg["domain.xmax"])
    except ValueError as exc:
        raise ConfigError(f"domain.xmin/xmax: {exc}") from None


def _torus_domain(cfg: dict) -> TorusDomain:
    try:
        return TorusDomain(cfg["domain.L"])
    except ValueError as exc:
        raise ConfigError(f"domain.L: {exc}") from None


def _build_chain(cfg: dict, explicit: set):
    problem, grid = _build_model(cfg, explicit)
    check_coefficients(problem, grid)
    return problem, grid, build_rates(problem, grid)


def _initial_probability(cfg: dict, grid: Grid) -> np.ndarray:
    coef = _coefficient("init.rho0", cfg["init.rho0"])
    vals = np.broadcast_to(
        np.asarray(coef(grid.nodes), dtype=float), grid.nodes.shape
    ).copy()
    if np.any(vals < 0.0):
        raise PreconditionError("init.rho0: initial density must be nonnegative")
    total = vals.sum()
    if total <= 0.0:
        raise PreconditionError("init.rho0: initial density must carry mass")
    return vals / total


def _parse_times(key: str, raw: str) -> np.ndarray:
    try:
        ts = np.asarray([float(tok) for tok in raw.split(",") if tok.strip()])
    except ValueError as exc:
        raise ConfigError(f"{key}: {exc}") from None
    if ts.size == 0:
        raise ConfigError(f"{key}: need at least one time")
    if np.any(~np.isfinite(ts)) or np.any(ts < 0.0) or np.any(np.diff(ts) <= 0.0):
        raise ConfigError(f"{key}: times must be finite, nonnegative, increasing")
    return ts


# ---------------------------------------------------------------------------
# emitters


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return "%.17g" % float(value)


def _write_csv(path: Path, header: list[str], columns: list[np.ndarray]) -> None:
    rows = len(columns[0])
    with path.open("w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for i in range(rows):
            fh.write(",".join(_fmt(col[i]) for col in columns) + "\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    return obj


def _write_json(path: Path, payload: dict) -> None:
    with path.open("w") as fh:
        json.dump(_jsonable(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_manifest(out_dir: Path, command: str, cfg: dict, outputs: list[str]) -> None:
    payload = {
        "command": command,
        "version": __version__,
        "generated_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "config": {k: cfg[k] for k in sorted(cfg)},
        "outputs": sorted(outputs),
    }
    _write_json(out_dir / f"manifest_{command}.json", payload)


# ---------------------------------------------------------------------------
# commands


def cmd_stationary(cfg: dict, explicit: set, out_dir: Path) -> list[str]:
    problem, grid, rates = _build_chain(cfg, explicit)
    stat = stationary_distribution(rates)
    pi_h = as_values(stat.pi_h)
    rho_h = pi_h / grid.h
    ref = as_values(reference_stationary(problem, grid))
    diff = rho_h - ref
    summary = {
        "h": grid.h,
        "N": grid.n,
        "l1_error": grid.h * float(np.abs(diff).sum()),
        "linf_error": float(np.abs(diff).max()),
        "flux": stat.flux,
        "db_residual": stat.db_residual,
        "flux_spread": stat.flux_spread,
    }
    _write_csv(
        out_dir / "stationary.csv",
        ["x", "pi_h", "rho_h", "pi_ref"],
        [grid.nodes, pi_h, rho_h, ref],
    )
    _write_json(out_dir / "stationary_summary.json", summary)
    return ["stationary.csv", "stationary_summary.json"]


def _refined_grid(grid: Grid) -> Grid:
    if grid.wrap:
        return Grid.torus(grid.domain, 2 * grid.n)
    return Grid.line(grid.domain, 2 * grid.n - 1)


def cmd_evolve(cfg: dict, explicit: set, out_dir: Path) -> list[str]:
    problem, grid, rates = _build_chain(cfg, explicit)
    t_final = cfg["evolve.T"]
    if cfg["evolve.snapshots"]:
        ts = _parse_times("evolve.snapshots", cfg["evolve.snapshots"])
        if ts[-1] > t_final:
            raise ConfigError("evolve.snapshots: beyond evolve.T")
        if ts[0] > 0.0:
            ts = np.concatenate([[0.0], ts])
    else:
        ts = np.linspace(0.0, t_final, 9)
    method = cfg["evolve.method"]
    if method not in ("euler", "series"):
        raise ConfigError("evolve.method: choose euler or series")
    p0 = _initial_probability(cfg, grid)
    result = evolve(
        rates,
        p0,
        t_final,
        method=method,
        snapshots=ts,
        dt=cfg["evolve.dt"] or None,
        safety=cfg["evolve.safety"],
        tol=cfg["evolve.tol"],
    )
    stat = stationary_distribution(rates)
    pi_h = as_values(stat.pi_h)

    # accuracy stand-in: the series flow on a twice-refined grid,
    # compared as densities at the shared nodes
    fine = _refined_grid(grid)
    check_coefficients(problem, fine)
    rates_f = build_rates(problem, fine)
    p0_f = _initial_probability(cfg, fine)
    result_f = evolve(
        rates_f, p0_f, t_final, method="series", snapshots=ts, tol=cfg["evolve.tol"]
    )
    shared = np.arange(grid.n) * 2

    records = []
    l1_ref = []
    for k, t in enumerate(result.times):
        records.append(snapshot_metrics(rates, result.states[k], pi_h, float(t)))
        rho_c = result.states[k] / grid.h
        rho_f = result_f.states[k][shared] / fine.h
        l1_ref.append(grid.h * float(np.abs(rho_c - rho_f).sum()))
    l1_ref = np.asarray(l1_ref)

    fields = [
        "t",
        "mass",
        "min_value",
        "tv_seminorm",
        "l1_error",
        "l2_pi_error",
        "f_h",
        "d_h",
        "relative_entropy",
    ]
    columns = [np.asarray([getattr(r, f) for r in records]) for f in fields]
    columns.append(l1_ref)
    _write_csv(out_dir / "evolve_metrics.csv", fields + ["l1_vs_reference"], columns)

    f_series = np.asarray([r.f_h for r in records])
    summary = {
        "method": result.method,
        "dt": result.dt,
        "steps": result.steps,
        "decay_rate_f": fit_decay(result.times, f_series),
        "sup_l1_vs_reference": float(l1_ref.max()),
        "mass_drift": float(np.abs(columns[1] - columns[1][0]).max()),
    }
    _write_json(out_dir / "evolve_summary.json", summary)
    return ["evolve_metrics.csv", "evolve_summary.json"]


def cmd_gap(cfg: dict, explicit: set, out_dir: Path) -> list[str]:
    problem, grid, rates = _build_chain(cfg, explicit)
    stat = stationary_distribution(rates)
    report = gap_report(rates, stat)
    payload = {
        "B": report.hardy_b,
        "kappa_lower": report.kappa_lower,
        "witness_max": report.witness_max,
        "exact_gap": report.exact_gap,
        "torus_kappa": report.torus_kappa,
        "h": grid.h,
        "N": grid.n,
    }
    _write_json(out_dir / "gap.json", payload)
    return ["gap.json"]


def cmd_mc(cfg: dict, explicit: set, out_dir: Path) -> list[str]:
    problem, grid, rates = _build_chain(cfg, explicit)
    p0 = _initial_probability(cfg, grid)
    mc_cfg = MCConfig(
        t_final=cfg["mc.T"],
        n_samples=int(cfg["mc.M"]),
        p0=FieldVec.probability(p0),
        lambda_pad=cfg["mc.pad"],
        seed=int(cfg["mc.seed"]),
    )
    result = run_mc(rates, mc_cfg)
    p_det = uniform_series(rates, p0, cfg["mc.T"])
    rho_det = p_det / grid.h
    tv = tv_distance(result.p_tilde, p_det)
    _write_csv(
        out_dir / "mc.csv",
        ["x", "rho_tilde", "rho_deterministic", "stderr_band"],
        [grid.nodes, result.rho_tilde, rho_det, result.stderr],
    )
    summary = {
        "seed": result.seed,
        "lam": result.lam,
        "M": result.n_samples,
        "T": result.t_final,
        "tv_to_deterministic_total": tv.total,
        "tv_to_deterministic_half": tv.half,
    }
    _write_json(out_dir / "mc_summary.json", summary)
    return ["mc.csv", "mc_summary.json"]


def cmd_order(cfg: dict, explicit: set, out_dir: Path) -> list[str]:
    levels = int(cfg["order.levels"])
    if levels < 2:
        raise ConfigError("order.levels: need at least 2 refinement levels")
    problem, grid, _ = _build_chain(cfg, explicit)
    hs, ns, l1s, linfs = [], [], [], []
    for _ in range(levels):
        check_coefficients(problem, grid)
        rates = build_rates(problem, grid)
        stat = stationary_distribution(rates)
        rho_h = as_values(stat.pi_h) / grid.h
        ref = as_values(reference_stationary(problem, grid))
        diff = rho_h - ref
        hs.append(grid.h)
        ns.append(grid.n)
        l1s.append(grid.h * float(np.abs(diff).sum()))
        linfs.append(float(np.abs(diff).max()))
        grid = _refined_grid(grid)
    _write_csv(
        out_dir / "order.csv",
        ["h", "N", "l1_error", "linf_error"],
        [np.asarray(hs), np.asarray(ns, dtype=int), np.asarray(l1s), np.asarray(linfs)],
    )
    summary = {
        "levels": levels,
        "slope_l1": fit_order(hs, l1s),
        "slope_linf": fit_order(hs, linfs),
    }
    _write_json(out_dir / "order_summary.json", summary)
    return ["order.csv", "order_summary.json"]


def cmd_fig1(cfg: dict, explicit: set, out_dir: Path) -> list[str]:
    problem, grid, rates = _build_chain(cfg, explicit)
    times = _parse_times("fig1.times", cfg["fig1.times"])
    p0 = _initial_probability(cfg, grid)
    ref = as_values(reference_stationary(problem, grid))
    header = ["x", "pi_exact"]
    columns = [grid.nodes, ref]
    seed = int(cfg["mc.seed"])
    lam = 0.0
    for k, t in enumerate(times):
        mc_cfg = MCConfig(
            t_final=float(t),
            n_samples=int(cfg["mc.M"]),
            p0=FieldVec.probability(p0),
            lambda_pad=cfg["mc.pad"],
            seed=seed + k,
        )
        result = run_mc(rates, mc_cfg)
        lam = result.lam
        header.append(f"rho_t{t:g}")
        columns.append(result.rho_tilde)
    _write_csv(out_dir / "fig1.csv", header, columns)
    summary = {
        "lam": lam,
        "M": int(cfg["mc.M"]),
        "times": times,
        "seed_base": seed,
        "N": grid.n,
    }
    _write_json(out_dir / "fig1_summary.json", summary)
    return ["fig1.csv", "fig1_summary.json"]


def cmd_selftest(cfg: dict, explicit: set, out_dir: Path) -> list[str]:
    failures: list[str] = []

    def check(name: str, fn) -> None:
        try:
            fn()
        except Exception as exc:  # noqa: BLE001 - report and keep going
            failures.append(name)
            print(f"FAIL {name}: {exc}")
        else:
            print(f"PASS {name}")

    def expr_round_trip() -> None:
        for spec in PRESETS.values():
            for source in (spec.b, spec.sigma, spec.sigma_prime):
                tree = parse(source)
                again = parse(print_expr(tree))
                xs = np.linspace(-2.0, 2.0, 17)
                if not np.array_equal(eval_expr(tree, xs), eval_expr(again, xs)):
                    raise AssertionError(f"round trip drifted for {source!r}")

    def line_stack() -> None:
        problem = Problem.from_preset("ou")
        grid = Grid.line(PRESETS["ou"].domain, 121)
        rates = build_rates(problem, grid)
        stat = stationary_distribution(rates)
        pi = as_values(stat.pi_h)
        sym = np.abs(pi - pi[::-1]).max() / pi.max()
        if sym > 1e-12:
            raise AssertionError(f"stationary vector asymmetric by {sym:.3e}")
        report = gap_report(rates, stat)
        if not report.kappa_lower <= report.exact_gap:
            raise AssertionError("gap lower bound crossed the exact gap")
        hi = line_hardy_input(rates, stat)
        b = hardy_B(hi)
        wit = witness_scan(hi)
        if not b * (1.0 - 1e-12) <= wit <= 4.0 * b:
            raise AssertionError("witness left the Hardy sandwich")

    def torus_stack() -> None:
        problem = Problem.from_preset("torus_sin")
        grid = Grid.torus(PRESETS["torus_sin"].domain, 64)
        rates = build_rates(problem, grid)
        stat = stationary_distribution(rates)
        modified_rates(rates, stat)
        report = gap_report(rates, stat)
        if not report.torus_kappa <= report.exact_gap * (1.0 + 1e-12):
            raise AssertionError("torus bound crossed the exact gap")

    def steppers_agree() -> None:
        problem = Problem.from_preset("ou")
        grid = Grid.line(PRESETS["ou"].domain, 61)
        rates = build_rates(problem, grid)
        vals = np.exp(-(grid.nodes**2))
        p0 = vals / vals.sum()
        a = evolve(rates, p0, 1.0, method="euler").states[-1]
        b = evolve(rates, p0, 1.0, method="series").states[-1]
        err = float(np.abs(a - b).sum())
        if err > 5e-2:
            raise AssertionError(f"steppers disagree by {err:.3e} in l1")

    def sampler_matches_series() -> None:
        problem = Problem.from_preset("torus_sin")
        grid = Grid.torus(PRESETS["torus_sin"].domain, 32)
        rates = build_rates(problem, grid)
        p0 = np.full(grid.n, 1.0 / grid.n)
        mc_cfg = MCConfig(
            t_final=0.5, n_samples=20_000, p0=FieldVec.probability(p0), seed=7
        )
        result = run_mc(rates, mc_cfg)
        p_det = uniform_series(rates, p0, 0.5)
        tv = tv_distance(result.p_tilde, p_det).half
        if tv > 0.05:
            raise AssertionError(f"sampler off by TV {tv:.3f}")

    check("expression round trip", expr_round_trip)
    check("line stationary and gap sandwich", line_stack)
    check("torus stationary and gap bounds", torus_stack)
    check("euler agrees with series", steppers_agree)
    check("sampler agrees with series", sampler_matches_series)
    if failures:
        raise ToolkitError(f"selftest failures: {', '.join(failures)}")
    return []


_COMMANDS = {
    "stationary": cmd_stationary,
    "evolve": cmd_evolve,
    "gap": cmd_gap,
    "mc": cmd_mc,
    "order": cmd_order,
    "fig1": cmd_fig1,
    "selftest": cmd_selftest,
}


# ---------------------------------------------------------------------------
# entry point


def _make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fpjump",
        description="Drift-diffusion equations on a grid, run as jump processes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    descriptions = {
        "stationary": "stationary distribution and its continuum error",
        "evolve": "time integration with per-snapshot health metrics",
        "gap": "spectral gap and its certificate bounds",
        "mc": "Monte Carlo estimate of the forward solution",
        "order": "stationary accuracy sweep over dyadic refinements",
        "fig1": "Monte Carlo densities at several horizons on the torus",
        "selftest": "fast cross-module consistency battery",
    }
    for name, desc in descriptions.items():
        sp = sub.add_parser(name, help=desc)
        sp.add_argument("--config", metavar="PATH", default=None,
                        help="key=value file with optional [section] headers")
        sp.add_argument("--out", metavar="DIR", default=None,
                        help="output directory (default: key output.dir)")
        sp.add_argument("--seed", type=int, default=None, metavar="U64",
                        help="override mc.seed")
        sp.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="KEY=VALUE", help="override one config key; repeatable")
    return parser


def main(argv=None) -> int:
    args = _make_parser().parse_args(argv)
    try:
        cfg, explicit = _resolve(args)
        out_dir = Path(cfg["output.dir"])
        out_dir.mkdir(parents=True, exist_ok=True)
        outputs = _COMMANDS[args.command](cfg, explicit, out_dir)
        _write_manifest(out_dir, args.command, cfg, outputs)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except PreconditionError as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return 3
    except ToolkitError as exc:
        print(f"internal check failed: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
