"""Drift-diffusion equations in one dimension, run as jump processes.

The package discretizes d/dt rho = (sigma^2 rho / 2)'' - (b rho)' with
an upwind flux whose off-diagonal coefficients are nonnegative, which
makes the space-discrete system the forward equation of a birth-death
chain.  Everything else follows from that reading: stationary vectors
come from detailed balance or a null-space solve, time stepping from
explicit Euler under a CFL condition or from uniformization series,
spectral gaps from symmetrized eigenproblems with Hardy-type
certificates, and a Monte Carlo solver from sampling the embedded
chain at Poisson epochs.
"""

__version__ = "0.1.0"

from .errors import (
    CflError,
    CoefficientError,
    ConfigError,
    DomainEvalError,
    ExprSyntaxError,
    InternalCheckError,
    PreconditionError,
    SeriesLengthError,
    ToolkitError,
)
from .exprparse import Expr, eval_expr, parse, print_expr
from .fields import FieldVec, as_values
from .model import (
    Coefficient,
    Grid,
    LineDomain,
    PRESETS,
    Problem,
    SplitDrift,
    TorusDomain,
    check_coefficients,
    reference_stationary,
    reference_stationary_values,
    split_drift,
)
from .scheme import (
    Rates,
    apply_backward,
    apply_forward,
    build_rates,
    flux,
    uniformization_rate,
)
from .stationary import (
    ComparisonReport,
    StationaryResult,
    comparison_check,
    modified_rates,
    stationary_distribution,
    stationary_line,
    stationary_torus,
)
from .diagnostics import (
    SnapshotMetrics,
    chi_square,
    dissipation,
    fit_decay,
    fit_order,
    lp_norm,
    relative_entropy,
    restrict,
    snapshot_metrics,
    tv_distance,
    tv_seminorm,
    weighted_lp,
)
from .evolve import (
    EvolveResult,
    cfl_limit,
    euler_step,
    evolve,
    green_function,
    uniform_series,
)
from .gap import (
    GapReport,
    HardyInput,
    exact_gap,
    gap_report,
    hardy_B,
    line_hardy_input,
    poincare_bound_line,
    poincare_bound_torus,
    witness_scan,
)
from .montecarlo import (
    MCConfig,
    MCResult,
    embedded_transition,
    run_mc,
    sample_poisson,
)

__all__ = [
    "__version__",
    "CflError",
    "CoefficientError",
    "ConfigError",
    "DomainEvalError",
    "ExprSyntaxError",
    "InternalCheckError",
    "PreconditionError",
    "SeriesLengthError",
    "ToolkitError",
    "Expr",
    "eval_expr",
    "parse",
    "print_expr",
    "FieldVec",
    "as_values",
    "Coefficient",
    "Grid",
    "LineDomain",
    "PRESETS",
    "Problem",
    "SplitDrift",
    "TorusDomain",
    "check_coefficients",
    "reference_stationary",
    "reference_stationary_values",
    "split_drift",
    "Rates",
    "apply_backward",
    "apply_forward",
    "build_rates",
    "flux",
    "uniformization_rate",
    "ComparisonReport",
    "StationaryResult",
    "comparison_check",
    "modified_rates",
    "stationary_distribution",
    "stationary_line",
    "stationary_torus",
    "SnapshotMetrics",
    "chi_square",
    "dissipation",
    "fit_decay",
    "fit_order",
    "lp_norm",
    "relative_entropy",
    "restrict",
    "snapshot_metrics",
    "tv_distance",
    "tv_seminorm",
    "weighted_lp",
    "EvolveResult",
    "cfl_limit",
    "euler_step",
    "evolve",
    "green_function",
    "uniform_series",
    "GapReport",
    "HardyInput",
    "exact_gap",
    "gap_report",
    "hardy_B",
    "line_hardy_input",
    "poincare_bound_line",
    "poincare_bound_torus",
    "witness_scan",
    "MCConfig",
    "MCResult",
    "embedded_transition",
    "run_mc",
    "sample_poisson",
]
