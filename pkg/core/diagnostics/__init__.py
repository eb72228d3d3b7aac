"""Error reports against oracle trajectories and convergence sweeps."""

from core.diagnostics.convergence import (
    DEFAULT_H_LIST,
    ConvergenceRow,
    ConvergenceTable,
    SweepSettings,
    convergence_table,
    parallel_map,
    default_h_list,
    fit_order,
    mu_trend_ok,
    plateau,
)
from core.diagnostics.report import ErrorReport, check_grids, compare, magnetic_moment_drift

__all__ = [
    "DEFAULT_H_LIST",
    "ConvergenceRow",
    "ConvergenceTable",
    "ErrorReport",
    "SweepSettings",
    "check_grids",
    "compare",
    "convergence_table",
    "default_h_list",
    "fit_order",
    "magnetic_moment_drift",
    "mu_trend_ok",
    "parallel_map",
    "plateau",
]
