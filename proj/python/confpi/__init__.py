"""Conformal prediction intervals for day-ahead electricity prices.

Thin wrapper over the C++ core; see ``confpi._core`` for the bound functions.
"""

from ._core import (
    IntervalForecast,
    LatticeVariant,
    christoffersen,
    coverage,
    icp_interval,
    icp_threshold,
    lasso_fit,
    lattice_node_names,
    load_panel,
    ncp_interval,
    ncp_scores,
    pinball,
    qra_fit,
    run_ablation,
    run_backtest,
    summary_stats,
    synthetic_panel,
    winkler,
    yj_apply,
    yj_fit,
    yj_invert,
)

__all__ = [
    "IntervalForecast",
    "LatticeVariant",
    "christoffersen",
    "coverage",
    "icp_interval",
    "icp_threshold",
    "lasso_fit",
    "lattice_node_names",
    "load_panel",
    "ncp_interval",
    "ncp_scores",
    "pinball",
    "qra_fit",
    "run_ablation",
    "run_backtest",
    "summary_stats",
    "synthetic_panel",
    "winkler",
    "yj_apply",
    "yj_fit",
    "yj_invert",
]
