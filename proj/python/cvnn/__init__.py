"""Complex- and real-valued MLPs with matched capacity."""

from ._core import (
    activate,
    alternating_widths,
    budget_width_complex,
    budget_width_real,
    build_budget_pair,
    build_fixed_pair,
    cmatmul,
    count_mlp_params,
    follow_score,
    gen_synthetic,
    plan_only,
    train_run,
)

__all__ = [
    "activate",
    "alternating_widths",
    "budget_width_complex",
    "budget_width_real",
    "build_budget_pair",
    "build_fixed_pair",
    "cmatmul",
    "count_mlp_params",
    "follow_score",
    "gen_synthetic",
    "plan_only",
    "train_run",
]
