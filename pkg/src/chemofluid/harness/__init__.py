"""Configuration, run orchestration, studies and the command line."""

from .config import INIT_PRESETS, RunConfig, default_config
from .initial import build_grid, initial_state
from .run import RunFailure, RunResult, exit_code_for, run, step
from .studies import (
    ConvergenceTable,
    EpsStudyResult,
    barenblatt_validate,
    eps_study,
    mms_validate,
    observed_orders,
    weak_refinement,
)

__all__ = [
    "INIT_PRESETS", "ConvergenceTable", "EpsStudyResult", "RunConfig", "RunFailure", "RunResult",
    "barenblatt_validate", "build_grid", "default_config", "eps_study", "exit_code_for",
    "initial_state", "mms_validate", "observed_orders", "run", "step", "weak_refinement",
]
