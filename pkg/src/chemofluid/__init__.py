"""Finite-volume solver and diagnostics for a regularized chemotaxis-fluid
system with porous-medium cell diffusion on a staggered grid."""

from .errors import (
    ChemoFluidError,
    ConfigError,
    InvariantViolation,
    SolverError,
    StabilityError,
)
from .grid import Grid
from .model import PRESETS, ModelParams, get_preset, validate_assumptions
from .transport import State

__version__ = "0.1.0"

__all__ = [
    "ChemoFluidError", "ConfigError", "Grid", "InvariantViolation", "ModelParams",
    "PRESETS", "SolverError", "StabilityError", "State", "get_preset",
    "validate_assumptions",
]
