"""Exception hierarchy shared by all modules."""


class ChemoFluidError(Exception):
    """Base class for every error raised by the package."""


class ConfigError(ChemoFluidError, ValueError):
    """Invalid parameters, presets or configuration text."""


class SolverError(ChemoFluidError):
    """An elliptic solve missed its residual tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class StabilityError(SolverError):
    """A time step violates the explicit stability (CFL) restriction."""


class InvariantViolation(ChemoFluidError):
    """A discrete invariant (positivity, mass, maximum principle) was broken."""
