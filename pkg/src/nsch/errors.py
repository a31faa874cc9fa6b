"""Solver and configuration error types."""


class NschError(Exception):
    """Base class for simulator errors."""


class ConfigError(NschError):
    """Invalid or incomplete run configuration."""


class NewtonDiverged(NschError):
    """Newton iteration failed to reach tolerance within the iteration cap."""

    def __init__(self, message, iterate=None, residual=None):
        super().__init__(message)
        self.iterate = iterate
        self.residual = residual


class LinearSolveFailed(NschError):
    """Inner linear solve did not converge to the requested tolerance."""


class CFLViolation(ConfigError):
    """Time step violates the advective CFL admissibility check."""


class ActiveSetCycling(NschError):
    """Primal-dual active set iteration failed to settle."""


class GridMismatch(NschError):
    """Two states or histories live on incompatible grids."""


class NotSeparated(NschError):
    """Run never reached a strictly separated phase field."""
