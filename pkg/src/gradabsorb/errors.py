"""Exception types shared across the package."""


class GradAbsorbError(Exception):
    """Base class for all package errors."""


class ValidationError(GradAbsorbError, ValueError):
    """Invalid parameters, grids, or configuration."""


class NumericalAbort(GradAbsorbError, RuntimeError):
    """A run was stopped by a numerical safeguard (NaN, negative blow-up,
    support touching the domain boundary, or a stalled time step)."""

    def __init__(self, message, reason, t=None):
        super().__init__(message)
        self.reason = reason
        self.t = t


class ProfileError(GradAbsorbError, ValueError):
    """Degenerate geometry handed to the limit-profile construction."""


class BarrierPreconditionError(GradAbsorbError, ValueError):
    """A comparison check was requested but its ordering hypothesis
    already fails at the initial time (a setup problem, not a violation)."""
