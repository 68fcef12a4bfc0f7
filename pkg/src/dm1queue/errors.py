"""Exception hierarchy shared by every module of the package."""


class DM1Error(Exception):
    """Base class for all package errors."""


class DomainError(DM1Error, ValueError):
    """An argument lies outside the domain of the requested operation."""


class StabilityError(DomainError):
    """The queue is not in equilibrium (traffic intensity >= 1)."""


class ResonanceError(DomainError):
    """A denominator of the form n(1 - zeta0) - j vanishes."""


class ConvergenceError(DM1Error, RuntimeError):
    """An iteration or quadrature failed to reach its tolerance."""


class TruncationError(ConvergenceError):
    """A series needed more terms than the configured cap allows."""
