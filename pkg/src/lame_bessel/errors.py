"""Exception hierarchy shared by all modules."""


class LameBesselError(Exception):
    """Base class for library errors."""


class DomainError(LameBesselError, ValueError):
    """An argument lies outside the domain of the operation."""


class ResourceError(LameBesselError):
    """The requested computation exceeds a hard work limit."""


class ConvergenceError(LameBesselError):
    """A quadrature or series failed to reach its tolerance."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class TruncationError(ConvergenceError):
    """A series did not decay before its term limit."""


class ConsistencyError(LameBesselError):
    """An internal numerical cross-check failed."""
