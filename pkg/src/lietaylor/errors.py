"""Exception hierarchy shared by every module of the package."""


class LieTaylorError(Exception):
    """Base class for all package errors."""


class InvalidArgument(LieTaylorError, ValueError):
    pass


class NotFound(LieTaylorError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "not found"


class OutOfChart(LieTaylorError, ValueError):
    """Element outside the principal logarithm chart."""


class DomainError(LieTaylorError, ValueError):
    """Element fails the membership predicate of a group."""


class UnsupportedMethod(LieTaylorError, ValueError):
    pass


class Refusal(LieTaylorError, RuntimeError):
    """A computation was refused (cost or missing certificate)."""


class ResampleError(LieTaylorError, ValueError):
    """Path samples too far apart for the requested construction."""


class ContinuationDiverged(LieTaylorError, RuntimeError):
    """Truncation error exceeded the budget; ``state`` holds the partial run."""

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state
