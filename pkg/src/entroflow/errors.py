"""Exception types shared across the package."""


class EntroflowError(Exception):
    """Base class for all errors raised by entroflow."""


class DomainError(EntroflowError, ValueError):
    """An argument lies outside the domain of the function."""


class DegenerateSampleError(EntroflowError, ValueError):
    """A sample carries no dispersion, so the gamma shape estimate diverges."""


class SingularMetricError(EntroflowError, ArithmeticError):
    """The metric determinant is too small to invert."""


class NonFiniteValueError(EntroflowError, ArithmeticError):
    """A field evaluation produced inf or nan."""

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class NoInteriorMaximumError(EntroflowError, ValueError):
    """No sign change of the derivative was found inside the search interval."""


class ResourceLimitError(EntroflowError, RuntimeError):
    """A requested computation exceeds the configured resource cap."""
