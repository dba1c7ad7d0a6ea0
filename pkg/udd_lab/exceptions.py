class UddLabError(Exception):
    """Base class for every error raised by udd_lab."""


class InvalidParameterError(UddLabError, ValueError):
    """An argument violates the documented precondition of an operation."""


class DimensionMismatchError(InvalidParameterError):
    pass


class HermiticityError(InvalidParameterError):
    pass


class InvalidStateError(InvalidParameterError):
    """A density operator or state vector failed validation."""


class OrderCapExceededError(InvalidParameterError):
    pass


class BoundOverflowError(UddLabError, OverflowError):
    """A bounding function exceeds the double-precision range."""


class SecularTermError(UddLabError):
    """A θ-domain integration produced a zero denominator."""


class NumericalError(UddLabError):
    """A computed result failed its own post-condition."""
