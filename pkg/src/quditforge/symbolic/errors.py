"""Errors raised by the symbolic IR layer."""

from quditforge.errors import QuditforgeError


class UnsupportedComplexFormError(QuditforgeError):
    """The expression has no closed element-wise real/imaginary split."""


class DimensionMismatchError(QuditforgeError):
    pass


class UnknownParameterError(QuditforgeError):
    pass


class AxisMismatchError(QuditforgeError):
    pass


class BadPermutationError(QuditforgeError):
    pass
