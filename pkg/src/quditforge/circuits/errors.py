"""Errors raised while constructing circuits."""

from quditforge.errors import QuditforgeError


class BadRadixError(QuditforgeError):
    pass


class UnknownRefError(QuditforgeError):
    pass


class LocationOutOfRangeError(QuditforgeError):
    pass


class RadixMismatchError(QuditforgeError):
    pass


class ArityMismatchError(QuditforgeError):
    pass


class FrozenCircuitError(QuditforgeError):
    pass
