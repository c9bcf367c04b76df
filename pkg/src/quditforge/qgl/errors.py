"""Errors raised while tokenizing, parsing, or checking QGL source."""

from __future__ import annotations

from quditforge.errors import QuditforgeError


class QglError(QuditforgeError):
    """Base class for QGL front-end errors; carries a source position."""

    def __init__(self, message: str, line: int = 0, col: int = 0, offset: int = -1):
        self.line = line
        self.col = col
        self.offset = offset
        if line:
            message = f"{line}:{col}: {message}"
        super().__init__(message)


class UnknownCharacterError(QglError):
    pass


class MalformedNumberError(QglError):
    pass


class QglSyntaxError(QglError):
    pass


class RaggedMatrixError(QglError):
    pass


class NonSquareMatrixError(QglError):
    pass


class DuplicateParameterError(QglError):
    pass


class ReservedIdentifierError(QglError):
    pass


class DimensionMismatchError(QglError):
    def __init__(self, expected: int, actual: int, line: int = 0, col: int = 0):
        self.expected = expected
        self.actual = actual
        super().__init__(
            f"matrix dimension {actual} does not match declared radix product {expected}",
            line,
            col,
        )


class NonPowerOfTwoDimensionError(QglError):
    pass
