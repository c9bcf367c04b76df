"""QGL: the qudit gate definition language.

A definition binds a name, optional radices, and a parameter list to a
matrix-valued expression, e.g.

    RZ(theta) {
        [[e^(~i*theta/2), 0],
         [0, e^(i*theta/2)]]
    }

This package provides the tokenizer, the recursive-descent parser, the
dimension checker, and a pretty-printer whose output reparses to an
identical AST.
"""

from quditforge.qgl.ast import (
    AstDefinition,
    BinaryOp,
    Call,
    Const,
    Matrix,
    Neg,
    Var,
)
from quditforge.qgl.errors import (
    DimensionMismatchError,
    DuplicateParameterError,
    MalformedNumberError,
    NonPowerOfTwoDimensionError,
    NonSquareMatrixError,
    QglError,
    QglSyntaxError,
    RaggedMatrixError,
    ReservedIdentifierError,
    UnknownCharacterError,
)
from quditforge.qgl.lexer import Token, TokenKind, tokenize
from quditforge.qgl.parser import (
    check_dimensions,
    parse_definition,
    parse_definitions,
    parse_expression,
)
from quditforge.qgl.printer import format_definition, format_expr

__all__ = [
    "AstDefinition",
    "BinaryOp",
    "Call",
    "Const",
    "DimensionMismatchError",
    "DuplicateParameterError",
    "MalformedNumberError",
    "Matrix",
    "Neg",
    "NonPowerOfTwoDimensionError",
    "NonSquareMatrixError",
    "QglError",
    "QglSyntaxError",
    "RaggedMatrixError",
    "ReservedIdentifierError",
    "Token",
    "TokenKind",
    "UnknownCharacterError",
    "Var",
    "check_dimensions",
    "format_definition",
    "format_expr",
    "parse_definition",
    "parse_definitions",
    "parse_expression",
    "tokenize",
]
