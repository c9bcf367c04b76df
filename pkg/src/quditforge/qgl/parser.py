"""Recursive-descent parser for QGL.

Grammar (terminals quoted):

    definition ::= ident [radices] "(" [varlist] ")" "{" expression "}" [";"]
    radices    ::= "<" intlist ">"
    expression ::= term {("+" | "-") term}
    term       ::= {"~"} factor {("*" | "/") factor}
    factor     ::= primary {"^" primary}
    primary    ::= variable | constant | function | matrix | "(" expression ")"
    matrix     ::= "[" row {"," row} [","] "]"
    row        ::= "[" exprlist "]"

Precedence is therefore +/- below */÷ below ^ below unary ~, with `~`
negating the whole term it prefixes. `^` associates to the right. `-` is
binary only. Trailing commas are accepted in matrix, row, and argument
lists.
"""

from __future__ import annotations

import math

from quditforge.qgl.ast import (
    BUILTIN_FUNCTIONS,
    RESERVED_NAMES,
    AstDefinition,
    AstExpr,
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
    NonPowerOfTwoDimensionError,
    NonSquareMatrixError,
    QglSyntaxError,
    RaggedMatrixError,
    ReservedIdentifierError,
)
from quditforge.qgl.lexer import Token, TokenKind, tokenize


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind is not TokenKind.EOF:
            self.pos += 1
        return tok

    def expect(self, kind: TokenKind) -> Token:
        tok = self.peek()
        if tok.kind is not kind:
            raise QglSyntaxError(
                f"expected {kind.value!r}, found {tok.text or 'end of input'!r}",
                tok.line,
                tok.col,
            )
        return self.next()

    def accept(self, kind: TokenKind) -> Token | None:
        if self.peek().kind is kind:
            return self.next()
        return None

    # definition ::= ident [radices] "(" [varlist] ")" "{" expression "}" [";"]
    def definition(self) -> AstDefinition:
        name_tok = self.expect(TokenKind.IDENT)
        radices = self.radices() if self.peek().kind is TokenKind.LANGLE else None
        self.expect(TokenKind.LPAREN)
        params = self.varlist(name_tok)
        self.expect(TokenKind.RPAREN)
        self.expect(TokenKind.LBRACE)
        body = self.expression()
        self.expect(TokenKind.RBRACE)
        self.accept(TokenKind.SEMICOLON)
        return AstDefinition(name_tok.text, radices, params, body)

    def radices(self) -> tuple[int, ...]:
        self.expect(TokenKind.LANGLE)
        values: list[int] = []
        while True:
            tok = self.expect(TokenKind.NUMBER)
            if "." in tok.text:
                raise QglSyntaxError("radix must be an integer", tok.line, tok.col)
            value = int(tok.text)
            if value < 2:
                raise QglSyntaxError("radix must be at least 2", tok.line, tok.col)
            values.append(value)
            if not self.accept(TokenKind.COMMA):
                break
            if self.peek().kind is TokenKind.RANGLE:
                break
        self.expect(TokenKind.RANGLE)
        return tuple(values)

    def varlist(self, name_tok: Token) -> tuple[str, ...]:
        params: list[str] = []
        if self.peek().kind is TokenKind.IDENT:
            while True:
                tok = self.expect(TokenKind.IDENT)
                if tok.text in RESERVED_NAMES:
                    raise ReservedIdentifierError(
                        f"parameter name {tok.text!r} is reserved", tok.line, tok.col
                    )
                if tok.text in params:
                    raise DuplicateParameterError(
                        f"duplicate parameter {tok.text!r}", tok.line, tok.col
                    )
                params.append(tok.text)
                if not self.accept(TokenKind.COMMA):
                    break
                if self.peek().kind is TokenKind.RPAREN:
                    break
        return tuple(params)

    def expression(self) -> AstExpr:
        expr = self.term()
        while self.peek().kind in (TokenKind.PLUS, TokenKind.MINUS):
            op = self.next()
            expr = BinaryOp(op.text, expr, self.term())
        return expr

    def term(self) -> AstExpr:
        negations = 0
        while self.accept(TokenKind.TILDE):
            negations += 1
        expr = self.factor()
        while self.peek().kind in (TokenKind.STAR, TokenKind.SLASH):
            op = self.next()
            expr = BinaryOp(op.text, expr, self.factor())
        for _ in range(negations):
            expr = Neg(expr)
        return expr

    # Right-associative exponentiation.
    def factor(self) -> AstExpr:
        base = self.primary()
        if self.peek().kind is TokenKind.CARET:
            self.next()
            return BinaryOp("^", base, self.factor())
        return base

    def primary(self) -> AstExpr:
        tok = self.peek()
        if tok.kind is TokenKind.NUMBER:
            self.next()
            return Const(float(tok.text))
        if tok.kind is TokenKind.PATTERN_VAR:
            self.next()
            return Var(tok.text)
        if tok.kind is TokenKind.IDENT:
            self.next()
            if self.peek().kind is TokenKind.LPAREN:
                if tok.text not in BUILTIN_FUNCTIONS:
                    raise QglSyntaxError(
                        f"unknown function {tok.text!r}", tok.line, tok.col
                    )
                self.next()
                arg = self.expression()
                if self.peek().kind is TokenKind.COMMA:
                    bad = self.peek()
                    raise QglSyntaxError(
                        f"{tok.text} takes exactly one argument", bad.line, bad.col
                    )
                self.expect(TokenKind.RPAREN)
                return Call(tok.text, arg)
            return Var(tok.text)
        if tok.kind is TokenKind.LPAREN:
            self.next()
            expr = self.expression()
            self.expect(TokenKind.RPAREN)
            return expr
        if tok.kind is TokenKind.LBRACKET:
            return self.matrix()
        raise QglSyntaxError(
            f"unexpected token {tok.text or 'end of input'!r}", tok.line, tok.col
        )

    def matrix(self) -> AstExpr:
        open_tok = self.expect(TokenKind.LBRACKET)
        rows: list[tuple[AstExpr, ...]] = []
        while True:
            rows.append(self.row())
            if not self.accept(TokenKind.COMMA):
                break
            if self.peek().kind is TokenKind.RBRACKET:
                break
        self.expect(TokenKind.RBRACKET)
        width = len(rows[0])
        for row in rows[1:]:
            if len(row) != width:
                raise RaggedMatrixError(
                    f"matrix rows have unequal lengths ({width} vs {len(row)})",
                    open_tok.line,
                    open_tok.col,
                )
        return Matrix(tuple(rows))

    def row(self) -> tuple[AstExpr, ...]:
        self.expect(TokenKind.LBRACKET)
        entries: list[AstExpr] = []
        while True:
            entries.append(self.expression())
            if not self.accept(TokenKind.COMMA):
                break
            if self.peek().kind is TokenKind.RBRACKET:
                break
        self.expect(TokenKind.RBRACKET)
        return tuple(entries)


def parse_definition(source: str) -> AstDefinition:
    """Parse source containing exactly one gate definition."""
    parser = _Parser(tokenize(source))
    definition = parser.definition()
    tail = parser.peek()
    if tail.kind is not TokenKind.EOF:
        raise QglSyntaxError(
            f"unexpected trailing input {tail.text!r}", tail.line, tail.col
        )
    _check_matrix_shape(definition)
    return definition


def parse_definitions(source: str) -> list[AstDefinition]:
    """Parse a file of definitions, in order."""
    parser = _Parser(tokenize(source))
    definitions: list[AstDefinition] = []
    while parser.peek().kind is not TokenKind.EOF:
        definition = parser.definition()
        _check_matrix_shape(definition)
        definitions.append(definition)
    return definitions


def parse_expression(source: str, pattern_mode: bool = False) -> AstExpr:
    """Parse a bare expression (used for rule patterns and tests)."""
    parser = _Parser(tokenize(source, pattern_mode=pattern_mode))
    expr = parser.expression()
    tail = parser.peek()
    if tail.kind is not TokenKind.EOF:
        raise QglSyntaxError(
            f"unexpected trailing input {tail.text!r}", tail.line, tail.col
        )
    return expr


def _shape_of(expr: AstExpr) -> tuple[int, int] | None:
    """Shape of a matrix-valued expression, or None for scalars.

    Mirrors the shape rules of lowering: +,- require equal shapes, * is
    the matrix product when both sides are matrices, / and ^ require a
    scalar right-hand side.
    """
    if isinstance(expr, Matrix):
        return (len(expr.rows), len(expr.rows[0]))
    if isinstance(expr, Neg):
        return _shape_of(expr.operand)
    if isinstance(expr, BinaryOp):
        left = _shape_of(expr.left)
        right = _shape_of(expr.right)
        if expr.op in "+-":
            if left != right:
                raise NonSquareMatrixError(
                    f"operands of {expr.op!r} have different shapes {left} and {right}"
                )
            return left
        if expr.op == "*":
            if left is None:
                return right
            if right is None:
                return left
            if left[1] != right[0]:
                raise NonSquareMatrixError(
                    f"cannot multiply {left[0]}x{left[1]} by {right[0]}x{right[1]}"
                )
            return (left[0], right[1])
        if expr.op == "/":
            if right is not None:
                raise NonSquareMatrixError("cannot divide by a matrix")
            return left
        if expr.op == "^":
            if right is not None:
                raise NonSquareMatrixError("matrix exponents are not supported")
            return left
    if isinstance(expr, Call):
        if _shape_of(expr.arg) is not None:
            raise NonSquareMatrixError(f"{expr.func} of a matrix is not supported")
    return None


def _check_matrix_shape(definition: AstDefinition) -> None:
    shape = _shape_of(definition.body)
    if shape is None:
        raise NonSquareMatrixError(
            f"definition {definition.name!r} must evaluate to a matrix"
        )
    if shape[0] != shape[1]:
        raise NonSquareMatrixError(
            f"definition {definition.name!r} is {shape[0]}x{shape[1]}, not square"
        )


def check_dimensions(definition: AstDefinition) -> tuple[int, ...]:
    """Validate the matrix dimension against the declared radices.

    With explicit radices the dimension must equal their product and they
    are returned as-is. Without radices the gate is taken to act on
    qubits: the dimension must be a power of two and the inferred radix
    list is [2] * log2(dim).
    """
    shape = _shape_of(definition.body)
    assert shape is not None and shape[0] == shape[1]
    dim = shape[0]
    if definition.radices is not None:
        expected = math.prod(definition.radices)
        if dim != expected:
            raise DimensionMismatchError(expected, dim)
        return definition.radices
    if dim < 2 or dim & (dim - 1) != 0:
        raise NonPowerOfTwoDimensionError(
            f"dimension {dim} is not a power of two; declare radices explicitly"
        )
    return (2,) * (dim.bit_length() - 1)
