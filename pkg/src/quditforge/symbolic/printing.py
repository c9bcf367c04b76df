"""Canonical QGL text for lowered expressions.

Converts scalar trees back to QGL ASTs and prints them. The guarantee
used by serialization is that lowering the printed text reproduces the
original interned nodes exactly, so values computed from a round-tripped
expression are bit-identical.
"""

from __future__ import annotations

from quditforge.qgl.ast import AstExpr, BinaryOp, Call, Const, Matrix, Neg, Var
from quditforge.qgl.printer import format_expr
from quditforge.symbolic import scalar
from quditforge.symbolic.scalar import ComplexScalar, ScalarExpr


def scalar_to_ast(e: ScalarExpr, names: list[str]) -> AstExpr:
    k = e.kind
    if k == scalar.VAR:
        return Var(names[e.value])
    if k == scalar.CONST:
        if e.value < 0:
            return Neg(Const(-e.value))
        return Const(e.value)
    if k == scalar.PI:
        return Var("pi")
    if k == scalar.NEG:
        return Neg(scalar_to_ast(e.args[0], names))
    if k == scalar.EXP:
        return BinaryOp("^", Var("e"), scalar_to_ast(e.args[0], names))
    if k in (scalar.SIN, scalar.COS, scalar.LN, scalar.SQRT):
        return Call(k, scalar_to_ast(e.args[0], names))
    op = {scalar.ADD: "+", scalar.SUB: "-", scalar.MUL: "*", scalar.DIV: "/", scalar.POW: "^"}[k]
    return BinaryOp(op, scalar_to_ast(e.args[0], names), scalar_to_ast(e.args[1], names))


def complex_to_ast(c: ComplexScalar, names: list[str]) -> AstExpr:
    if scalar.is_zero(c.im):
        return scalar_to_ast(c.re, names)
    imag = BinaryOp("*", Var("i"), scalar_to_ast(c.im, names))
    if scalar.is_zero(c.re):
        return imag
    return BinaryOp("+", scalar_to_ast(c.re, names), imag)


def complex_to_qgl(c: ComplexScalar, names: list[str]) -> str:
    return format_expr(complex_to_ast(c, names))


def grid_to_qgl(grid, names: list[str]) -> str:
    """Matrix-literal text for a 2D grid of complex scalars."""
    ast = Matrix(
        tuple(tuple(complex_to_ast(entry, names) for entry in row) for row in grid)
    )
    return format_expr(ast)


def positional_names(count: int) -> list[str]:
    return [f"v{k}" for k in range(count)]
