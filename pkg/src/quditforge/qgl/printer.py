"""Pretty-printer for QGL ASTs.

Emits the minimal parentheses needed for the output to reparse to a
structurally identical tree. Remember that `~` negates a whole term, so a
negation used as a `*`, `/`, or `^` operand must be parenthesized.
"""

from __future__ import annotations

from decimal import Decimal

from quditforge.qgl.ast import (
    AstDefinition,
    AstExpr,
    BinaryOp,
    Call,
    Const,
    Matrix,
    Neg,
    Var,
)

# Binding levels: +,- = 1; ~ = 1.5 (binds a term); *,/ = 2; ^ = 3; atoms = 4.
_ADD, _NEG, _MUL, _POW, _ATOM = 1.0, 1.5, 2.0, 3.0, 4.0


def format_number(value: float) -> str:
    """Format a non-negative float as a plain decimal that reparses exactly."""
    assert value >= 0.0
    text = repr(value)
    if text.endswith(".0"):
        return text[:-2]
    if "e" in text or "E" in text:
        # Exact decimal expansion of the binary double; no exponent suffix.
        text = format(Decimal(value), "f")
    return text


def _level(expr: AstExpr) -> float:
    if isinstance(expr, BinaryOp):
        return {"+": _ADD, "-": _ADD, "*": _MUL, "/": _MUL, "^": _POW}[expr.op]
    if isinstance(expr, Neg):
        return _NEG
    return _ATOM


def _fmt(expr: AstExpr, min_level: float) -> str:
    level = _level(expr)
    text = _fmt_inner(expr)
    if level < min_level:
        return f"({text})"
    return text


def _fmt_inner(expr: AstExpr) -> str:
    if isinstance(expr, Var):
        return expr.name
    if isinstance(expr, Const):
        return format_number(expr.value)
    if isinstance(expr, Neg):
        # The operand may be another negation or anything term-tight.
        operand = expr.operand
        if isinstance(operand, Neg):
            return f"~{_fmt_inner(operand)}"
        return f"~{_fmt(operand, _MUL)}"
    if isinstance(expr, BinaryOp):
        if expr.op in "+-":
            return f"{_fmt(expr.left, _ADD)} {expr.op} {_fmt(expr.right, _NEG)}"
        if expr.op in "*/":
            return f"{_fmt(expr.left, _MUL)}{expr.op}{_fmt(expr.right, _POW)}"
        return f"{_fmt(expr.left, _ATOM)}^{_fmt(expr.right, _POW)}"
    if isinstance(expr, Call):
        return f"{expr.func}({_fmt_inner(expr.arg)})"
    if isinstance(expr, Matrix):
        rows = ", ".join(
            "[" + ", ".join(_fmt_inner(entry) for entry in row) + "]"
            for row in expr.rows
        )
        return f"[{rows}]"
    raise TypeError(f"unknown AST node {expr!r}")


def format_expr(expr: AstExpr) -> str:
    return _fmt_inner(expr)


def format_definition(definition: AstDefinition) -> str:
    radices = ""
    if definition.radices is not None:
        radices = "<" + ", ".join(str(r) for r in definition.radices) + ">"
    params = ", ".join(definition.params)
    if isinstance(definition.body, Matrix):
        rows = ",\n  ".join(
            "[" + ", ".join(_fmt_inner(entry) for entry in row) + "]"
            for row in definition.body.rows
        )
        body = f"[\n  {rows},\n]"
    else:
        body = _fmt_inner(definition.body)
    return f"{definition.name}{radices}({params}) {{\n {body}\n}}"
