"""Abstract syntax tree for QGL definitions.

Nodes are immutable. Binary operators are collapsed into one node kind
tagged by the operator character; grouping parentheses are resolved during
parsing and do not appear in the tree, so structural equality compares
mathematical structure.
"""

from __future__ import annotations

from dataclasses import dataclass

# Names with fixed mathematical meaning; not usable as parameters.
RESERVED_NAMES = frozenset({"i", "e", "pi", "π"})

# The built-in scalar functions.
BUILTIN_FUNCTIONS = frozenset({"sin", "cos", "tan", "exp", "ln", "sqrt"})


class AstExpr:
    """Base class for expression nodes."""

    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Var(AstExpr):
    name: str


@dataclass(frozen=True, slots=True)
class Const(AstExpr):
    value: float


@dataclass(frozen=True, slots=True)
class BinaryOp(AstExpr):
    op: str  # one of + - * / ^
    left: AstExpr
    right: AstExpr


@dataclass(frozen=True, slots=True)
class Neg(AstExpr):
    operand: AstExpr


@dataclass(frozen=True, slots=True)
class Call(AstExpr):
    func: str
    arg: AstExpr


@dataclass(frozen=True, slots=True)
class Matrix(AstExpr):
    rows: tuple[tuple[AstExpr, ...], ...]


@dataclass(frozen=True, slots=True)
class AstDefinition:
    """A parsed gate definition: name, optional radices, params, and body."""

    name: str
    radices: tuple[int, ...] | None
    params: tuple[str, ...]
    body: AstExpr
