"""Real-valued scalar expression trees and complex re/im pairs.

Nodes are hash-consed: structurally identical subtrees are the same
object, so equality is identity, repeated subexpressions are shared, and
memoized walks key on id(). The module-level factory functions are smart
constructors that fold literal constants and 0/1 identities on the fly;
``raw_node`` builds without folding (the e-graph and tests need that).

Node kinds: VAR CONST PI ADD SUB NEG MUL DIV POW SIN COS EXP LN SQRT.
There is no tangent node; ``tan`` is canonicalized to SIN/COS during
lowering.
"""

from __future__ import annotations

import math
from typing import Iterator, NamedTuple

VAR = "var"
CONST = "const"
PI = "pi"
ADD = "add"
SUB = "sub"
NEG = "neg"
MUL = "mul"
DIV = "div"
POW = "pow"
SIN = "sin"
COS = "cos"
EXP = "exp"
LN = "ln"
SQRT = "sqrt"

UNARY_KINDS = (NEG, SIN, COS, EXP, LN, SQRT)
BINARY_KINDS = (ADD, SUB, MUL, DIV, POW)
LEAF_KINDS = (VAR, CONST, PI)


class ScalarExpr:
    """One interned expression node. Construct via the factory functions."""

    __slots__ = ("kind", "args", "value")

    kind: str
    args: tuple["ScalarExpr", ...]
    value: float | int | None

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        if self.kind == VAR:
            return f"Var({self.value})"
        if self.kind == CONST:
            return f"Const({self.value})"
        if self.kind == PI:
            return "Pi"
        return f"{self.kind}({', '.join(map(repr, self.args))})"


_INTERN: dict[tuple, ScalarExpr] = {}


def raw_node(kind: str, args: tuple[ScalarExpr, ...] = (), value=None) -> ScalarExpr:
    """Intern a node without any folding."""
    if kind == CONST:
        value = float(value)
        if value == 0.0:
            value = 0.0  # normalize -0.0
    key = (kind, args, value)
    node = _INTERN.get(key)
    if node is None:
        node = object.__new__(ScalarExpr)
        object.__setattr__(node, "kind", kind)
        object.__setattr__(node, "args", args)
        object.__setattr__(node, "value", value)
        _INTERN[key] = node
    return node


ZERO = raw_node(CONST, value=0.0)
ONE = raw_node(CONST, value=1.0)
PI_NODE = raw_node(PI)


def var(index: int) -> ScalarExpr:
    return raw_node(VAR, value=int(index))


def const(value: float) -> ScalarExpr:
    return raw_node(CONST, value=value)


def is_zero(e: ScalarExpr) -> bool:
    return e.kind == CONST and e.value == 0.0


def is_one(e: ScalarExpr) -> bool:
    return e.kind == CONST and e.value == 1.0


def add(a: ScalarExpr, b: ScalarExpr) -> ScalarExpr:
    if is_zero(a):
        return b
    if is_zero(b):
        return a
    if a.kind == CONST and b.kind == CONST:
        return const(a.value + b.value)
    return raw_node(ADD, (a, b))


def sub(a: ScalarExpr, b: ScalarExpr) -> ScalarExpr:
    if is_zero(b):
        return a
    if is_zero(a):
        return neg(b)
    if a is b:
        return ZERO
    if a.kind == CONST and b.kind == CONST:
        return const(a.value - b.value)
    return raw_node(SUB, (a, b))


def neg(a: ScalarExpr) -> ScalarExpr:
    if a.kind == CONST:
        return const(-a.value)
    if a.kind == NEG:
        return a.args[0]
    return raw_node(NEG, (a,))


def mul(a: ScalarExpr, b: ScalarExpr) -> ScalarExpr:
    if is_zero(a) or is_zero(b):
        return ZERO
    if is_one(a):
        return b
    if is_one(b):
        return a
    if a.kind == CONST and b.kind == CONST:
        return const(a.value * b.value)
    if a.kind == NEG and b.kind == NEG:
        return mul(a.args[0], b.args[0])
    if a.kind == NEG:
        return neg(mul(a.args[0], b))
    if b.kind == NEG:
        return neg(mul(a, b.args[0]))
    return raw_node(MUL, (a, b))


def div(a: ScalarExpr, b: ScalarExpr) -> ScalarExpr:
    if is_zero(a):
        return ZERO
    if is_one(b):
        return a
    if a.kind == CONST and b.kind == CONST and b.value != 0.0:
        return const(a.value / b.value)
    if a.kind == NEG:
        return neg(div(a.args[0], b))
    if b.kind == NEG:
        return neg(div(a, b.args[0]))
    return raw_node(DIV, (a, b))


def pow_(a: ScalarExpr, b: ScalarExpr) -> ScalarExpr:
    if b.kind == CONST:
        if b.value == 0.0:
            return ONE
        if b.value == 1.0:
            return a
    if is_one(a):
        return ONE
    if a.kind == CONST and b.kind == CONST:
        try:
            return const(math.pow(a.value, b.value))
        except (ValueError, OverflowError):
            pass
    return raw_node(POW, (a, b))


def _fold_unary(kind: str, fn, a: ScalarExpr) -> ScalarExpr:
    if a.kind == CONST:
        try:
            return const(fn(a.value))
        except (ValueError, OverflowError):
            pass
    return raw_node(kind, (a,))


def sin(a: ScalarExpr) -> ScalarExpr:
    return _fold_unary(SIN, math.sin, a)


def cos(a: ScalarExpr) -> ScalarExpr:
    return _fold_unary(COS, math.cos, a)


def exp(a: ScalarExpr) -> ScalarExpr:
    if is_zero(a):
        return ONE
    return _fold_unary(EXP, math.exp, a)


def ln(a: ScalarExpr) -> ScalarExpr:
    return _fold_unary(LN, math.log, a)


def sqrt(a: ScalarExpr) -> ScalarExpr:
    return _fold_unary(SQRT, math.sqrt, a)


class ComplexScalar(NamedTuple):
    """A complex value as separate real and imaginary expression trees."""

    re: ScalarExpr
    im: ScalarExpr

    def is_real(self) -> bool:
        return is_zero(self.im)


C_ZERO = ComplexScalar(ZERO, ZERO)
C_ONE = ComplexScalar(ONE, ZERO)


def cadd(x: ComplexScalar, y: ComplexScalar) -> ComplexScalar:
    return ComplexScalar(add(x.re, y.re), add(x.im, y.im))


def csub(x: ComplexScalar, y: ComplexScalar) -> ComplexScalar:
    return ComplexScalar(sub(x.re, y.re), sub(x.im, y.im))


def cneg(x: ComplexScalar) -> ComplexScalar:
    return ComplexScalar(neg(x.re), neg(x.im))


def cconj(x: ComplexScalar) -> ComplexScalar:
    return ComplexScalar(x.re, neg(x.im))


def cmul(x: ComplexScalar, y: ComplexScalar) -> ComplexScalar:
    a, b = x
    c, d = y
    return ComplexScalar(
        sub(mul(a, c), mul(b, d)),
        add(mul(a, d), mul(b, c)),
    )


def cdiv(x: ComplexScalar, y: ComplexScalar) -> ComplexScalar:
    a, b = x
    c, d = y
    if is_zero(d):
        return ComplexScalar(div(a, c), div(b, c))
    denom = add(mul(c, c), mul(d, d))
    return ComplexScalar(
        div(add(mul(a, c), mul(b, d)), denom),
        div(sub(mul(b, c), mul(a, d)), denom),
    )


def differentiate_scalar(e: ScalarExpr, index: int, memo: dict | None = None) -> ScalarExpr:
    """Derivative of ``e`` with respect to Var(index)."""
    if memo is None:
        memo = {}
    key = id(e)
    hit = memo.get(key)
    if hit is not None:
        return hit
    k = e.kind
    if k == VAR:
        d = ONE if e.value == index else ZERO
    elif k in (CONST, PI):
        d = ZERO
    else:
        da = differentiate_scalar(e.args[0], index, memo)
        if k == NEG:
            d = neg(da)
        elif k == SIN:
            d = mul(cos(e.args[0]), da)
        elif k == COS:
            d = neg(mul(sin(e.args[0]), da))
        elif k == EXP:
            d = mul(e, da)
        elif k == LN:
            d = div(da, e.args[0])
        elif k == SQRT:
            d = div(da, mul(const(2.0), e))
        else:
            b = e.args[1]
            db = differentiate_scalar(b, index, memo)
            if k == ADD:
                d = add(da, db)
            elif k == SUB:
                d = sub(da, db)
            elif k == MUL:
                d = add(mul(da, b), mul(e.args[0], db))
            elif k == DIV:
                a = e.args[0]
                d = div(sub(mul(da, b), mul(a, db)), mul(b, b))
            elif k == POW:
                a = e.args[0]
                if b.kind == CONST:
                    d = mul(mul(b, pow_(a, const(b.value - 1.0))), da)
                else:
                    # a^b * (db*ln(a) + b*da/a); requires a > 0 numerically.
                    d = mul(e, add(mul(db, ln(a)), div(mul(b, da), a)))
            else:  # pragma: no cover - exhaustive
                raise ValueError(f"unknown node kind {k!r}")
    memo[key] = d
    return d


def eval_scalar(e: ScalarExpr, params, memo: dict | None = None) -> float:
    """Tree-walk evaluation in double precision."""
    if memo is None:
        memo = {}
    key = id(e)
    hit = memo.get(key)
    if hit is not None:
        return hit
    k = e.kind
    if k == VAR:
        v = float(params[e.value])
    elif k == CONST:
        v = e.value
    elif k == PI:
        v = math.pi
    elif k == NEG:
        v = -eval_scalar(e.args[0], params, memo)
    elif k == ADD:
        v = eval_scalar(e.args[0], params, memo) + eval_scalar(e.args[1], params, memo)
    elif k == SUB:
        v = eval_scalar(e.args[0], params, memo) - eval_scalar(e.args[1], params, memo)
    elif k == MUL:
        v = eval_scalar(e.args[0], params, memo) * eval_scalar(e.args[1], params, memo)
    elif k == DIV:
        v = eval_scalar(e.args[0], params, memo) / eval_scalar(e.args[1], params, memo)
    elif k == POW:
        v = math.pow(
            eval_scalar(e.args[0], params, memo), eval_scalar(e.args[1], params, memo)
        )
    elif k == SIN:
        v = math.sin(eval_scalar(e.args[0], params, memo))
    elif k == COS:
        v = math.cos(eval_scalar(e.args[0], params, memo))
    elif k == EXP:
        v = math.exp(eval_scalar(e.args[0], params, memo))
    elif k == LN:
        v = math.log(eval_scalar(e.args[0], params, memo))
    elif k == SQRT:
        v = math.sqrt(eval_scalar(e.args[0], params, memo))
    else:  # pragma: no cover - exhaustive
        raise ValueError(f"unknown node kind {k!r}")
    memo[key] = v
    return v


def shift_params(e: ScalarExpr, offset: int, memo: dict | None = None) -> ScalarExpr:
    """Return ``e`` with every Var index increased by ``offset``."""
    if offset == 0:
        return e
    if memo is None:
        memo = {}
    key = id(e)
    hit = memo.get(key)
    if hit is not None:
        return hit
    if e.kind == VAR:
        out = var(e.value + offset)
    elif e.kind in (CONST, PI):
        out = e
    else:
        out = raw_node(e.kind, tuple(shift_params(a, offset, memo) for a in e.args))
    memo[key] = out
    return out


def remap_params(
    e: ScalarExpr, mapping: dict[int, ScalarExpr], memo: dict | None = None
) -> ScalarExpr:
    """Replace Var(i) by mapping[i] (which may be any scalar expression)."""
    if memo is None:
        memo = {}
    key = id(e)
    hit = memo.get(key)
    if hit is not None:
        return hit
    if e.kind == VAR:
        out = mapping.get(e.value, e)
    elif e.kind in (CONST, PI):
        out = e
    else:
        args = tuple(remap_params(a, mapping, memo) for a in e.args)
        out = _REBUILD[e.kind](args)
    memo[key] = out
    return out


_REBUILD = {
    ADD: lambda a: add(a[0], a[1]),
    SUB: lambda a: sub(a[0], a[1]),
    MUL: lambda a: mul(a[0], a[1]),
    DIV: lambda a: div(a[0], a[1]),
    POW: lambda a: pow_(a[0], a[1]),
    NEG: lambda a: neg(a[0]),
    SIN: lambda a: sin(a[0]),
    COS: lambda a: cos(a[0]),
    EXP: lambda a: exp(a[0]),
    LN: lambda a: ln(a[0]),
    SQRT: lambda a: sqrt(a[0]),
}


def iter_nodes(roots) -> Iterator[ScalarExpr]:
    """Yield each distinct node reachable from ``roots`` once."""
    seen: set[int] = set()
    stack = list(roots)
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        yield node
        stack.extend(node.args)


def used_params(roots) -> set[int]:
    return {n.value for n in iter_nodes(roots) if n.kind == VAR}
