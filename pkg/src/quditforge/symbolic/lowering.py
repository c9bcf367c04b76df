"""Lowering from QGL ASTs to the complex symbolic IR.

Every expression is split structurally into real and imaginary trees.
Values during lowering are either a single complex scalar or a full
matrix of them, so matrix literals can be scaled and multiplied inside a
definition body. Anything without a closed element-wise split (complex
logarithms, complex trigonometry, non-integer complex powers) is
rejected.
"""

from __future__ import annotations

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
import math

from quditforge.qgl.parser import check_dimensions
from quditforge.symbolic.errors import (
    DimensionMismatchError,
    UnknownParameterError,
    UnsupportedComplexFormError,
)
from quditforge.symbolic.scalar import (
    C_ONE,
    ComplexScalar,
    ZERO,
    cadd,
    cdiv,
    cmul,
    cneg,
    const,
    cos,
    csub,
    div,
    exp,
    ln,
    mul,
    pow_,
    sin,
    sqrt,
    var,
)
from quditforge.symbolic import scalar as sc

_Grid = list[list[ComplexScalar]]
_Value = ComplexScalar | list  # scalar or grid


def _is_grid(v: _Value) -> bool:
    return isinstance(v, list)


def _map_grid(fn, g: _Grid) -> _Grid:
    return [[fn(entry) for entry in row] for row in g]


def _euler(exponent: ComplexScalar) -> ComplexScalar:
    """e^(x+iy) -> (e^x cos y, e^x sin y)."""
    x, y = exponent
    mag = exp(x)
    if sc.is_zero(y):
        return ComplexScalar(mag, ZERO)
    return ComplexScalar(mul(mag, cos(y)), mul(mag, sin(y)))


def _int_power(z: ComplexScalar, n: int) -> ComplexScalar:
    if n < 0:
        return cdiv(C_ONE, _int_power(z, -n))
    acc = C_ONE
    for _ in range(n):
        acc = cmul(acc, z)
    return acc


def _matmul_grid(a: _Grid, b: _Grid) -> _Grid:
    if len(a[0]) != len(b):
        raise DimensionMismatchError(
            f"cannot multiply {len(a)}x{len(a[0])} by {len(b)}x{len(b[0])}"
        )
    out: _Grid = []
    for i in range(len(a)):
        row = []
        for j in range(len(b[0])):
            acc = cmul(a[i][0], b[0][j])
            for k in range(1, len(b)):
                acc = cadd(acc, cmul(a[i][k], b[k][j]))
            row.append(acc)
        out.append(row)
    return out


class _Lowerer:
    def __init__(self, params: tuple[str, ...]):
        self.params = {name: k for k, name in enumerate(params)}

    def lower(self, expr: AstExpr) -> _Value:
        if isinstance(expr, Const):
            return ComplexScalar(const(expr.value), ZERO)
        if isinstance(expr, Var):
            return self._variable(expr.name)
        if isinstance(expr, Neg):
            v = self.lower(expr.operand)
            if _is_grid(v):
                return _map_grid(cneg, v)
            return cneg(v)
        if isinstance(expr, Matrix):
            return self._matrix(expr)
        if isinstance(expr, Call):
            return self._call(expr)
        if isinstance(expr, BinaryOp):
            return self._binary(expr)
        raise TypeError(f"unknown AST node {expr!r}")

    def _variable(self, name: str) -> ComplexScalar:
        if name == "i":
            return ComplexScalar(ZERO, sc.ONE)
        if name == "e":
            return ComplexScalar(const(math.e), ZERO)
        if name in ("pi", "π"):
            return ComplexScalar(sc.PI_NODE, ZERO)
        index = self.params.get(name)
        if index is None:
            raise UnknownParameterError(f"unknown identifier {name!r}")
        return ComplexScalar(var(index), ZERO)

    def _matrix(self, expr: Matrix) -> _Grid:
        grid: _Grid = []
        for row in expr.rows:
            entries = []
            for entry in row:
                v = self.lower(entry)
                if _is_grid(v):
                    raise UnsupportedComplexFormError(
                        "matrix entries must be scalar expressions"
                    )
                entries.append(v)
            grid.append(entries)
        return grid

    def _call(self, expr: Call) -> ComplexScalar:
        arg = self.lower(expr.arg)
        if _is_grid(arg):
            raise UnsupportedComplexFormError(f"{expr.func} of a matrix is not supported")
        if expr.func == "exp":
            return _euler(arg)
        if not arg.is_real():
            raise UnsupportedComplexFormError(
                f"{expr.func} of a complex expression has no closed element-wise form"
            )
        x = arg.re
        if expr.func == "sin":
            return ComplexScalar(sin(x), ZERO)
        if expr.func == "cos":
            return ComplexScalar(cos(x), ZERO)
        if expr.func == "tan":
            return ComplexScalar(div(sin(x), cos(x)), ZERO)
        if expr.func == "ln":
            return ComplexScalar(ln(x), ZERO)
        if expr.func == "sqrt":
            return ComplexScalar(sqrt(x), ZERO)
        raise UnsupportedComplexFormError(f"unknown function {expr.func!r}")

    def _binary(self, expr: BinaryOp) -> _Value:
        # e^(...) is the exponential, whatever the exponent's form.
        if expr.op == "^" and isinstance(expr.left, Var) and expr.left.name == "e":
            exponent = self.lower(expr.right)
            if _is_grid(exponent):
                raise UnsupportedComplexFormError("matrix exponentials are not supported")
            return _euler(exponent)

        left = self.lower(expr.left)
        right = self.lower(expr.right)
        lg, rg = _is_grid(left), _is_grid(right)

        if expr.op == "+" or expr.op == "-":
            op = cadd if expr.op == "+" else csub
            if lg != rg:
                raise UnsupportedComplexFormError("cannot add a scalar and a matrix")
            if lg:
                if len(left) != len(right) or len(left[0]) != len(right[0]):
                    raise DimensionMismatchError(
                        f"operands of {expr.op!r} have different shapes"
                    )
                return [
                    [op(a, b) for a, b in zip(ra, rb)] for ra, rb in zip(left, right)
                ]
            return op(left, right)

        if expr.op == "*":
            if lg and rg:
                return _matmul_grid(left, right)
            if lg:
                return _map_grid(lambda c: cmul(c, right), left)
            if rg:
                return _map_grid(lambda c: cmul(left, c), right)
            return cmul(left, right)

        if expr.op == "/":
            if rg:
                raise UnsupportedComplexFormError("cannot divide by a matrix")
            if lg:
                return _map_grid(lambda c: cdiv(c, right), left)
            return cdiv(left, right)

        assert expr.op == "^"
        return self._power(left, right)

    def _power(self, base: _Value, exponent: _Value) -> _Value:
        if _is_grid(exponent):
            raise UnsupportedComplexFormError("matrix exponents are not supported")
        exp_int = None
        if exponent.is_real() and exponent.re.kind == sc.CONST:
            v = exponent.re.value
            if v == int(v):
                exp_int = int(v)
        if _is_grid(base):
            if exp_int is None or exp_int < 0:
                raise UnsupportedComplexFormError(
                    "matrix powers require a non-negative integer exponent"
                )
            size = len(base)
            acc: _Grid = [
                [C_ONE if i == j else ComplexScalar(ZERO, ZERO) for j in range(size)]
                for i in range(size)
            ]
            for _ in range(exp_int):
                acc = _matmul_grid(acc, base)
            return acc
        if base.is_real() and exponent.is_real():
            return ComplexScalar(pow_(base.re, exponent.re), ZERO)
        if exp_int is not None:
            return _int_power(base, exp_int)
        raise UnsupportedComplexFormError(
            "complex powers must be written as e^(...) or use integer exponents"
        )


def lower_expression(expr: AstExpr, params: tuple[str, ...]) -> _Value:
    """Lower a bare expression against an ordered parameter list."""
    return _Lowerer(params).lower(expr)


def lower(definition: AstDefinition):
    """Lower a checked definition to a UnitaryExpression."""
    from quditforge.symbolic.unitary import UnitaryExpression

    radices = check_dimensions(definition)
    value = _Lowerer(definition.params).lower(definition.body)
    if not _is_grid(value):
        raise UnsupportedComplexFormError("definition body must be a matrix")
    body = tuple(tuple(row) for row in value)
    return UnitaryExpression(
        name=definition.name,
        radices=tuple(radices),
        params=tuple(definition.params),
        body=body,
    )
