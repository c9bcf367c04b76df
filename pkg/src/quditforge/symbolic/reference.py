"""Slow tree-walk evaluation of symbolic expressions.

This is the numeric oracle: every faster evaluation path in the package
is tested against it.
"""

from __future__ import annotations

import numpy as np

from quditforge.symbolic.scalar import ComplexScalar, eval_scalar
from quditforge.symbolic.unitary import (
    GradientExpression,
    SymbolicTensor,
    UnitaryExpression,
)


def _eval_complex(c: ComplexScalar, params, memo: dict) -> complex:
    return complex(eval_scalar(c.re, params, memo), eval_scalar(c.im, params, memo))


def eval_unitary(u: UnitaryExpression, params) -> np.ndarray:
    if len(params) != u.num_params:
        raise ValueError(f"{u.name} expects {u.num_params} parameters, got {len(params)}")
    memo: dict = {}
    dim = u.dim
    out = np.empty((dim, dim), dtype=np.complex128)
    for i in range(dim):
        for j in range(dim):
            out[i, j] = _eval_complex(u.body[i][j], params, memo)
    return out


def eval_gradient(g: GradientExpression, params) -> np.ndarray:
    count = len(g.grids)
    dim = len(g.grids[0]) if count else 0
    memo: dict = {}
    out = np.empty((count, dim, dim), dtype=np.complex128)
    for k, grid in enumerate(g.grids):
        for i in range(dim):
            for j in range(dim):
                out[k, i, j] = _eval_complex(grid[i][j], params, memo)
    return out


def eval_tensor(t: SymbolicTensor, params) -> np.ndarray:
    memo: dict = {}
    flat = np.empty(len(t.elems), dtype=np.complex128)
    for k, elem in enumerate(t.elems):
        flat[k] = _eval_complex(elem, params, memo)
    return flat.reshape(t.shape)


def eval_reference(expr, params) -> np.ndarray:
    """Evaluate a unitary, gradient, or tensor expression at a parameter point."""
    if isinstance(expr, UnitaryExpression):
        return eval_unitary(expr, params)
    if isinstance(expr, GradientExpression):
        return eval_gradient(expr, params)
    if isinstance(expr, SymbolicTensor):
        return eval_tensor(expr, params)
    raise TypeError(f"cannot evaluate {type(expr).__name__}")
