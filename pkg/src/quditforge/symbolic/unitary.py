"""Matrix-valued symbolic expressions and their composition algebra.

Parameters are positional after lowering; names are metadata carried for
display and name-based substitution. Composition concatenates the operand
parameter lists without unifying shared names; unification is done
explicitly with ``substitute``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from quditforge.symbolic.errors import (
    AxisMismatchError,
    BadPermutationError,
    DimensionMismatchError,
    UnknownParameterError,
)
from quditforge.symbolic.scalar import (
    ComplexScalar,
    ScalarExpr,
    cadd,
    cconj,
    cmul,
    const,
    differentiate_scalar,
    remap_params,
    shift_params,
    used_params,
    var,
)

_Grid = tuple[tuple[ComplexScalar, ...], ...]


@dataclass(frozen=True)
class UnitaryExpression:
    """A named, parameterized square matrix of complex symbolic scalars."""

    name: str
    radices: tuple[int, ...]
    params: tuple[str, ...]
    body: _Grid

    def __post_init__(self):
        dim = math.prod(self.radices)
        if len(self.body) != dim or any(len(row) != dim for row in self.body):
            raise DimensionMismatchError(
                f"{self.name}: body is not {dim}x{dim} for radices {self.radices}"
            )

    @property
    def dim(self) -> int:
        return len(self.body)

    @property
    def num_params(self) -> int:
        return len(self.params)

    @cached_property
    def structural_key(self) -> tuple:
        """Hashable identity up to renaming of parameters and the gate name.

        Interned scalar nodes make id() a structural fingerprint, so two
        independently lowered but structurally identical expressions
        produce equal keys.
        """
        grid = tuple(
            tuple((id(c.re), id(c.im)) for c in row) for row in self.body
        )
        return ("u", self.radices, len(self.params), grid)

    def scalars(self) -> list[ScalarExpr]:
        """All re/im trees of the matrix, row-major."""
        out: list[ScalarExpr] = []
        for row in self.body:
            for c in row:
                out.append(c.re)
                out.append(c.im)
        return out


@dataclass(frozen=True)
class MatrixExpression:
    """A rectangular grid of complex scalars over positional parameters.

    The compiler's leaf payload: traced or permuted gate expressions are
    generally no longer square, but compile the same way.
    """

    name: str
    rows: int
    cols: int
    num_params: int
    body: _Grid

    def __post_init__(self):
        if len(self.body) != self.rows or any(
            len(row) != self.cols for row in self.body
        ):
            raise DimensionMismatchError(
                f"{self.name}: body is not {self.rows}x{self.cols}"
            )

    @cached_property
    def structural_key(self) -> tuple:
        grid = tuple(
            tuple((id(c.re), id(c.im)) for c in row) for row in self.body
        )
        return ("m", self.rows, self.cols, self.num_params, grid)

    def scalars(self) -> list[ScalarExpr]:
        out: list[ScalarExpr] = []
        for row in self.body:
            for c in row:
                out.append(c.re)
                out.append(c.im)
        return out


@dataclass(frozen=True)
class GradientExpression:
    """Per-parameter matrices of complex scalars: a rank-3 symbolic tensor."""

    params: tuple[str, ...]
    grids: tuple[_Grid, ...]  # one D x D grid per parameter

    def scalars(self) -> list[ScalarExpr]:
        out: list[ScalarExpr] = []
        for grid in self.grids:
            for row in grid:
                for c in row:
                    out.append(c.re)
                    out.append(c.im)
        return out


@dataclass(frozen=True)
class SymbolicTensor:
    """A tensor of complex scalars with an explicit shape; rank 0 is a scalar."""

    shape: tuple[int, ...]
    elems: tuple[ComplexScalar, ...]  # row-major

    def __post_init__(self):
        if math.prod(self.shape) != len(self.elems):
            raise DimensionMismatchError(
                f"shape {self.shape} does not hold {len(self.elems)} elements"
            )

    def as_object_array(self) -> np.ndarray:
        arr = np.empty(len(self.elems), dtype=object)
        for k, elem in enumerate(self.elems):
            arr[k] = elem
        return arr.reshape(self.shape)

    @staticmethod
    def from_object_array(arr: np.ndarray) -> "SymbolicTensor":
        flat = arr.reshape(-1)
        return SymbolicTensor(tuple(arr.shape), tuple(flat))


def tensor_view(u: UnitaryExpression) -> SymbolicTensor:
    """The gate matrix as a tensor with one axis per wire leg (outs, then ins)."""
    elems = tuple(c for row in u.body for c in row)
    return SymbolicTensor(u.radices + u.radices, elems)


def differentiate(u: UnitaryExpression) -> GradientExpression:
    """Element-wise analytical gradient with respect to every parameter."""
    grids = []
    for k in range(u.num_params):
        memo: dict = {}
        grid = tuple(
            tuple(
                ComplexScalar(
                    differentiate_scalar(c.re, k, memo),
                    differentiate_scalar(c.im, k, memo),
                )
                for c in row
            )
            for row in u.body
        )
        grids.append(grid)
    return GradientExpression(params=u.params, grids=tuple(grids))


def _shift_grid(grid: _Grid, offset: int) -> _Grid:
    if offset == 0:
        return grid
    memo: dict = {}
    return tuple(
        tuple(
            ComplexScalar(shift_params(c.re, offset, memo), shift_params(c.im, offset, memo))
            for c in row
        )
        for row in grid
    )


def matmul(a: UnitaryExpression, b: UnitaryExpression) -> UnitaryExpression:
    """Symbolic matrix product a @ b with concatenated parameter lists."""
    if a.dim != b.dim:
        raise DimensionMismatchError(
            f"cannot multiply {a.dim}x{a.dim} by {b.dim}x{b.dim}"
        )
    shifted = _shift_grid(b.body, a.num_params)
    dim = a.dim
    body = []
    for i in range(dim):
        row = []
        for j in range(dim):
            acc = cmul(a.body[i][0], shifted[0][j])
            for k in range(1, dim):
                acc = cadd(acc, cmul(a.body[i][k], shifted[k][j]))
            row.append(acc)
        body.append(tuple(row))
    return UnitaryExpression(
        name=f"({a.name}*{b.name})",
        radices=a.radices,
        params=a.params + b.params,
        body=tuple(body),
    )


def kron(a: UnitaryExpression, b: UnitaryExpression) -> UnitaryExpression:
    """Symbolic Kronecker product; radix lists concatenate."""
    shifted = _shift_grid(b.body, a.num_params)
    da, db = a.dim, b.dim
    body = []
    for i in range(da * db):
        ia, ib = divmod(i, db)
        row = []
        for j in range(da * db):
            ja, jb = divmod(j, db)
            row.append(cmul(a.body[ia][ja], shifted[ib][jb]))
        body.append(tuple(row))
    return UnitaryExpression(
        name=f"({a.name}x{b.name})",
        radices=a.radices + b.radices,
        params=a.params + b.params,
        body=tuple(body),
    )


def dagger(a: UnitaryExpression) -> UnitaryExpression:
    """Conjugate transpose."""
    dim = a.dim
    body = tuple(
        tuple(cconj(a.body[j][i]) for j in range(dim)) for i in range(dim)
    )
    return UnitaryExpression(
        name=f"{a.name}†", radices=a.radices, params=a.params, body=body
    )


def _resolve_param(a: UnitaryExpression, key) -> int:
    if isinstance(key, int):
        if not 0 <= key < a.num_params:
            raise UnknownParameterError(f"parameter index {key} out of range")
        return key
    matches = [k for k, name in enumerate(a.params) if name == key]
    if not matches:
        raise UnknownParameterError(f"unknown parameter {key!r}")
    if len(matches) > 1:
        raise UnknownParameterError(
            f"parameter name {key!r} is ambiguous; use an index"
        )
    return matches[0]


def substitute(a: UnitaryExpression, bindings: dict) -> UnitaryExpression:
    """Bind parameters (by name or index) to constants or scalar expressions.

    Expression bindings refer to the original parameter indices of ``a``;
    a bound parameter may not appear in a binding. Remaining parameters
    keep their relative order and are relabeled densely.
    """
    mapping: dict[int, ScalarExpr] = {}
    for key, value in bindings.items():
        index = _resolve_param(a, key)
        if isinstance(value, (int, float)):
            value = const(float(value))
        mapping[index] = value
    bound = set(mapping)
    referenced = used_params(mapping.values())
    if referenced & bound:
        raise UnknownParameterError(
            "substitution expressions may not reference parameters being bound"
        )
    survivors = [k for k in range(a.num_params) if k not in bound]
    relabel = {old: var(new) for new, old in enumerate(survivors)}
    full = dict(mapping)
    for old, node in relabel.items():
        full[old] = node
    # Bindings are in terms of old indices; relabel their variables too.
    memo: dict = {}
    final = {
        old: remap_params(expr, relabel, memo) if old in bound else expr
        for old, expr in full.items()
    }
    memo2: dict = {}
    body = tuple(
        tuple(
            ComplexScalar(
                remap_params(c.re, final, memo2), remap_params(c.im, final, memo2)
            )
            for c in row
        )
        for row in a.body
    )
    return UnitaryExpression(
        name=a.name,
        radices=a.radices,
        params=tuple(a.params[k] for k in survivors),
        body=body,
    )


def trace_indices(a, pairs: list[tuple[int, int]]) -> SymbolicTensor:
    """Symbolic sum over paired axes of a tensor (or of a gate's tensor view)."""
    tensor = tensor_view(a) if isinstance(a, UnitaryExpression) else a
    shape = tensor.shape
    traced: list[int] = []
    for x, y in pairs:
        for axis in (x, y):
            if not 0 <= axis < len(shape):
                raise AxisMismatchError(f"axis {axis} out of range for shape {shape}")
            if axis in traced:
                raise AxisMismatchError(f"axis {axis} traced twice")
        if shape[x] != shape[y]:
            raise AxisMismatchError(
                f"axes {x} and {y} have different radices {shape[x]} and {shape[y]}"
            )
        traced.extend((x, y))
    kept = [ax for ax in range(len(shape)) if ax not in traced]
    # Kept axes first, then each traced pair side by side.
    arr = tensor.as_object_array().transpose(kept + traced)
    kept_shape = tuple(shape[ax] for ax in kept)
    kept_size = math.prod(kept_shape)
    pair_dims = [shape[x] for x, _ in pairs]
    flat = arr.reshape(kept_size, *(d for dim in pair_dims for d in (dim, dim)))
    out = np.empty(kept_size, dtype=object)
    for k in range(kept_size):
        total = None
        for diag in itertools.product(*(range(d) for d in pair_dims)):
            idx = tuple(z for d in diag for z in (d, d))
            value = flat[(k, *idx)]
            total = value if total is None else cadd(total, value)
        out[k] = total
    return SymbolicTensor(kept_shape, tuple(out))


def permute_tensor(tensor: SymbolicTensor, perm: tuple[int, ...]) -> SymbolicTensor:
    """Pure index shuffle: no new scalar nodes are created."""
    if sorted(perm) != list(range(len(tensor.shape))):
        raise BadPermutationError(f"{perm} is not a permutation of the tensor axes")
    arr = tensor.as_object_array().transpose(perm)
    return SymbolicTensor.from_object_array(np.ascontiguousarray(arr))


def fuse_permutation(
    a: UnitaryExpression, shape: tuple[int, ...], perm: tuple[int, ...]
) -> UnitaryExpression:
    """Reshape the matrix into ``shape``, permute axes, and reshape back.

    The permuted element grid must still be square (its leading axes must
    multiply to the original dimension).
    """
    dim = a.dim
    if math.prod(shape) != dim * dim:
        raise BadPermutationError(
            f"shape {shape} does not factor the {dim}x{dim} element grid"
        )
    if len(perm) != len(shape) or sorted(perm) != list(range(len(shape))):
        raise BadPermutationError(f"{perm} is not a permutation of {len(shape)} axes")
    elems = tuple(c for row in a.body for c in row)
    permuted = permute_tensor(SymbolicTensor(shape, elems), perm)
    prefixes = {math.prod(permuted.shape[:k]) for k in range(len(shape) + 1)}
    if dim not in prefixes:
        raise BadPermutationError(
            f"permutation {perm} of {shape} does not yield a square matrix"
        )
    flat = permuted.elems
    body = tuple(
        tuple(flat[i * dim + j] for j in range(dim)) for i in range(dim)
    )
    return UnitaryExpression(
        name=f"{a.name}@{''.join(map(str, perm))}",
        radices=a.radices,
        params=a.params,
        body=body,
    )
