"""Contraction-tree planning: TTGT scheduling and leaf fusions.

Each internal node is scheduled as transpose-transpose-GEMM(-transpose):
operands are permuted so contracted indices sit adjacent (a suffix of the
first operand, a prefix of the second), the product runs as one dense
matrix multiply, and the result's index order is simply declared to be
the concatenation of the free index lists, deferring the closing
transpose to whichever consumer actually needs a different order. When
the operand needing a permutation is a leaf, the permutation is pushed
into the gate's symbolic expression instead of becoming an instruction;
likewise any repeated leg on a single leaf is traced symbolically, so the
bytecode needs neither trace nor leaf-transpose operations. A pair of
operands sharing only batch indices contracts element-wise (Hadamard).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import math

from quditforge.circuits.circuit import Binding, FreeVar, QuditCircuit
from quditforge.symbolic.unitary import (
    MatrixExpression,
    SymbolicTensor,
    permute_tensor,
    tensor_view,
    trace_indices,
)
from quditforge.tn.network import TensorNetwork, TensorNode
from quditforge.tn.path import PathNode, contraction_flops


@dataclass
class ContractionTree:
    """A planned node: a leaf expression or a scheduled pairwise contraction."""

    kind: str  # "leaf" | "matmul" | "kron" | "hadamard"
    indices: tuple[int, ...]  # result index order
    split: int  # row/col boundary within `indices`
    deps: frozenset[int]
    flops: float = 0.0
    # leaf fields
    expr: MatrixExpression | None = None
    bindings: tuple[Binding, ...] = ()
    # internal fields
    left: "ContractionTree | None" = None
    right: "ContractionTree | None" = None
    # (shape, perm) pre-transposes for operands that are internal results
    pre_left: tuple[tuple[int, ...], tuple[int, ...]] | None = None
    pre_right: tuple[tuple[int, ...], tuple[int, ...]] | None = None

    def rows(self, dims) -> int:
        return math.prod(dims[i] for i in self.indices[: self.split])

    def cols(self, dims) -> int:
        return math.prod(dims[i] for i in self.indices[self.split :])

    def total_flops(self) -> float:
        if self.kind == "leaf":
            return 0.0
        return self.flops + self.left.total_flops() + self.right.total_flops()


def _leaf_tree(net: TensorNetwork, node: TensorNode, cache) -> ContractionTree:
    expr = cache.expr(node.ref)
    legs = list(node.indices)
    seen: dict[int, int] = {}
    pairs = []
    for axis, leg in enumerate(legs):
        if leg in seen:
            pairs.append((seen[leg], axis))
        else:
            seen[leg] = axis
    if pairs:
        tensor = trace_indices(expr, pairs)
        traced_axes = {a for p in pairs for a in p}
        remaining = [leg for axis, leg in enumerate(legs) if axis not in traced_axes]
        out_side = sum(
            1 for axis in range(node.out_count) if axis not in traced_axes
        )
    else:
        tensor = tensor_view(expr)
        remaining = legs
        out_side = node.out_count
    matrix = _tensor_to_matrix(tensor, out_side, expr.name, expr.num_params)
    return ContractionTree(
        kind="leaf",
        indices=tuple(remaining),
        split=out_side,
        deps=node.deps(),
        expr=matrix,
        bindings=node.bindings,
    )


def _tensor_to_matrix(
    tensor: SymbolicTensor, split: int, name: str, num_params: int
) -> MatrixExpression:
    rows = math.prod(tensor.shape[:split])
    cols = math.prod(tensor.shape[split:])
    grid = tuple(
        tuple(tensor.elems[r * cols + c] for c in range(cols)) for r in range(rows)
    )
    return MatrixExpression(
        name=name, rows=rows, cols=cols, num_params=num_params, body=grid
    )


def _fuse_leaf_permutation(leaf: ContractionTree, order: tuple[int, ...], dims) -> None:
    """Reorder a leaf's legs by permuting its symbolic expression in place."""
    if order == leaf.indices:
        return
    perm = tuple(leaf.indices.index(i) for i in order)
    shape = tuple(dims[i] for i in leaf.indices)
    elems = tuple(c for row in leaf.expr.body for c in row)
    permuted = permute_tensor(SymbolicTensor(shape, elems), perm)
    split = leaf.split
    leaf.indices = order
    leaf.expr = _tensor_to_matrix(
        permuted, split, leaf.expr.name + ".p", leaf.expr.num_params
    )


def _require_order(
    child: ContractionTree, order: tuple[int, ...], split: int, dims
) -> tuple[ContractionTree, tuple | None]:
    """Make a child present `order` with `split`, fusing or transposing."""
    if child.kind == "leaf":
        if order != child.indices:
            _fuse_leaf_permutation(child, order, dims)
        if child.split != split:
            child.split = split
            child.expr = _reshape_matrix(child.expr, order, split, dims)
        return child, None
    if order == child.indices:
        # A pure reshape: the buffer is read with the needed split directly.
        return child, None
    shape = tuple(dims[i] for i in child.indices)
    perm = tuple(child.indices.index(i) for i in order)
    rows = math.prod(dims[i] for i in order[:split])
    cols = math.prod(dims[i] for i in order[split:])
    return child, (shape, perm, rows, cols)


def _reshape_matrix(expr: MatrixExpression, order, split, dims) -> MatrixExpression:
    rows = math.prod(dims[i] for i in order[:split])
    cols = math.prod(dims[i] for i in order[split:])
    flat = tuple(c for row in expr.body for c in row)
    grid = tuple(
        tuple(flat[r * cols + c] for c in range(cols)) for r in range(rows)
    )
    return MatrixExpression(
        name=expr.name, rows=rows, cols=cols, num_params=expr.num_params, body=grid
    )


def _plan_contraction(
    left: ContractionTree, right: ContractionTree, net: TensorNetwork
) -> ContractionTree:
    dims = net.dims
    shared = frozenset(left.indices) & frozenset(right.indices)
    contracted = shared - net.batch
    deps = left.deps | right.deps
    flops = contraction_flops(
        frozenset(left.indices), frozenset(right.indices), dims
    )

    if not contracted:
        if shared and set(left.indices) == set(right.indices):
            # Element-wise product over batch indices.
            order = left.indices
            right2, pre_right = _require_order(right, order, left.split, dims)
            return ContractionTree(
                kind="hadamard",
                indices=order,
                split=left.split,
                deps=deps,
                flops=flops,
                left=left,
                right=right2,
                pre_right=pre_right,
            )
        # Outer product: a Kronecker product of the two operand matrices.
        order = (
            left.indices[: left.split]
            + right.indices[: right.split]
            + left.indices[left.split :]
            + right.indices[right.split :]
        )
        return ContractionTree(
            kind="kron",
            indices=order,
            split=left.split + right.split,
            deps=deps,
            flops=flops,
            left=left,
            right=right,
        )

    # General case: schedule as a single GEMM. Try both operand roles and
    # both contracted-index orders; prefer the plan with the fewest runtime
    # transposes (leaf permutations are fused and free).
    candidates = []
    for a, b in ((left, right), (right, left)):
        for k_source in (a, b):
            k_order = tuple(i for i in k_source.indices if i in contracted)
            free_a = tuple(i for i in a.indices if i not in contracted)
            free_b = tuple(i for i in b.indices if i not in contracted)
            order_a = free_a + k_order
            order_b = k_order + free_b
            # Runtime transposes cost far more than fusing a permutation
            # into a leaf expression, which only perturbs cache sharing.
            cost = 0
            if order_a != a.indices:
                cost += 1 if a.kind == "leaf" else 10
            if order_b != b.indices:
                cost += 1 if b.kind == "leaf" else 10
            candidates.append((cost, a is right, k_source is b, a, b, order_a, order_b))
    cost, _, _, a, b, order_a, order_b = min(candidates, key=lambda c: (c[0], c[1], c[2]))
    free_a = tuple(i for i in order_a if i not in contracted)
    free_b = tuple(i for i in order_b if i not in contracted)
    a2, pre_a = _require_order(a, order_a, len(free_a), dims)
    b2, pre_b = _require_order(b, order_b, len(contracted), dims)
    return ContractionTree(
        kind="matmul",
        indices=free_a + free_b,
        split=len(free_a),
        deps=deps,
        flops=flops,
        left=a2,
        right=b2,
        pre_left=pre_a,
        pre_right=pre_b,
    )


def optimize_tree(
    path: PathNode, net: TensorNetwork, circuit: QuditCircuit
) -> tuple[ContractionTree, tuple | None]:
    """Plan the whole tree; returns (tree, final transpose spec or None).

    The final transpose orders the open indices into wire order (outputs
    then inputs) and views the result as the D x D circuit matrix.
    """

    def plan(node: PathNode) -> ContractionTree:
        if node.leaf is not None:
            return _leaf_tree(net, net.nodes[node.leaf], circuit.cache)
        return _plan_contraction(plan(node.left), plan(node.right), net)

    tree = plan(path)
    target = net.open_out + net.open_in
    final = None
    n = len(net.radices)
    if tree.indices != target or tree.split != n:
        if tree.kind == "leaf":
            _fuse_leaf_permutation(tree, target, net.dims)
            tree.split = n
            tree.expr = _reshape_matrix(tree.expr, target, n, net.dims)
        elif tree.indices != target:
            shape = tuple(net.dims[i] for i in tree.indices)
            perm = tuple(tree.indices.index(i) for i in target)
            final = (shape, perm)
    return tree, final
