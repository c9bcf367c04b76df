"""Contraction-order search.

Networks of up to 7 tensors get an exhaustive dynamic program over
bipartitions, which is flop-optimal; larger networks use a greedy
heuristic that repeatedly contracts the cheapest pair. The flop model for
a pairwise contraction is 8 * prod(dims of the union of the two index
sets) -- the constant is a complex multiply-add weighting and is
irrelevant to the ordering.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from quditforge.tn.network import TensorNetwork

_OPTIMAL_MAX = 7


@dataclass
class PathNode:
    """Binary contraction order; leaves hold network node positions."""

    leaf: int | None
    left: "PathNode | None"
    right: "PathNode | None"
    indices: frozenset[int]
    flops: float  # cost of this node's contraction (0 at leaves)
    total_flops: float

    @staticmethod
    def make_leaf(pos: int, indices: frozenset[int]) -> "PathNode":
        return PathNode(pos, None, None, indices, 0.0, 0.0)

    def leaves(self) -> list[int]:
        if self.leaf is not None:
            return [self.leaf]
        return self.left.leaves() + self.right.leaves()


def _leaf_indices(net: TensorNetwork, pos: int) -> frozenset[int]:
    # Repeated legs on one tensor are traced away symbolically, so they
    # are internal to the leaf and invisible to the path search.
    legs = net.nodes[pos].indices
    return frozenset(i for i in legs if legs.count(i) == 1)


def _result_indices(
    a: frozenset[int], b: frozenset[int], keep: frozenset[int]
) -> frozenset[int]:
    return (a ^ b) | (a & b & keep)


def _size(indices, dims) -> float:
    return math.prod(dims[i] for i in indices)


def contraction_flops(a: frozenset[int], b: frozenset[int], dims) -> float:
    return 8.0 * _size(a | b, dims)


def find_path(net: TensorNetwork) -> PathNode:
    leaves = [PathNode.make_leaf(k, _leaf_indices(net, k)) for k in range(len(net.nodes))]
    if len(leaves) == 1:
        return leaves[0]
    if len(leaves) <= _OPTIMAL_MAX:
        return _optimal_path(net, leaves)
    return _greedy_path(net, leaves)


def _optimal_path(net: TensorNetwork, leaves: list[PathNode]) -> PathNode:
    keep = net.open_indices()
    dims = net.dims
    n = len(leaves)
    best: dict[int, PathNode] = {1 << k: leaves[k] for k in range(n)}
    for mask in sorted(range(1, 1 << n), key=lambda m: m.bit_count()):
        if mask.bit_count() < 2:
            continue
        low = mask & -mask
        winner = None
        # Enumerate bipartitions; fix the lowest leaf on the left side.
        sub = (mask - 1) & mask
        while sub:
            if sub & low:
                other = mask ^ sub
                left, right = best[sub], best[other]
                flops = contraction_flops(left.indices, right.indices, dims)
                total = left.total_flops + right.total_flops + flops
                if winner is None or total < winner.total_flops:
                    winner = PathNode(
                        None,
                        left,
                        right,
                        _result_indices(left.indices, right.indices, keep),
                        flops,
                        total,
                    )
            sub = (sub - 1) & mask
        best[mask] = winner
    return best[(1 << n) - 1]


def _greedy_path(net: TensorNetwork, leaves: list[PathNode]) -> PathNode:
    keep = net.open_indices()
    dims = net.dims
    active: list[tuple[int, PathNode]] = list(enumerate(leaves))  # (creation id, node)
    counter = len(leaves)
    while len(active) > 1:
        pairs = [
            (pa, pb)
            for pa, pb in itertools.combinations(range(len(active)), 2)
            if active[pa][1].indices & active[pb][1].indices
        ]
        if not pairs:  # disconnected remainder: outer products
            pairs = list(itertools.combinations(range(len(active)), 2))
        best_key = None
        best_pair = None
        for pa, pb in pairs:
            ca, na = active[pa]
            cb, nb = active[pb]
            flops = contraction_flops(na.indices, nb.indices, dims)
            out = _result_indices(na.indices, nb.indices, keep)
            key = (flops, _size(out, dims), min(ca, cb), max(ca, cb))
            if best_key is None or key < best_key:
                best_key = key
                best_pair = (pa, pb)
        pa, pb = best_pair
        ca, na = active[pa]
        cb, nb = active[pb]
        flops = contraction_flops(na.indices, nb.indices, dims)
        node = PathNode(
            None,
            na,
            nb,
            _result_indices(na.indices, nb.indices, keep),
            flops,
            na.total_flops + nb.total_flops + flops,
        )
        del active[pb]
        del active[pa]
        active.append((counter, node))
        counter += 1
    return active[0][1]


def brute_force_min_flops(net: TensorNetwork) -> float:
    """Minimum total flops over every contraction order (test oracle).

    Exponential; intended for networks of at most ~6 tensors.
    """
    keep = net.open_indices()
    dims = net.dims

    def go(tensors: tuple[frozenset[int], ...]) -> float:
        if len(tensors) == 1:
            return 0.0
        best = math.inf
        for a, b in itertools.combinations(range(len(tensors)), 2):
            flops = contraction_flops(tensors[a], tensors[b], dims)
            merged = _result_indices(tensors[a], tensors[b], keep)
            rest = tuple(
                t for k, t in enumerate(tensors) if k not in (a, b)
            ) + (merged,)
            best = min(best, flops + go(rest))
        return best

    return go(tuple(_leaf_indices(net, k) for k in range(len(net.nodes))))
