"""Greedy bottom-up shared extraction from a saturated e-graph.

Extraction runs in rounds. Costs are first stabilized to a fixed point
(each class costs its cheapest e-node plus its children's class costs).
The cheapest remaining root is then materialized, and every class it
traverses has its cost set to zero on the spot, so the next rounds reuse
already-built subexpressions for the price of a reference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from quditforge.errors import QuditforgeError
from quditforge.egraph.cost import CostModel
from quditforge.egraph.graph import EGraph, ENode
from quditforge.symbolic import scalar as sc
from quditforge.symbolic.scalar import ScalarExpr

_INF = math.inf


class MissingRootError(QuditforgeError):
    pass


@dataclass(frozen=True)
class DagNode:
    op: str
    children: tuple[int, ...]
    value: float | int | None = None


@dataclass
class SharedDag:
    """Topologically ordered nodes with explicit reuse, plus root handles."""

    nodes: list[DagNode] = field(default_factory=list)
    roots: dict[int, int] = field(default_factory=dict)  # input position -> node

    def op_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for node in self.nodes:
            counts[node.op] = counts.get(node.op, 0) + 1
        return counts

    def expensive_count(self) -> int:
        """Number of sin/cos/exp/ln/pow nodes in the DAG."""
        ops = (sc.SIN, sc.COS, sc.EXP, sc.LN, sc.POW)
        return sum(1 for node in self.nodes if node.op in ops)

    def cost(self, model: CostModel | None = None) -> float:
        model = model or CostModel()
        return sum(model.node_cost(node.op) for node in self.nodes)

    def to_scalar(self, index: int, memo: dict | None = None) -> ScalarExpr:
        """Materialize one root (or any node) as a scalar expression tree."""
        if memo is None:
            memo = {}
        hit = memo.get(index)
        if hit is not None:
            return hit
        node = self.nodes[index]
        if node.op == sc.VAR:
            out = sc.var(node.value)
        elif node.op == sc.CONST:
            out = sc.const(node.value)
        elif node.op == sc.PI:
            out = sc.PI_NODE
        else:
            args = tuple(self.to_scalar(c, memo) for c in node.children)
            out = sc.raw_node(node.op, args)
        memo[index] = out
        return out


_KIND_ORDER = {
    kind: i
    for i, kind in enumerate(
        (
            sc.PI,
            sc.VAR,
            sc.CONST,
            sc.NEG,
            sc.ADD,
            sc.SUB,
            sc.MUL,
            sc.DIV,
            sc.SQRT,
            sc.SIN,
            sc.COS,
            sc.EXP,
            sc.LN,
            sc.POW,
        )
    )
}


class _Extractor:
    def __init__(self, graph: EGraph, model: CostModel):
        self.graph = graph
        self.model = model
        self.classes = graph.classes()
        # Candidate lists per class; a known constant value adds a virtual
        # Const candidate even when no literal node exists yet.
        self.candidates: dict[int, list[ENode]] = {}
        self.parents: dict[int, set[int]] = {}
        for cid, nodes in self.classes.items():
            cands = list(nodes)
            const = graph.get_const(cid)
            if const is not None and not any(n.op == sc.CONST for n in cands):
                cands.append(ENode(sc.CONST, (), const))
            self.candidates[cid] = cands
            for node in cands:
                for child in node.children:
                    self.parents.setdefault(child, set()).add(cid)
        self.cost: dict[int, float] = {cid: _INF for cid in self.candidates}
        self.size: dict[int, float] = {cid: _INF for cid in self.candidates}
        self.choice: dict[int, ENode] = {}
        self.zeroed: dict[int, int] = {}  # class -> dag node index
        self.dag_nodes: list[DagNode] = []
        self.dag_index: dict[DagNode, int] = {}

    def _recompute(self, cid: int) -> bool:
        """Refresh one class's best candidate; True if its cost/size moved."""
        best = None
        cost_of = self.cost
        size_of = self.size
        for node in self.candidates[cid]:
            cost = self.model.node_cost(node.op)
            size = 1.0
            dead = False
            for child in node.children:
                ccost = cost_of.get(child, _INF)
                if ccost == _INF:
                    dead = True
                    break
                cost += ccost
                size += size_of[child]
            if dead:
                continue
            key = (cost, size, _KIND_ORDER[node.op], node.children, repr(node.value))
            if best is None or key < best[0]:
                best = (key, node)
        if best is None:
            return False
        (cost, size, *_), node = best
        self.choice[cid] = node
        if cid in self.zeroed:
            cost = 0.0
            size = 0.0
        if cost != self.cost[cid] or size != self.size[cid]:
            self.cost[cid] = cost
            self.size[cid] = size
            return True
        return False

    def stabilize(self, seeds=None) -> None:
        """Fixed-point of class costs, propagated through parent links."""
        queue = set(self.candidates if seeds is None else seeds)
        while queue:
            cid = queue.pop()
            if self._recompute(cid):
                queue |= self.parents.get(cid, set())

    def materialize(self, cid: int) -> tuple[int, set[int]]:
        """Build the DAG for one class; returns (node index, classes touched)."""
        touched: set[int] = set()

        def go(cid: int) -> int:
            cid = self.graph.find(cid)
            hit = self.zeroed.get(cid)
            if hit is not None:
                return hit
            node = self.choice[cid]
            children = tuple(go(c) for c in node.children)
            dag_node = DagNode(node.op, children, node.value)
            index = self.dag_index.get(dag_node)
            if index is None:
                index = len(self.dag_nodes)
                self.dag_nodes.append(dag_node)
                self.dag_index[dag_node] = index
            self.zeroed[cid] = index
            self.cost[cid] = 0.0
            self.size[cid] = 0.0
            touched.add(cid)
            return index

        return go(cid), touched


def extract_shared(graph: EGraph, roots: list[int], cost: CostModel | None = None) -> SharedDag:
    """Extract every root, cheapest first, sharing across extractions."""
    model = cost or CostModel()
    extractor = _Extractor(graph, model)
    for root in roots:
        if (
            not 0 <= root < len(graph._parent)
            or graph.find(root) not in extractor.candidates
        ):
            raise MissingRootError(f"class {root} is not in the e-graph")
    extractor.stabilize()
    dag = SharedDag()
    remaining = list(range(len(roots)))
    while remaining:
        best = min(
            remaining, key=lambda k: (extractor.cost[graph.find(roots[k])], k)
        )
        remaining.remove(best)
        dag.roots[best], touched = extractor.materialize(graph.find(roots[best]))
        dirty: set[int] = set()
        for cid in touched:
            dirty |= extractor.parents.get(cid, set())
        extractor.stabilize(dirty)
    dag.nodes = extractor.dag_nodes
    return dag
