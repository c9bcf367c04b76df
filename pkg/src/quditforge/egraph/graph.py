"""A small e-graph with hash-consing, congruence rebuilding, and a
constant-value analysis.

E-nodes reuse the scalar IR's kind tags. Each e-class may carry a known
constant value; values propagate upward during rebuilds and let constant
subexpressions match literal patterns without materializing them.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import NamedTuple

from quditforge.symbolic import scalar as sc
from quditforge.symbolic.scalar import ScalarExpr


class ENode(NamedTuple):
    op: str
    children: tuple[int, ...]
    value: float | int | None  # Const value or Var index


_EVAL = {
    sc.ADD: lambda a, b: a + b,
    sc.SUB: lambda a, b: a - b,
    sc.MUL: lambda a, b: a * b,
    sc.DIV: lambda a, b: a / b,
    sc.POW: math.pow,
    sc.NEG: lambda a: -a,
    sc.SIN: math.sin,
    sc.COS: math.cos,
    sc.EXP: math.exp,
    sc.LN: math.log,
    sc.SQRT: math.sqrt,
}


@dataclass
class SaturationLimits:
    """Safeguards against saturation blow-up."""

    max_iterations: int = 30
    max_nodes: int = 50_000
    time_budget_s: float = 2.0


@dataclass
class SaturationReport:
    iterations: int = 0
    enodes: int = 0
    stop: str = "saturated"  # saturated | iteration_limit | node_limit | time_limit


class EGraph:
    def __init__(self):
        self._parent: list[int] = []
        self.hashcons: dict[ENode, int] = {}
        self.const_val: dict[int, float] = {}
        self.roots: list[int] = []
        self.report: SaturationReport | None = None

    # -- union-find ----------------------------------------------------
    def _fresh(self) -> int:
        cid = len(self._parent)
        self._parent.append(cid)
        return cid

    def find(self, cid: int) -> int:
        root = cid
        while self._parent[root] != root:
            root = self._parent[root]
        while self._parent[cid] != root:
            self._parent[cid], cid = root, self._parent[cid]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        # Keep the lower id canonical for determinism.
        if rb < ra:
            ra, rb = rb, ra
        self._parent[rb] = ra
        va, vb = self.const_val.get(ra), self.const_val.get(rb)
        if va is None and vb is not None:
            self.const_val[ra] = vb
        return True

    # -- nodes ---------------------------------------------------------
    def canonicalize(self, node: ENode) -> ENode:
        return ENode(node.op, tuple(self.find(c) for c in node.children), node.value)

    def add(self, op: str, children: tuple[int, ...] = (), value=None) -> int:
        node = ENode(op, tuple(self.find(c) for c in children), value)
        cid = self.hashcons.get(node)
        if cid is not None:
            return self.find(cid)
        cid = self._fresh()
        self.hashcons[node] = cid
        val = self._fold(node)
        if val is not None:
            self.const_val[cid] = val
        return cid

    def _fold(self, node: ENode) -> float | None:
        if node.op == sc.CONST:
            return float(node.value)
        if node.op == sc.PI:
            return math.pi
        if node.op == sc.VAR:
            return None
        args = []
        for child in node.children:
            v = self.const_val.get(self.find(child))
            if v is None:
                return None
            args.append(v)
        try:
            v = _EVAL[node.op](*args)
        except (ValueError, ZeroDivisionError, OverflowError):
            return None
        return v if math.isfinite(v) else None

    def add_expr(self, expr: ScalarExpr) -> int:
        memo: dict[int, int] = {}

        def go(e: ScalarExpr) -> int:
            hit = memo.get(id(e))
            if hit is not None:
                return hit
            cid = self.add(e.kind, tuple(go(a) for a in e.args), e.value)
            memo[id(e)] = cid
            return cid

        return go(expr)

    @property
    def node_count(self) -> int:
        return len(self.hashcons)

    def classes(self) -> dict[int, list[ENode]]:
        """Canonical class id -> canonical e-nodes, deterministically ordered."""
        grouped: dict[int, list[ENode]] = {}
        for node, cid in self.hashcons.items():
            grouped.setdefault(self.find(cid), []).append(self.canonicalize(node))
        for nodes in grouped.values():
            nodes.sort(key=lambda n: (n.op, n.children, repr(n.value)))
        return grouped

    def get_const(self, cid: int) -> float | None:
        return self.const_val.get(self.find(cid))

    def rebuild(self) -> None:
        """Restore hash-consing and congruence after unions."""
        while True:
            new_hash: dict[ENode, int] = {}
            pending: list[tuple[int, int]] = []
            for node, cid in self.hashcons.items():
                canon = self.canonicalize(node)
                root = self.find(cid)
                prev = new_hash.get(canon)
                if prev is None:
                    new_hash[canon] = root
                elif self.find(prev) != root:
                    pending.append((prev, root))
            self.hashcons = new_hash
            # Propagate the constant analysis until stable.
            folded = True
            while folded:
                folded = False
                for node, cid in self.hashcons.items():
                    root = self.find(cid)
                    if root in self.const_val:
                        continue
                    v = self._fold(node)
                    if v is not None:
                        self.const_val[root] = v
                        folded = True
            if not pending:
                return
            for a, b in pending:
                self.union(a, b)


def saturate(exprs, rules, limits: SaturationLimits | None = None) -> EGraph:
    """Insert the expressions and run equality saturation within limits.

    The returned e-graph carries ``roots`` (one class id per input, in
    order) and a ``report`` stating which stop condition fired.
    """
    from quditforge.egraph.pattern import instantiate, match_rule

    if limits is None:
        limits = SaturationLimits()
    graph = EGraph()
    graph.roots = [graph.add_expr(e) for e in exprs]
    report = SaturationReport()
    start = time.monotonic()
    stop = "iteration_limit"
    for iteration in range(limits.max_iterations):
        if graph.node_count > limits.max_nodes:
            stop = "node_limit"
            break
        if time.monotonic() - start > limits.time_budget_s:
            stop = "time_limit"
            break
        before_nodes = graph.node_count
        matches = []
        snapshot = graph.classes()
        # Root-op index: a rule's left-hand side only matches e-nodes with
        # the same head, so skip everything else up front.
        index: dict[str, list[tuple[int, ENode]]] = {}
        for cid, nodes in snapshot.items():
            for node in nodes:
                index.setdefault(node.op, []).append((cid, node))
        for rule in rules:
            for cid, subst in match_rule(graph, snapshot, index, rule):
                matches.append((rule, cid, subst))
        changed = False
        hit_node_limit = False
        for rule, cid, subst in matches:
            if rule.guard is not None and not rule.guard(graph, subst):
                continue
            rhs_cid = instantiate(graph, rule.rhs, subst)
            if graph.union(cid, rhs_cid):
                changed = True
            if graph.node_count > limits.max_nodes:
                hit_node_limit = True
                break
        graph.rebuild()
        report.iterations = iteration + 1
        if hit_node_limit:
            stop = "node_limit"
            break
        if not changed and graph.node_count == before_nodes:
            stop = "saturated"
            break
    report.enodes = graph.node_count
    report.stop = stop
    graph.report = report
    return graph
