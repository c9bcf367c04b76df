"""Whole-gate simplification: unitary and gradient scalars share one e-graph."""

from __future__ import annotations

from functools import lru_cache
from pathlib import Path

from quditforge.egraph.cost import CostModel
from quditforge.egraph.extract import SharedDag, extract_shared
from quditforge.egraph.graph import SaturationLimits, saturate
from quditforge.egraph.pattern import Rule, load_rules
from quditforge.symbolic.scalar import ComplexScalar, ScalarExpr, differentiate_scalar
from quditforge.symbolic.unitary import (
    GradientExpression,
    MatrixExpression,
    UnitaryExpression,
    differentiate,
)

_RULES_PATH = Path(__file__).parent / "rules.qgl"


@lru_cache(maxsize=1)
def default_rules() -> tuple[Rule, ...]:
    return tuple(load_rules(_RULES_PATH.read_text(encoding="utf-8")))


def simplify_scalars(
    exprs: list[ScalarExpr],
    rules=None,
    limits: SaturationLimits | None = None,
    cost: CostModel | None = None,
) -> SharedDag:
    """Saturate and extract a set of scalars into one shared DAG.

    Structurally identical inputs are inserted once; ``dag.slot_roots[k]``
    is the DAG node for input position ``k``.
    """
    rules = default_rules() if rules is None else rules
    unique: list[ScalarExpr] = []
    position_of: dict[int, int] = {}
    slots: list[int] = []
    for expr in exprs:
        pos = position_of.get(id(expr))
        if pos is None:
            pos = len(unique)
            position_of[id(expr)] = pos
            unique.append(expr)
        slots.append(pos)
    graph = saturate(unique, rules, limits)
    dag = extract_shared(graph, graph.roots, cost)
    dag.slot_roots = [dag.roots[pos] for pos in slots]
    dag.report = graph.report
    return dag


def _rebuild_grid(dag: SharedDag, slot_iter, dim: int, memo: dict):
    grid = []
    for _ in range(dim):
        row = []
        for _ in range(dim):
            re = dag.to_scalar(next(slot_iter), memo)
            im = dag.to_scalar(next(slot_iter), memo)
            row.append(ComplexScalar(re, im))
        grid.append(tuple(row))
    return tuple(grid)


def matrix_slots(expr: MatrixExpression, with_gradient: bool) -> list[ScalarExpr]:
    """Flat slot list for compilation: value re/im pairs, then per-parameter
    gradient pairs in the same row-major order."""
    slots = expr.scalars()
    if with_gradient:
        for k in range(expr.num_params):
            memo: dict = {}
            for row in expr.body:
                for c in row:
                    slots.append(differentiate_scalar(c.re, k, memo))
                    slots.append(differentiate_scalar(c.im, k, memo))
    return slots


def simplify_matrix(
    expr: MatrixExpression,
    with_gradient: bool,
    rules=None,
    limits: SaturationLimits | None = None,
    cost: CostModel | None = None,
) -> SharedDag:
    """Simplify a matrix expression (and its gradient) into one shared DAG."""
    return simplify_scalars(matrix_slots(expr, with_gradient), rules, limits, cost)


def simplify_unitary(
    u: UnitaryExpression,
    with_gradient: bool = True,
    rules=None,
    limits: SaturationLimits | None = None,
    cost: CostModel | None = None,
) -> tuple[UnitaryExpression, GradientExpression | None, SharedDag]:
    """Simplify a gate's unitary (and optionally its gradient) together.

    All real/imaginary scalars go into one e-graph so the extracted forms
    share subexpressions across the matrix and its derivative.
    """
    gradient = differentiate(u) if with_gradient else None
    exprs = u.scalars()
    if gradient is not None:
        exprs = exprs + gradient.scalars()
    dag = simplify_scalars(exprs, rules, limits, cost)
    memo: dict = {}
    slot_iter = iter(dag.slot_roots)
    body = _rebuild_grid(dag, slot_iter, u.dim, memo)
    simplified = UnitaryExpression(
        name=u.name, radices=u.radices, params=u.params, body=body
    )
    grad = None
    if gradient is not None:
        grids = tuple(
            _rebuild_grid(dag, slot_iter, u.dim, memo) for _ in range(u.num_params)
        )
        grad = GradientExpression(params=u.params, grids=grids)
    return simplified, grad, dag
