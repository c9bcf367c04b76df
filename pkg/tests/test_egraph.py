import numpy as np
import pytest

from quditforge.egraph import (
    CostModel,
    MissingRootError,
    SaturationLimits,
    default_rules,
    extract_shared,
    saturate,
)
from quditforge.egraph.extract import _Extractor
from quditforge.symbolic import scalar as sc
from quditforge.symbolic.scalar import (
    add,
    cos,
    div,
    eval_scalar,
    mul,
    raw_node,
    sin,
    var,
)


def test_tangent_form_class_collects_equivalents():
    expr = div(sin(var(0)), cos(var(0)))
    graph = saturate([expr], default_rules())
    assert graph.report.stop == "saturated"
    root = graph.find(graph.roots[0])
    forms = [n for n, cid in graph.hashcons.items() if graph.find(cid) == root]
    assert len(forms) >= 2
    dag = extract_shared(graph, graph.roots)
    point = [1.3]
    got = eval_scalar(dag.to_scalar(dag.roots[0]), point)
    assert got == pytest.approx(np.tan(1.3), abs=1e-12)


def test_bare_variable_saturates_immediately():
    graph = saturate([var(0)], default_rules())
    assert graph.report.stop == "saturated"
    assert graph.report.iterations <= 2
    assert graph.node_count == 1


def test_node_limit_fires():
    # Nested angle sums blow up under expansion rules.
    expr = sin(var(0))
    for k in range(1, 6):
        expr = sin(add(expr, var(k % 3)))
    limits = SaturationLimits(max_iterations=30, max_nodes=100, time_budget_s=10.0)
    graph = saturate([expr], default_rules(), limits)
    assert graph.report.stop == "node_limit"


def test_iteration_limit_reported():
    expr = sin(add(var(0), var(1)))
    limits = SaturationLimits(max_iterations=1, max_nodes=50_000, time_budget_s=10.0)
    graph = saturate([expr], default_rules(), limits)
    assert graph.report.stop in ("iteration_limit", "saturated")
    assert graph.report.iterations <= 1


def test_extraction_of_raw_add_zero():
    # Built raw so the smart constructors cannot pre-fold it.
    expr = raw_node(sc.ADD, (var(0), raw_node(sc.CONST, value=0.0)))
    graph = saturate([expr], default_rules())
    dag = extract_shared(graph, graph.roots)
    root = dag.nodes[dag.roots[0]]
    assert root.op == sc.VAR
    assert dag.cost() == 0.0


def test_u2_exponential_family_case_study():
    """The canonical shared-extraction example: three exponentials.

    With cos λ, sin λ, cos ϕ, sin ϕ extracted first (and zeroed), the
    angle-sum family for ϕ+λ extracts as products of the cached four
    rather than as fresh trigonometric nodes.
    """
    lam, phi = var(0), var(1)
    roots = [
        cos(lam),
        sin(lam),
        cos(phi),
        sin(phi),
        cos(add(phi, lam)),
        sin(add(phi, lam)),
    ]
    graph = saturate(roots, default_rules())
    dag = extract_shared(graph, graph.roots)
    trig = [n for n in dag.nodes if n.op in (sc.SIN, sc.COS)]
    assert len(trig) == 4
    # The ϕ+λ roots are arithmetic over the four cached nodes.
    cached = {dag.roots[k] for k in range(4)}
    for k in (4, 5):
        stack = [dag.roots[k]]
        while stack:
            idx = stack.pop()
            node = dag.nodes[idx]
            if idx in cached:
                continue
            assert node.op in (sc.ADD, sc.SUB, sc.MUL, sc.NEG), node
            stack.extend(node.children)


def test_shared_subexpression_reused():
    roots = [sin(var(0)), mul(sin(var(0)), cos(var(0)))]
    graph = saturate(roots, default_rules())
    dag = extract_shared(graph, graph.roots)
    standalone_sizes = 2 + 4  # sin(a) has 2 nodes; sin(a)*cos(a) has 4
    assert len(dag.nodes) < standalone_sizes
    # The sin node feeding both roots is literally the same DAG entry.
    sin_nodes = [k for k, n in enumerate(dag.nodes) if n.op == sc.SIN]
    assert len(sin_nodes) == 1


def test_missing_root_raises():
    graph = saturate([var(0)], default_rules())
    with pytest.raises(MissingRootError):
        extract_shared(graph, [999])


def test_stabilized_costs_non_increasing_across_rounds():
    lam, phi = var(0), var(1)
    roots = [cos(lam), sin(lam), cos(phi), sin(phi), cos(add(phi, lam))]
    graph = saturate(roots, default_rules())
    extractor = _Extractor(graph, CostModel())
    extractor.stabilize()
    watched = [graph.find(r) for r in graph.roots]
    previous = {cid: extractor.cost[cid] for cid in watched}
    for root in graph.roots:
        _, touched = extractor.materialize(graph.find(root))
        dirty = set()
        for cid in touched:
            dirty |= extractor.parents.get(cid, set())
        extractor.stabilize(dirty)
        for cid in watched:
            assert extractor.cost[cid] <= previous[cid] + 1e-12
            previous[cid] = extractor.cost[cid]


def test_extraction_soundness_fuzz(rng):
    """Extracted forms equal the originals at 100 random points."""
    x, y = var(0), var(1)
    roots = [
        mul(sin(add(x, y)), cos(x)),
        add(mul(sin(x), sin(x)), mul(cos(x), cos(x))),
        div(sin(y), cos(y)),
    ]
    graph = saturate(roots, default_rules())
    dag = extract_shared(graph, graph.roots)
    memo = {}
    trees = [dag.to_scalar(dag.roots[k], memo) for k in range(len(roots))]
    for _ in range(100):
        point = rng.uniform(-2 * np.pi, 2 * np.pi, 2)
        for orig, tree in zip(roots, trees):
            assert abs(eval_scalar(orig, point) - eval_scalar(tree, point)) < 1e-9


def test_cost_model_defaults():
    model = CostModel()
    assert model.node_cost(sc.PI) == 0.0
    assert model.node_cost(sc.VAR) == 0.0
    assert model.node_cost(sc.CONST) == 0.5
    assert model.node_cost(sc.NEG) == 1.0
    assert model.node_cost(sc.ADD) == 1.0
    assert model.node_cost(sc.SUB) == 1.0
    assert model.node_cost(sc.MUL) == 5.0
    assert model.node_cost(sc.DIV) == 5.0
    assert model.node_cost(sc.SQRT) == 50.0
    assert model.node_cost(sc.SIN) == 50.0
    assert model.node_cost(sc.COS) == 50.0
    assert model.node_cost(sc.EXP) == 100.0
    assert model.node_cost(sc.LN) == 100.0
    assert model.node_cost(sc.POW) == 100.0
