import numpy as np
import pytest

from quditforge.egraph import CostModel, simplify_unitary
from quditforge.symbolic import differentiate, eval_gradient, eval_reference
from quditforge.symbolic import scalar as sc
from quditforge.symbolic.scalar import iter_nodes

EXPENSIVE = (sc.SIN, sc.COS, sc.EXP, sc.LN, sc.POW)


def input_expensive_count(scalars):
    return sum(1 for n in iter_nodes(scalars) if n.kind in EXPENSIVE)


def input_cost(scalars, model=None):
    model = model or CostModel()
    return sum(model.node_cost(n.kind) for n in iter_nodes(scalars))


@pytest.mark.parametrize("with_gradient", [False, True])
def test_simplified_gates_numerically_equal(shipped_gates, rng, with_gradient):
    for name, gate in shipped_gates.items():
        simplified, grad, _ = simplify_unitary(gate, with_gradient=with_gradient)
        reference_grad = differentiate(gate) if with_gradient else None
        for _ in range(25):
            point = rng.uniform(-2 * np.pi, 2 * np.pi, gate.num_params)
            err = np.abs(
                eval_reference(simplified, point) - eval_reference(gate, point)
            ).max()
            assert err < 1e-9, name
            if with_gradient and gate.num_params:
                gerr = np.abs(
                    eval_gradient(grad, point) - eval_gradient(reference_grad, point)
                ).max()
                assert gerr < 1e-9, name


def test_expensive_count_never_grows(shipped_gates):
    for name, gate in shipped_gates.items():
        gradient = differentiate(gate)
        scalars = gate.scalars() + gradient.scalars()
        _, _, dag = simplify_unitary(gate, with_gradient=True)
        assert dag.expensive_count() <= input_expensive_count(scalars), name


def test_simplified_cost_never_grows(shipped_gates):
    model = CostModel()
    for name, gate in shipped_gates.items():
        gradient = differentiate(gate)
        scalars = gate.scalars() + gradient.scalars()
        _, _, dag = simplify_unitary(gate, with_gradient=True)
        assert dag.cost(model) <= input_cost(scalars, model), name


def test_u3_sin_cos_families_shared(shipped_gates):
    """U3 with gradient shares the sin/cos families across all entries."""
    _, _, dag = simplify_unitary(shipped_gates["U3"], with_gradient=True)
    counts = dag.op_counts()
    trig = counts.get(sc.SIN, 0) + counts.get(sc.COS, 0)
    # Families: θ/2, ϕ, λ (the ϕ+λ family reduces to products of these).
    assert trig <= 6
    gradient = differentiate(shipped_gates["U3"])
    scalars = shipped_gates["U3"].scalars() + gradient.scalars()
    assert trig <= input_expensive_count(scalars)


def test_constant_gate_dag_is_pure_constants(shipped_gates):
    csum = shipped_gates["CSUM"]
    simplified, grad, dag = simplify_unitary(csum, with_gradient=False)
    assert grad is None
    assert all(node.op == sc.CONST for node in dag.nodes)
    nonzero = sum(
        1 for row in csum.body for c in row if not (sc.is_zero(c.re) and sc.is_zero(c.im))
    )
    assert dag.cost() <= 0.5 * nonzero * 2  # re and im slots per entry


def test_unitary_and_gradient_share_nodes(shipped_gates):
    """The gradient reuses the unitary's trig nodes instead of new ones."""
    u3 = shipped_gates["U3"]
    _, _, dag_joint = simplify_unitary(u3, with_gradient=True)
    _, _, dag_value = simplify_unitary(u3, with_gradient=False)
    joint = dag_joint.op_counts()
    value = dag_value.op_counts()
    assert joint.get(sc.SIN, 0) + joint.get(sc.COS, 0) <= (
        value.get(sc.SIN, 0) + value.get(sc.COS, 0) + 2
    )


def test_report_attached(shipped_gates):
    _, _, dag = simplify_unitary(shipped_gates["RX"], with_gradient=True)
    assert dag.report.stop in ("saturated", "iteration_limit", "node_limit", "time_limit")
    assert dag.report.iterations >= 1
