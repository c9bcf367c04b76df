import math

import numpy as np
import pytest

from quditforge.qgl import parse_definition
from quditforge.symbolic import (
    AxisMismatchError,
    BadPermutationError,
    DimensionMismatchError,
    UnknownParameterError,
    dagger,
    eval_reference,
    fuse_permutation,
    kron,
    lower,
    matmul,
    substitute,
    trace_indices,
)
from quditforge.symbolic.reference import eval_tensor
from quditforge.symbolic import scalar as sc

from conftest import U3_SOURCE


@pytest.fixture(scope="module")
def u3():
    return lower(parse_definition(U3_SOURCE))


@pytest.fixture(scope="module")
def identity2():
    return lower(parse_definition("I(){[[1,0],[0,1]]}"))


@pytest.fixture(scope="module")
def phase3():
    return lower(parse_definition("P3<3>(a){[[1,0,0],[0,e^(i*a),0],[0,0,e^(2*i*a)]]}"))


def test_matmul_identity_law(u3, identity2, rng):
    left = matmul(identity2, u3)
    point = rng.uniform(-np.pi, np.pi, 3)
    assert np.abs(eval_reference(left, point) - eval_reference(u3, point)).max() < 1e-12


def test_matmul_homomorphism(u3, rng):
    product = matmul(u3, u3)
    assert product.num_params == 6
    point = rng.uniform(-np.pi, np.pi, 6)
    expected = eval_reference(u3, point[:3]) @ eval_reference(u3, point[3:])
    assert np.abs(eval_reference(product, point) - expected).max() < 1e-12


def test_matmul_dimension_mismatch(u3, phase3):
    with pytest.raises(DimensionMismatchError):
        matmul(u3, phase3)


def test_kron_radices_and_homomorphism(u3, phase3, rng):
    product = kron(u3, phase3)
    assert product.radices == (2, 3)
    assert product.dim == 6
    point = rng.uniform(-np.pi, np.pi, 4)
    expected = np.kron(eval_reference(u3, point[:3]), eval_reference(phase3, point[3:]))
    assert np.abs(eval_reference(product, point) - expected).max() < 1e-12


def test_dagger_homomorphism(u3, rng):
    point = rng.uniform(-np.pi, np.pi, 3)
    expected = eval_reference(u3, point).conj().T
    assert np.abs(eval_reference(dagger(u3), point) - expected).max() < 1e-12


def test_params_concatenate_without_unification(u3):
    product = matmul(u3, u3)
    assert product.params == ("θ", "ϕ", "λ", "θ", "ϕ", "λ")


def test_substitute_to_x_gate(u3):
    bound = substitute(u3, {"ϕ": 0.0, "λ": math.pi})
    assert bound.params == ("θ",)
    got = eval_reference(bound, [math.pi])
    assert np.abs(got - np.array([[0, 1], [1, 0]])).max() < 1e-12


def test_substitute_by_index_with_expression(u3):
    # Tie λ to θ: U3(θ, ϕ, 2θ).
    bound = substitute(u3, {2: sc.mul(sc.const(2.0), sc.var(0))})
    assert bound.params == ("θ", "ϕ")
    theta, phi = 0.9, -0.4
    expected = eval_reference(u3, [theta, phi, 2 * theta])
    assert np.abs(eval_reference(bound, [theta, phi]) - expected).max() < 1e-12


def test_substitute_unknown_parameter(u3):
    with pytest.raises(UnknownParameterError):
        substitute(u3, {"nope": 1.0})
    with pytest.raises(UnknownParameterError):
        substitute(u3, {7: 1.0})


def test_shared_names_need_indices(u3):
    product = matmul(u3, u3)
    with pytest.raises(UnknownParameterError):
        substitute(product, {"θ": 0.0})
    bound = substitute(product, {0: 0.0, 3: 0.0})
    assert bound.num_params == 4


# -- traces -----------------------------------------------------------------


def test_full_trace_of_identity(identity2):
    traced = trace_indices(identity2, [(0, 1)])
    assert traced.shape == ()
    entry = traced.elems[0]
    assert entry.re.kind == sc.CONST and entry.re.value == 2.0
    assert sc.is_zero(entry.im)


def test_full_trace_of_u3_matches_reference(u3, rng):
    traced = trace_indices(u3, [(0, 1)])
    for _ in range(20):
        point = rng.uniform(-2 * np.pi, 2 * np.pi, 3)
        expected = np.trace(eval_reference(u3, point))
        got = eval_tensor(traced, point)[()]
        assert abs(got - expected) < 1e-12


def test_partial_trace(u3, phase3, rng):
    big = kron(u3, phase3)
    traced = trace_indices(big, [(1, 3)])  # trace out the qutrit
    point = rng.uniform(-np.pi, np.pi, 4)
    tensor = eval_reference(big, point).reshape(2, 3, 2, 3)
    expected = np.einsum("ibjb->ij", tensor)
    assert np.abs(eval_tensor(traced, point) - expected).max() < 1e-12


def test_trace_mismatched_radices(u3, phase3):
    big = kron(u3, phase3)
    with pytest.raises(AxisMismatchError):
        trace_indices(big, [(0, 1)])  # 2 vs 3


# -- permutations ------------------------------------------------------------


def test_identity_permutation(u3):
    same = fuse_permutation(u3, (2, 2), (0, 1))
    assert same.body == u3.body


def test_swap_conjugation_of_kron(u3, rng):
    rz = lower(parse_definition("RZ(t){[[e^(~i*t/2),0],[0,e^(i*t/2)]]}"))
    ab = kron(u3, rz)
    ba = kron(rz, u3)
    swapped = fuse_permutation(ab, (2, 2, 2, 2), (1, 0, 3, 2))
    point = rng.uniform(-np.pi, np.pi, 4)
    got = eval_reference(swapped, point)
    expected = eval_reference(ba, [point[3], point[0], point[1], point[2]])
    assert np.abs(got - expected).max() < 1e-12


def test_bad_permutation_length(u3):
    with pytest.raises(BadPermutationError):
        fuse_permutation(u3, (2, 2), (0, 1, 2))


def test_bad_permutation_shape(u3):
    with pytest.raises(BadPermutationError):
        fuse_permutation(u3, (2, 3), (0, 1))


def test_permutation_creates_no_new_nodes(u3):
    permuted = fuse_permutation(u3, (2, 2), (1, 0))
    before = {id(c.re) for row in u3.body for c in row}
    after = {id(c.re) for row in permuted.body for c in row}
    assert after == before  # pure relabeling


# -- reference evaluation ----------------------------------------------------


def test_u3_hadamard_point(u3):
    h = eval_reference(u3, [math.pi / 2, 0.0, math.pi])
    expected = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    assert np.abs(h - expected).max() < 1e-12


def test_u3_identity_point(u3):
    assert np.abs(eval_reference(u3, [0.0, 0.0, 0.0]) - np.eye(2)).max() == 0.0


def test_unitarity_of_shipped_gates(shipped_gates, rng):
    for name, gate in shipped_gates.items():
        for _ in range(10):
            point = rng.uniform(-np.pi, np.pi, gate.num_params)
            u = eval_reference(gate, point)
            err = np.abs(u.conj().T @ u - np.eye(gate.dim)).max()
            assert err < 1e-12, name
