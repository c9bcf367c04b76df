import numpy as np
import pytest

from quditforge.qgl import parse_definition
from quditforge.symbolic import (
    differentiate,
    eval_gradient,
    eval_reference,
    lower,
)
from quditforge.symbolic import scalar as sc

from conftest import U3_SOURCE
from oracle import fd_gradient


def u3_listing_gradient(point):
    """Hand-derived U3 gradient used as the parity oracle."""
    theta, phi, lam = point
    ct, st = np.cos(theta / 2), np.sin(theta / 2)
    el, ep = np.exp(1j * lam), np.exp(1j * phi)
    del_, dep_ = 1j * el, 1j * ep
    return np.array(
        [
            [[-0.5 * st, -0.5 * ct * el], [0.5 * ct * ep, -0.5 * st * el * ep]],
            [[0, 0], [st * dep_, ct * el * dep_]],
            [[0, -st * del_], [0, ct * ep * del_]],
        ]
    )


@pytest.fixture(scope="module")
def u3():
    return lower(parse_definition(U3_SOURCE))


def test_theta_derivative_of_element_00(u3):
    grad = differentiate(u3)
    # d/dθ cos(θ/2) = -0.5 sin(θ/2)
    for theta in (0.0, 0.7, 2.1, -1.3):
        got = eval_gradient(grad, [theta, 0.4, 0.9])[0, 0, 0]
        assert got == pytest.approx(-0.5 * np.sin(theta / 2), abs=1e-15)


def test_phi_derivative_of_element_00_is_zero(u3):
    grad = differentiate(u3)
    entry = grad.grids[1][0][0]
    assert sc.is_zero(entry.re) and sc.is_zero(entry.im)


def test_constant_gate_gradient_is_zero():
    gate = lower(parse_definition("G(x){[[1,0],[0,1]]}"))
    grad = differentiate(gate)
    tensor = eval_gradient(grad, [0.7])
    assert np.abs(tensor).max() == 0.0


def test_u3_gradient_matches_hand_derived(u3, rng):
    grad = differentiate(u3)
    for _ in range(100):
        point = rng.uniform(-2 * np.pi, 2 * np.pi, 3)
        got = eval_gradient(grad, point)
        assert np.abs(got - u3_listing_gradient(point)).max() < 1e-12


def test_gradient_matches_finite_differences(u3, rng):
    grad = differentiate(u3)
    point = rng.uniform(-np.pi, np.pi, 3)
    fd = fd_gradient(lambda p: eval_reference(u3, p), point)
    got = eval_gradient(grad, point)
    assert np.abs(got - fd).max() / max(np.abs(fd).max(), 1.0) < 1e-6


def test_differentiation_soundness_all_gates(shipped_gates, rng):
    """Analytical gradients match central finite differences on every gate."""
    for name, gate in shipped_gates.items():
        if gate.num_params == 0:
            continue
        grad = differentiate(gate)
        point = rng.uniform(-np.pi, np.pi, gate.num_params)
        fd = fd_gradient(lambda p: eval_reference(gate, p), point)
        got = eval_gradient(grad, point)
        scale = max(np.abs(fd).max(), 1.0)
        assert np.abs(got - fd).max() / scale < 1e-5, name


def test_quotient_and_chain_rules():
    gate = lower(parse_definition("G(x){[[tan(x/2),0],[0,1]]}"))
    grad = differentiate(gate)
    x = 0.73
    got = eval_gradient(grad, [x])[0, 0, 0].real
    assert got == pytest.approx(0.5 / np.cos(x / 2) ** 2, rel=1e-12)


def test_sqrt_and_pow_rules():
    gate = lower(parse_definition("G(x){[[sqrt(x)*x^3,0],[0,1]]}"))
    grad = differentiate(gate)
    x = 1.9
    got = eval_gradient(grad, [x])[0, 0, 0].real
    assert got == pytest.approx(3.5 * x**2.5, rel=1e-12)
