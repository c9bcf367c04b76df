"""Standard gates, all defined through QGL sources or composition."""

from __future__ import annotations

from dataclasses import replace
from functools import lru_cache

from quditforge.qgl.parser import parse_definition
from quditforge.symbolic.lowering import lower
from quditforge.symbolic.unitary import UnitaryExpression, matmul


def gate_from_source(source: str) -> UnitaryExpression:
    """Parse, check, and lower a QGL definition."""
    return lower(parse_definition(source))


U3_SOURCE = """
U3(θ, ϕ, λ) {
  [
    [cos(θ/2), ~e^(i*λ)*sin(θ/2)],
    [e^(i*ϕ)*sin(θ/2), e^(i*(ϕ + λ))*cos(θ/2)],
  ]
}
"""

U2_SOURCE = """
U2(ϕ, λ) {
  (1/sqrt(2)) * [
    [1, ~e^(i*λ)],
    [e^(i*ϕ), e^(i*(ϕ + λ))],
  ]
}
"""

RX_SOURCE = """
RX(theta) {
  [[cos(theta/2), ~i*sin(theta/2)],
   [~i*sin(theta/2), cos(theta/2)]]
}
"""

RY_SOURCE = """
RY(theta) {
  [[cos(theta/2), ~sin(theta/2)],
   [sin(theta/2), cos(theta/2)]]
}
"""

RZ_SOURCE = """
RZ(theta) {
  [[e^(~i*theta/2), 0],
   [0, e^(i*theta/2)]]
}
"""

RZZ_SOURCE = """
RZZ(theta) {
   [[e^(~i*theta/2), 0, 0, 0],
    [0, e^(i*theta/2), 0, 0],
    [0, 0, e^(i*theta/2), 0],
    [0, 0, 0, e^(~i*theta/2)]]
}
"""

HADAMARD_SOURCE = """
H() {
  (1/sqrt(2)) * [[1, 1], [1, ~1]]
}
"""

CNOT_SOURCE = """
CNOT() {
  [[1, 0, 0, 0],
   [0, 1, 0, 0],
   [0, 0, 0, 1],
   [0, 0, 1, 0]]
}
"""

SWAP_SOURCE = """
SWAP() {
  [[1, 0, 0, 0],
   [0, 0, 1, 0],
   [0, 1, 0, 0],
   [0, 0, 0, 1]]
}
"""

CPHASE_SOURCE = """
CP(theta) {
  [[1, 0, 0, 0],
   [0, 1, 0, 0],
   [0, 0, 1, 0],
   [0, 0, 0, e^(i*theta)]]
}
"""

# Embedded two-level rotations and a phase layer for the qutrit gate.
_E01_SOURCE = """
E01<3>(θ, ϕ, λ) {
  [
    [cos(θ/2), ~e^(i*λ)*sin(θ/2), 0],
    [e^(i*ϕ)*sin(θ/2), e^(i*(ϕ + λ))*cos(θ/2), 0],
    [0, 0, 1],
  ]
}
"""

_E12_SOURCE = """
E12<3>(θ, ϕ, λ) {
  [
    [1, 0, 0],
    [0, cos(θ/2), ~e^(i*λ)*sin(θ/2)],
    [0, e^(i*ϕ)*sin(θ/2), e^(i*(ϕ + λ))*cos(θ/2)],
  ]
}
"""

_PH3_SOURCE = """
PH3<3>(a, b) {
  [
    [e^(i*a), 0, 0],
    [0, e^(i*b), 0],
    [0, 0, 1],
  ]
}
"""


def _csum_source() -> str:
    """CSUM on a qutrit pair: |c, t> -> |c, (c + t) mod 3>."""
    rows = []
    for r in range(9):
        entries = []
        for c in range(9):
            ctrl, tgt = divmod(c, 3)
            entries.append("1" if r == ctrl * 3 + (ctrl + tgt) % 3 else "0")
        rows.append("[" + ", ".join(entries) + "]")
    return "CSUM<3, 3>() { [" + ", ".join(rows) + "] }"


@lru_cache(maxsize=None)
def u3_gate() -> UnitaryExpression:
    return gate_from_source(U3_SOURCE)


@lru_cache(maxsize=None)
def u2_gate() -> UnitaryExpression:
    return gate_from_source(U2_SOURCE)


@lru_cache(maxsize=None)
def rx_gate() -> UnitaryExpression:
    return gate_from_source(RX_SOURCE)


@lru_cache(maxsize=None)
def ry_gate() -> UnitaryExpression:
    return gate_from_source(RY_SOURCE)


@lru_cache(maxsize=None)
def rz_gate() -> UnitaryExpression:
    return gate_from_source(RZ_SOURCE)


@lru_cache(maxsize=None)
def rzz_gate() -> UnitaryExpression:
    return gate_from_source(RZZ_SOURCE)


@lru_cache(maxsize=None)
def hadamard_gate() -> UnitaryExpression:
    return gate_from_source(HADAMARD_SOURCE)


@lru_cache(maxsize=None)
def cnot_gate() -> UnitaryExpression:
    return gate_from_source(CNOT_SOURCE)


@lru_cache(maxsize=None)
def swap_gate() -> UnitaryExpression:
    return gate_from_source(SWAP_SOURCE)


@lru_cache(maxsize=None)
def controlled_phase_gate() -> UnitaryExpression:
    return gate_from_source(CPHASE_SOURCE)


@lru_cache(maxsize=None)
def csum_gate() -> UnitaryExpression:
    return gate_from_source(_csum_source())


@lru_cache(maxsize=None)
def qutrit_phase_gate() -> UnitaryExpression:
    """An 8-parameter single-qutrit gate: two embedded rotations and phases.

    Built by symbolic composition; the parameter lists concatenate, so the
    result has eight dense positional parameters.
    """
    composed = matmul(
        matmul(gate_from_source(_E01_SOURCE), gate_from_source(_E12_SOURCE)),
        gate_from_source(_PH3_SOURCE),
    )
    names = tuple(f"p{k}" for k in range(composed.num_params))
    return replace(composed, name="QutritPhase", params=names)
