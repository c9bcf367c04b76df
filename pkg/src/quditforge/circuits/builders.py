"""Builders for the standard benchmark circuits."""

from __future__ import annotations

import math
import random

from quditforge.circuits.circuit import QuditCircuit
from quditforge.circuits.library import (
    cnot_gate,
    controlled_phase_gate,
    csum_gate,
    hadamard_gate,
    qutrit_phase_gate,
    rx_gate,
    rz_gate,
    rzz_gate,
    swap_gate,
    u3_gate,
)


def build_qft(n: int, cache=None) -> QuditCircuit:
    """Quantum Fourier transform on n qubits, including the final swaps.

    Wire 0 is the most significant digit; with the swaps included the
    circuit unitary equals the DFT matrix exactly.
    """
    circuit = QuditCircuit([2] * n, cache=cache)
    h = circuit.cache_operation(hadamard_gate())
    cp = circuit.cache_operation(controlled_phase_gate())
    swap = circuit.cache_operation(swap_gate())
    for i in range(n):
        circuit.append_ref(h, (i,), ())
        for j in range(i + 1, n):
            angle = 2.0 * math.pi / (1 << (j - i + 1))
            circuit.append_ref_constant(cp, (j, i), (angle,))
    for i in range(n // 2):
        circuit.append_ref(swap, (i, n - 1 - i), ())
    return circuit


def build_dtc(n: int, seed: int = 0, cache=None) -> QuditCircuit:
    """Discrete-time-crystal simulation circuit: n rounds of RX/RZZ/RZ.

    The RX angle is the fixed 0.95*pi kick; RZZ and RZ angles are random
    constants drawn from the seeded generator.
    """
    rng = random.Random(seed)
    circuit = QuditCircuit([2] * n, cache=cache)
    rx = circuit.cache_operation(rx_gate())
    rzz = circuit.cache_operation(rzz_gate())
    rz = circuit.cache_operation(rz_gate())
    kick = 0.95 * math.pi
    for _ in range(n):
        for i in range(n):
            circuit.append_ref_constant(rx, (i,), (kick,))
        for i in range(n - 1):
            circuit.append_ref_constant(rzz, (i, i + 1), (rng.uniform(-math.pi, math.pi),))
        for i in range(n):
            circuit.append_ref_constant(rz, (i,), (rng.uniform(-math.pi, math.pi),))
    return circuit


def build_benchmark(
    kind: str, radix: int = 2, depth: int | None = None, cache=None
) -> QuditCircuit:
    """Three-qudit instantiation benchmark ansatz.

    A parameterized single-qudit layer on all wires, then per step one
    entangling gate on a neighboring pair followed by single-qudit gates
    on the two touched wires. ``shallow`` uses 3 entangling steps,
    ``deep`` 12. The qubit version uses CNOT + U3, the qutrit version
    CSUM + the 8-parameter qutrit gate.
    """
    if kind not in ("shallow", "deep"):
        raise ValueError(f"unknown benchmark kind {kind!r}")
    if radix not in (2, 3):
        raise ValueError(f"benchmark radix must be 2 or 3, got {radix}")
    if depth is None:
        depth = 3 if kind == "shallow" else 12
    n = 3
    circuit = QuditCircuit([radix] * n, cache=cache)
    if radix == 2:
        single = circuit.cache_operation(u3_gate())
        entangler = circuit.cache_operation(cnot_gate())
    else:
        single = circuit.cache_operation(qutrit_phase_gate())
        entangler = circuit.cache_operation(csum_gate())
    for i in range(n):
        circuit.append_ref(single, (i,))
    for step in range(depth):
        a = step % (n - 1)
        circuit.append_ref(entangler, (a, a + 1), ())
        circuit.append_ref(single, (a,))
        circuit.append_ref(single, (a + 1,))
    return circuit
