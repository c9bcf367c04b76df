"""Parameterized qudit circuits with expression caching.

Gates are cached once per circuit and appended by integer reference, so
building even very large circuits costs O(1) per placement. Parameters
bind either to circuit-level free variables or to constants.
"""

from quditforge.circuits.cache import CacheEntry, ExpressionCache
from quditforge.circuits.circuit import (
    CircuitOp,
    Constant,
    FreeVar,
    QuditCircuit,
    circuit_from_json,
    circuit_to_json,
)
from quditforge.circuits.errors import (
    ArityMismatchError,
    BadRadixError,
    FrozenCircuitError,
    LocationOutOfRangeError,
    RadixMismatchError,
    UnknownRefError,
)
from quditforge.circuits.library import (
    cnot_gate,
    controlled_phase_gate,
    csum_gate,
    gate_from_source,
    hadamard_gate,
    qutrit_phase_gate,
    rx_gate,
    ry_gate,
    rz_gate,
    rzz_gate,
    swap_gate,
    u2_gate,
    u3_gate,
)
from quditforge.circuits.builders import build_benchmark, build_dtc, build_qft

__all__ = [
    "ArityMismatchError",
    "BadRadixError",
    "CacheEntry",
    "CircuitOp",
    "Constant",
    "ExpressionCache",
    "FreeVar",
    "FrozenCircuitError",
    "LocationOutOfRangeError",
    "QuditCircuit",
    "RadixMismatchError",
    "UnknownRefError",
    "build_benchmark",
    "build_dtc",
    "build_qft",
    "circuit_from_json",
    "circuit_to_json",
    "cnot_gate",
    "controlled_phase_gate",
    "csum_gate",
    "gate_from_source",
    "hadamard_gate",
    "qutrit_phase_gate",
    "rx_gate",
    "ry_gate",
    "rz_gate",
    "rzz_gate",
    "swap_gate",
    "u2_gate",
    "u3_gate",
]
