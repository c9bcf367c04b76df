import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from quditforge.circuits.builders import build_benchmark
from quditforge.circuits.cache import ExpressionCache
from quditforge.circuits.library import (
    csum_gate,
    qutrit_phase_gate,
    rx_gate,
    ry_gate,
    rz_gate,
    rzz_gate,
    u2_gate,
    u3_gate,
)
from quditforge.tn.compiler import compile_network

U3_SOURCE = """
U3(θ, ϕ, λ) {
  [
    [cos(θ/2), ~e^(i*λ)*sin(θ/2)],
    [e^(i*ϕ)*sin(θ/2), e^(i*(ϕ + λ))*cos(θ/2)],
  ]
}
"""

BENCHMARK_KEYS = (("shallow", 2), ("deep", 2), ("shallow", 3), ("deep", 3))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def shipped_gates():
    """Every parameterized gate the library ships, by name."""
    return {
        "U3": u3_gate(),
        "U2": u2_gate(),
        "RX": rx_gate(),
        "RY": ry_gate(),
        "RZ": rz_gate(),
        "RZZ": rzz_gate(),
        "CSUM": csum_gate(),
        "QutritPhase": qutrit_phase_gate(),
    }


@pytest.fixture(scope="session")
def shared_cache():
    return ExpressionCache()


@pytest.fixture(scope="session")
def benchmark_circuits(shared_cache):
    """The four instantiation benchmarks, sharing one expression cache."""
    return {
        (kind, radix): build_benchmark(kind, radix, cache=shared_cache)
        for kind, radix in BENCHMARK_KEYS
    }


@pytest.fixture(scope="session")
def benchmark_programs(benchmark_circuits):
    return {
        key: compile_network(circuit)
        for key, circuit in benchmark_circuits.items()
    }
