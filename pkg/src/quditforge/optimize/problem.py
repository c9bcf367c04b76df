"""Problem and result records plus their JSON interchange forms."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from quditforge.circuits.circuit import QuditCircuit
from quditforge.optimize.infidelity import DimensionMismatchError


@dataclass(frozen=True)
class LMConfig:
    mu0: float = 1e-3
    mu_increase: float = 10.0
    mu_decrease: float = 10.0
    max_iterations: int = 200
    step_norm_floor: float = 1e-12


@dataclass
class InstantiationProblem:
    circuit: QuditCircuit
    target: np.ndarray
    threshold: float = 1e-8
    lm: LMConfig = field(default_factory=LMConfig)
    starts: int = 8
    seed: int = 0
    parallel: bool = False

    def __post_init__(self):
        v = np.asarray(self.target, dtype=np.complex128)
        d = v.shape[0] if v.ndim == 2 else 0
        if v.ndim != 2 or v.shape != (d, d) or d != self.circuit.dim:
            raise DimensionMismatchError(
                f"target shape {v.shape} does not match circuit dimension {self.circuit.dim}"
            )
        if np.abs(v.conj().T @ v - np.eye(d)).max() > 1e-10:
            raise DimensionMismatchError("target matrix is not unitary")
        self.target = v


@dataclass
class InstantiationResult:
    success: bool
    params: np.ndarray
    infidelity: float
    iterations: int
    starts_used: int
    wall_time: float


def target_to_json(v: np.ndarray) -> str:
    return json.dumps(
        {"dim": v.shape[0], "re": v.real.tolist(), "im": v.imag.tolist()}
    )


def target_from_json(text: str) -> np.ndarray:
    doc = json.loads(text)
    v = np.asarray(doc["re"], dtype=np.float64) + 1j * np.asarray(
        doc["im"], dtype=np.float64
    )
    if v.shape != (doc["dim"], doc["dim"]):
        raise DimensionMismatchError("target JSON dim does not match matrix shape")
    return v


def result_to_json(result: InstantiationResult) -> str:
    return json.dumps(
        {
            "success": result.success,
            "params": [float(x) for x in result.params],
            "infidelity": result.infidelity,
            "iterations": result.iterations,
            "starts_used": result.starts_used,
            "wall_time": result.wall_time,
        }
    )


def result_from_json(text: str) -> InstantiationResult:
    doc = json.loads(text)
    return InstantiationResult(
        success=doc["success"],
        params=np.asarray(doc["params"], dtype=np.float64),
        infidelity=doc["infidelity"],
        iterations=doc["iterations"],
        starts_used=doc["starts_used"],
        wall_time=doc["wall_time"],
    )
