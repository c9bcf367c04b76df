"""The instantiation cost function and its analytical gradient."""

from __future__ import annotations

import numpy as np

from quditforge.errors import QuditforgeError


class DimensionMismatchError(QuditforgeError):
    pass


def _check_dims(u: np.ndarray, v: np.ndarray) -> None:
    if u.shape != v.shape or u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise DimensionMismatchError(
            f"operands must be equal square matrices, got {u.shape} and {v.shape}"
        )


def infidelity(u: np.ndarray, v: np.ndarray) -> float:
    """1 - |Tr(V†U)|/D: zero iff U matches V up to global phase."""
    _check_dims(u, v)
    d = u.shape[0]
    return 1.0 - abs(np.trace(v.conj().T @ u)) / d


def infidelity_gradient(u: np.ndarray, du: np.ndarray, v: np.ndarray) -> np.ndarray:
    """dL/dθ_k from the circuit gradient tensor du[k] = ∂U/∂θ_k.

    At |Tr(V†U)| = 0 the phase is undefined and the objective is locally
    flat in first order; the gradient is reported as zero there.
    """
    _check_dims(u, v)
    d = u.shape[0]
    vh = v.conj().T
    t = np.trace(vh @ u)
    mag = abs(t)
    count = du.shape[0]
    if mag == 0.0:
        return np.zeros(count)
    grad = np.empty(count)
    for k in range(count):
        grad[k] = -(t.conjugate() * np.trace(vh @ du[k])).real / (d * mag)
    return grad
