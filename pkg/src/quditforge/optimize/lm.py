"""A plain Levenberg-Marquardt solver over TNVM values and gradients.

Residuals are the real and imaginary parts of U(θ) - e^{iα}V, where the
global phase α = arg Tr(V†U) is recomputed at every accepted step and
held fixed within a step's Jacobian. Minimizing the squared residual norm
is equivalent to minimizing the infidelity: |r|² = 2D·L(θ) at the
aligning phase.
"""

from __future__ import annotations

import numpy as np

from quditforge.optimize.infidelity import infidelity
from quditforge.optimize.problem import InstantiationProblem, LMConfig


def _phase_aligned_target(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    t = np.trace(v.conj().T @ u)
    if t == 0:
        return v
    return (t / abs(t)) * v


def lm_minimize(
    problem: InstantiationProblem,
    start,
    vm=None,
    should_stop=None,
    history: list | None = None,
) -> tuple[np.ndarray, float, int]:
    """Minimize the infidelity from one start point.

    Returns (best params, best infidelity, iterations). A gradient-mode
    TNVM is built on demand when ``vm`` is not supplied; multi-start
    passes a shared one. ``should_stop`` is polled between iterations so
    parallel multi-starts can cancel cooperatively; ``history``, if given,
    collects the accepted-step infidelity sequence.
    """
    if vm is None:
        from quditforge.tn.compiler import compile_network
        from quditforge.vm.tnvm import TNVM

        vm = TNVM(compile_network(problem.circuit), problem.circuit.cache)
    config = problem.lm
    target = problem.target
    threshold = problem.threshold
    params = np.asarray(start, dtype=np.float64).copy()
    result = vm.evaluate(params)
    u = result.unitary.copy()
    du = result.gradient.copy()
    loss = infidelity(u, target)
    if history is not None:
        history.append(loss)
    best_params = params.copy()
    best_loss = loss
    mu = config.mu0
    iterations = 0
    count = params.size

    while loss > threshold and iterations < config.max_iterations:
        if should_stop is not None and should_stop():
            break
        aligned = _phase_aligned_target(u, target)
        r = np.concatenate(((u - aligned).real.ravel(), (u - aligned).imag.ravel()))
        flat = du.reshape(count, -1)
        jac = np.concatenate((flat.real.T, flat.imag.T))
        jtj = jac.T @ jac
        jtr = jac.T @ r
        diag = np.diag(jtj).copy()
        diag[diag < 1e-12] = 1e-12
        iterations += 1
        try:
            step = np.linalg.solve(jtj + mu * np.diag(diag), -jtr)
        except np.linalg.LinAlgError:
            mu *= config.mu_increase
            continue
        if np.linalg.norm(step) < config.step_norm_floor:
            break
        trial = params + step
        trial_result = vm.evaluate(trial)
        trial_loss = infidelity(trial_result.unitary, target)
        if trial_loss < loss:
            params = trial
            loss = trial_loss
            u = trial_result.unitary.copy()
            du = trial_result.gradient.copy()
            mu /= config.mu_decrease
            if history is not None:
                history.append(loss)
            if loss < best_loss:
                best_loss = loss
                best_params = params.copy()
        else:
            mu *= config.mu_increase
    return best_params, float(best_loss), iterations
