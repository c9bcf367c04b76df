"""Multi-start instantiation with shared compilation and early exit."""

from __future__ import annotations

import threading
import time

import numpy as np

from quditforge.optimize.lm import lm_minimize
from quditforge.optimize.problem import InstantiationProblem, InstantiationResult
from quditforge.tn.compiler import compile_network
from quditforge.vm.tnvm import TNVM


def _draw_starts(problem: InstantiationProblem) -> np.ndarray:
    rng = np.random.default_rng(problem.seed)
    return rng.uniform(
        -np.pi, np.pi, size=(problem.starts, problem.circuit.num_params)
    )


def multi_start_instantiate(
    problem: InstantiationProblem, program=None
) -> InstantiationResult:
    """Run up to ``starts`` LM solves, stopping at the first success.

    Compilation and VM initialization happen once and are shared by every
    start. The parallel mode runs starts on threads with independent VMs
    over the same frozen caches; a shared flag cancels stragglers once a
    solution is found.
    """
    t0 = time.monotonic()
    if program is None:
        program = compile_network(problem.circuit)
    starts = _draw_starts(problem)
    if problem.parallel and problem.starts > 1:
        outcome = _parallel_starts(problem, program, starts)
    else:
        outcome = _sequential_starts(problem, program, starts)
    best_params, best_loss, iterations, used = outcome
    return InstantiationResult(
        success=bool(best_loss <= problem.threshold),
        params=best_params,
        infidelity=float(best_loss),
        iterations=int(iterations),
        starts_used=int(used),
        wall_time=time.monotonic() - t0,
    )


def _sequential_starts(problem, program, starts):
    vm = TNVM(program, problem.circuit.cache, diff="gradient")
    best_params = starts[0].copy()
    best_loss = np.inf
    iterations = 0
    used = 0
    for start in starts:
        used += 1
        params, loss, iters = lm_minimize(problem, start, vm=vm)
        iterations += iters
        if loss < best_loss:
            best_loss = loss
            best_params = params
        if best_loss <= problem.threshold:
            break
    return best_params, best_loss, iterations, used


def _parallel_starts(problem, program, starts):
    found = threading.Event()
    results: list[tuple[np.ndarray, float, int] | None] = [None] * len(starts)

    def worker(k: int) -> None:
        vm = TNVM(program, problem.circuit.cache, diff="gradient")
        params, loss, iters = lm_minimize(
            problem, starts[k], vm=vm, should_stop=found.is_set
        )
        results[k] = (params, loss, iters)
        if loss <= problem.threshold:
            found.set()

    threads = [
        threading.Thread(target=worker, args=(k,)) for k in range(len(starts))
    ]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    best_params, best_loss, iterations = starts[0].copy(), np.inf, 0
    used = 0
    for outcome in results:
        if outcome is None:
            continue
        used += 1
        params, loss, iters = outcome
        iterations += iters
        if loss < best_loss:
            best_loss = loss
            best_params = params
    return best_params, best_loss, iterations, used
