"""Numerical instantiation: fit circuit parameters to a target unitary.

The objective is the infidelity 1 - |Tr(V†U(θ))|/D, minimized with a
Levenberg-Marquardt solver over phase-aligned entrywise residuals, with
multi-start and early exit on the first success.
"""

from quditforge.optimize.infidelity import (
    DimensionMismatchError,
    infidelity,
    infidelity_gradient,
)
from quditforge.optimize.lm import lm_minimize
from quditforge.optimize.multistart import multi_start_instantiate
from quditforge.optimize.problem import (
    InstantiationProblem,
    InstantiationResult,
    LMConfig,
    result_from_json,
    result_to_json,
    target_from_json,
    target_to_json,
)

__all__ = [
    "DimensionMismatchError",
    "InstantiationProblem",
    "InstantiationResult",
    "LMConfig",
    "infidelity",
    "infidelity_gradient",
    "lm_minimize",
    "multi_start_instantiate",
    "result_from_json",
    "result_to_json",
    "target_from_json",
    "target_to_json",
]
