"""Complex element-wise symbolic IR for gate matrices.

A gate is a grid of complex scalars, each held as separate real and
imaginary expression trees over positional parameters. The IR supports
analytical differentiation, a composition algebra (matmul, kron, dagger,
substitution, traces, axis permutations), and a slow reference evaluator
used as the numeric oracle by every later stage.
"""

from quditforge.symbolic.errors import (
    AxisMismatchError,
    BadPermutationError,
    DimensionMismatchError,
    UnknownParameterError,
    UnsupportedComplexFormError,
)
from quditforge.symbolic.lowering import lower
from quditforge.symbolic.scalar import ScalarExpr, ComplexScalar
from quditforge.symbolic.unitary import (
    GradientExpression,
    SymbolicTensor,
    UnitaryExpression,
    dagger,
    differentiate,
    fuse_permutation,
    kron,
    matmul,
    substitute,
    trace_indices,
)
from quditforge.symbolic.reference import eval_gradient, eval_reference

__all__ = [
    "AxisMismatchError",
    "BadPermutationError",
    "ComplexScalar",
    "DimensionMismatchError",
    "GradientExpression",
    "ScalarExpr",
    "SymbolicTensor",
    "UnitaryExpression",
    "UnknownParameterError",
    "UnsupportedComplexFormError",
    "dagger",
    "differentiate",
    "eval_gradient",
    "eval_reference",
    "fuse_permutation",
    "kron",
    "lower",
    "matmul",
    "substitute",
    "trace_indices",
]
