"""The tensor network virtual machine.

Initialization allocates one arena for every buffer (plus gradient slabs
and scratch), compiles or fetches the flat register programs for every
expression, runs the constant section once, and specializes each dynamic
instruction for the requested differentiation mode. After that, evaluate
is a straight walk over prebound kernels with no allocation and no
compilation.
"""

from quditforge.vm.exprprog import ExprProgram, compile_expression
from quditforge.vm.tnvm import (
    TNVM,
    ArityMismatchError,
    EvaluationResult,
    ShapeMismatchError,
    UnsupportedNodeError,
)

__all__ = [
    "ArityMismatchError",
    "EvaluationResult",
    "ExprProgram",
    "ShapeMismatchError",
    "TNVM",
    "UnsupportedNodeError",
    "compile_expression",
]
