"""Independent numeric oracles used across the test suite.

Everything here deliberately avoids the tensor-network compiler and the
VM: circuits are evaluated as a naive left-to-right dense product of
embedded gate matrices via the symbolic reference evaluator, and ASTs are
evaluated by a direct complex tree walk.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from quditforge.circuits.circuit import FreeVar, QuditCircuit
from quditforge.qgl.ast import AstExpr, BinaryOp, Call, Const, Matrix, Neg, Var
from quditforge.symbolic.reference import eval_reference


def embed_gate(gate: np.ndarray, qudits, radices) -> np.ndarray:
    """Embed a gate acting on `qudits` into the full Hilbert space."""
    n = len(radices)
    dim = math.prod(radices)
    others = [w for w in range(n) if w not in qudits]
    order = list(qudits) + others
    rest = dim // math.prod(radices[q] for q in qudits)
    full = np.kron(gate, np.eye(rest))
    shape = [radices[w] for w in order] * 2
    perm = [order.index(w) for w in range(n)]
    return (
        full.reshape(shape)
        .transpose(perm + [n + p for p in perm])
        .reshape(dim, dim)
    )


def circuit_unitary(circuit: QuditCircuit, params) -> np.ndarray:
    """Naive dense product of gate matrices, later gates on the left."""
    u = np.eye(circuit.dim, dtype=complex)
    for op in circuit.ops:
        expr = circuit.cache.expr(op.ref)
        local = [
            params[b.index] if isinstance(b, FreeVar) else b.value
            for b in op.bindings
        ]
        gate = eval_reference(expr, local)
        u = embed_gate(gate, op.qudits, circuit.radices) @ u
    return u


def circuit_gradient_fd(circuit: QuditCircuit, params, h: float = 1e-6) -> np.ndarray:
    """Central finite differences of the naive circuit unitary."""
    params = np.asarray(params, dtype=float)
    grads = np.empty((params.size, circuit.dim, circuit.dim), dtype=complex)
    for k in range(params.size):
        up, um = params.copy(), params.copy()
        up[k] += h
        um[k] -= h
        grads[k] = (circuit_unitary(circuit, up) - circuit_unitary(circuit, um)) / (
            2 * h
        )
    return grads


def fd_gradient(fn, params, h: float = 1e-6) -> np.ndarray:
    """Central finite differences of an arbitrary matrix-valued function."""
    params = np.asarray(params, dtype=float)
    probe = np.asarray(fn(params))
    grads = np.empty((params.size, *probe.shape), dtype=complex)
    for k in range(params.size):
        up, um = params.copy(), params.copy()
        up[k] += h
        um[k] -= h
        grads[k] = (np.asarray(fn(up)) - np.asarray(fn(um))) / (2 * h)
    return grads


def eval_ast_complex(expr: AstExpr, env: dict[str, float]):
    """Direct complex tree walk of an AST; matrices become numpy arrays."""
    if isinstance(expr, Const):
        return complex(expr.value)
    if isinstance(expr, Var):
        if expr.name == "i":
            return 1j
        if expr.name == "e":
            return complex(math.e)
        if expr.name in ("pi", "π"):
            return complex(math.pi)
        return complex(env[expr.name])
    if isinstance(expr, Neg):
        return -eval_ast_complex(expr.operand, env)
    if isinstance(expr, Call):
        arg = eval_ast_complex(expr.arg, env)
        fn = {
            "sin": cmath.sin,
            "cos": cmath.cos,
            "tan": cmath.tan,
            "exp": cmath.exp,
            "ln": cmath.log,
            "sqrt": cmath.sqrt,
        }[expr.func]
        return fn(arg)
    if isinstance(expr, Matrix):
        return np.array(
            [[eval_ast_complex(entry, env) for entry in row] for row in expr.rows]
        )
    if isinstance(expr, BinaryOp):
        left = eval_ast_complex(expr.left, env)
        right = eval_ast_complex(expr.right, env)
        if expr.op == "+":
            return left + right
        if expr.op == "-":
            return left - right
        if expr.op == "*":
            if isinstance(left, np.ndarray) and isinstance(right, np.ndarray):
                return left @ right
            return left * right
        if expr.op == "/":
            return left / right
        if isinstance(left, np.ndarray):
            return np.linalg.matrix_power(left, int(right.real))
        return left**right
    raise TypeError(f"unknown AST node {expr!r}")
