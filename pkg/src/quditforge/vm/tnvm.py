"""Arena-backed executor for tensor-network bytecode.

All memory is one contiguous allocation sized at construction: buffer
values, per-parameter partial slabs for gradient mode, and scratch for
product-rule accumulation. Dynamic instructions are specialized once into
closures over prebound numpy views; evaluate() walks that list and
allocates nothing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from quditforge.circuits.cache import ExpressionCache
from quditforge.circuits.circuit import Constant, FreeVar
from quditforge.egraph.graph import SaturationLimits
from quditforge.egraph.simplify import simplify_matrix
from quditforge.errors import QuditforgeError
from quditforge.tn.program import (
    CONST_SECTION,
    Hadamard,
    Kron,
    MatMul,
    TnProgram,
    Transpose,
    Write,
)
from quditforge.vm.exprprog import ExprProgram, compile_expression
from quditforge.vm.exprprog import UnsupportedNodeError  # re-exported


class ShapeMismatchError(QuditforgeError):
    pass


class ArityMismatchError(QuditforgeError):
    pass


@dataclass
class EvaluationResult:
    """Views into the arena; contents are valid until the next evaluate."""

    unitary: np.ndarray
    gradient: np.ndarray | None


_DTYPES = {"f64": np.complex128, "f32": np.complex64}

# Compilation must be deterministic, so the node budget (checked at exact
# counts) is set low enough to bind long before the wall-clock valve on
# any reasonable machine. The generous time cap remains as a safety net.
PIPELINE_LIMITS = SaturationLimits(
    max_iterations=30, max_nodes=8_000, time_budget_s=30.0
)


def _build_value_program(expr) -> ExprProgram:
    dag = simplify_matrix(expr, with_gradient=False, limits=PIPELINE_LIMITS)
    layout = [(0, k) for k in range(expr.rows * expr.cols)]
    return compile_expression(dag, layout)


def _build_grad_program(expr) -> ExprProgram:
    dag = simplify_matrix(expr, with_gradient=True, limits=PIPELINE_LIMITS)
    size = expr.rows * expr.cols
    layout = [(0, k) for k in range(size)]
    for p in range(expr.num_params):
        layout.extend((1 + p, k) for k in range(size))
    return compile_expression(dag, layout)


class TNVM:
    """Executes a TnProgram for one precision and differentiation level."""

    def __init__(
        self,
        program: TnProgram,
        cache: ExpressionCache | None = None,
        precision: str = "f64",
        diff: str = "gradient",
    ):
        if precision not in _DTYPES:
            raise ValueError(f"precision must be one of {sorted(_DTYPES)}")
        if diff not in ("none", "gradient"):
            raise ValueError("diff must be 'none' or 'gradient'")
        self.program = program
        self.precision = precision
        self.diff = diff
        self.dtype = _DTYPES[precision]
        self.num_params = program.num_params
        self.dim = program.dim
        self.cache = cache if cache is not None else ExpressionCache()

        self._buf_deps = self._validate()
        self._layout_arena()
        self._programs = self._compile_programs()
        self._regs = [0.0] * max(
            (p.n_regs for p in self._programs.values()), default=1
        )
        self._params: list[float] = []

        for op in [self._specialize(i, grad=False) for i in program.const_instrs]:
            op()
        self._microps = [
            self._specialize(i, grad=(diff == "gradient"))
            for i in program.dyn_instrs
        ]

        out = program.out_buffer
        unitary = self._value2d[out]
        if diff == "gradient":
            gradient = self._slab3d.get(out)
            if gradient is None:
                gradient = np.zeros((0, self.dim, self.dim), dtype=self.dtype)
            if self.num_params and gradient.shape[0] != self.num_params:
                raise ShapeMismatchError(
                    "output buffer does not depend on every circuit parameter"
                )
        else:
            gradient = None
        self._result = EvaluationResult(unitary=unitary, gradient=gradient)

    # -- setup -----------------------------------------------------------

    def _validate(self) -> dict[int, tuple[int, ...]]:
        program = self.program
        buffers = program.buffers
        expr_table = program.expressions
        written: set[int] = set()
        deps_of: dict[int, tuple[int, ...]] = {}

        def size(buf: int) -> int:
            return buffers[buf].size

        def check_read(buf: int) -> None:
            if buf not in written:
                raise ShapeMismatchError(f"buffer b{buf} read before it is written")

        for section, instrs in (
            (CONST_SECTION, program.const_instrs),
            (1, program.dyn_instrs),
        ):
            for instr in instrs:
                if section == CONST_SECTION and instr.deps:
                    raise ShapeMismatchError(
                        "constant-section instruction has parameter dependencies"
                    )
                if isinstance(instr, Write):
                    if not 0 <= instr.expr_id < len(expr_table):
                        raise ShapeMismatchError(f"unknown expression e{instr.expr_id}")
                    entry = expr_table[instr.expr_id]
                    if len(instr.bindings) != entry.num_params:
                        raise ShapeMismatchError(
                            f"WRITE e{instr.expr_id} binds {len(instr.bindings)} of "
                            f"{entry.num_params} parameters"
                        )
                    if size(instr.out) != entry.rows * entry.cols:
                        raise ShapeMismatchError("WRITE output buffer size mismatch")
                    for b in instr.bindings:
                        if isinstance(b, FreeVar) and not 0 <= b.index < program.num_params:
                            raise ShapeMismatchError(f"parameter v{b.index} out of range")
                elif isinstance(instr, MatMul):
                    check_read(instr.a)
                    check_read(instr.b)
                    m, n = buffers[instr.out].rows, buffers[instr.out].cols
                    if m == 0 or size(instr.a) % m:
                        raise ShapeMismatchError("MATMUL operand A size mismatch")
                    k = size(instr.a) // m
                    if size(instr.b) != k * n:
                        raise ShapeMismatchError("MATMUL operand B size mismatch")
                elif isinstance(instr, Kron):
                    check_read(instr.a)
                    check_read(instr.b)
                    a, b, out = buffers[instr.a], buffers[instr.b], buffers[instr.out]
                    if a.rows * b.rows != out.rows or a.cols * b.cols != out.cols:
                        raise ShapeMismatchError("KRON shape mismatch")
                elif isinstance(instr, Hadamard):
                    check_read(instr.a)
                    check_read(instr.b)
                    if not size(instr.a) == size(instr.b) == size(instr.out):
                        raise ShapeMismatchError("HADAMARD shape mismatch")
                elif isinstance(instr, Transpose):
                    check_read(instr.src)
                    if sorted(instr.perm) != list(range(len(instr.shape))):
                        raise ShapeMismatchError("TRANSPOSE perm is not a permutation")
                    if math.prod(instr.shape) != size(instr.src) or size(
                        instr.src
                    ) != size(instr.out):
                        raise ShapeMismatchError("TRANSPOSE size mismatch")
                else:
                    raise ShapeMismatchError(f"unknown instruction {instr!r}")
                if instr.out in written:
                    raise ShapeMismatchError(f"buffer b{instr.out} written twice")
                written.add(instr.out)
                deps_of[instr.out] = instr.deps
        if self.program.out_buffer not in written:
            raise ShapeMismatchError("output buffer is never written")
        return deps_of

    def _layout_arena(self) -> None:
        program = self.program
        grad = self.diff == "gradient"
        offset = 0
        value_at: list[int] = []
        slab_at: dict[int, int] = {}
        for buf_id, buf in enumerate(program.buffers):
            value_at.append(offset)
            offset += buf.size
            deps = self._buf_deps.get(buf_id, ())
            if grad and deps and buf.section != CONST_SECTION:
                slab_at[buf_id] = offset
                offset += len(deps) * buf.size

        scratch_elems = 0
        discard_elems = 0
        if grad:
            for instr in program.dyn_instrs:
                if isinstance(instr, (MatMul, Kron, Hadamard)):
                    both = set(self._buf_deps.get(instr.a, ())) & set(
                        self._buf_deps.get(instr.b, ())
                    )
                    if both:
                        scratch_elems = max(
                            scratch_elems, program.buffers[instr.out].size
                        )
                elif isinstance(instr, Write):
                    entry = program.expressions[instr.expr_id]
                    seen: set[int] = set()
                    dup = 0
                    has_const = False
                    for b in instr.bindings:
                        if isinstance(b, Constant):
                            has_const = True
                        elif b.index in seen:
                            dup += 1
                        else:
                            seen.add(b.index)
                    size = entry.rows * entry.cols
                    scratch_elems = max(scratch_elems, dup * size)
                    if has_const:
                        discard_elems = max(discard_elems, size)
        scratch_at = offset
        offset += scratch_elems
        discard_at = offset
        offset += discard_elems

        self._arena = np.zeros(max(offset, 1), dtype=self.dtype)
        arena = self._arena
        self._value1d = [
            arena[value_at[b] : value_at[b] + info.size]
            for b, info in enumerate(program.buffers)
        ]
        self._value2d = [
            v.reshape(info.rows, info.cols)
            for v, info in zip(self._value1d, program.buffers)
        ]
        self._slab3d = {}
        self._partial2d = {}
        for buf_id, start in slab_at.items():
            info = program.buffers[buf_id]
            deps = self._buf_deps[buf_id]
            slab = arena[start : start + len(deps) * info.size].reshape(
                len(deps), info.rows, info.cols
            )
            self._slab3d[buf_id] = slab
            for row, p in enumerate(deps):
                self._partial2d[(buf_id, p)] = slab[row]
        self._scratch = arena[scratch_at : scratch_at + scratch_elems]
        self._discard = arena[discard_at : discard_at + discard_elems]

    def _compile_programs(self) -> dict[tuple[int, str], ExprProgram]:
        programs: dict[tuple[int, str], ExprProgram] = {}
        grad = self.diff == "gradient"
        needed: dict[tuple[int, str], object] = {}
        for section, instrs in (
            (CONST_SECTION, self.program.const_instrs),
            (1, self.program.dyn_instrs),
        ):
            for instr in instrs:
                if not isinstance(instr, Write):
                    continue
                kind = "grad" if (grad and section != CONST_SECTION and instr.deps) else "value"
                needed[(instr.expr_id, kind)] = self.program.expressions[instr.expr_id].expr
        for (expr_id, kind), expr in needed.items():
            ref = self.cache.intern(expr)
            factory = (
                (lambda e=expr: _build_grad_program(e))
                if kind == "grad"
                else (lambda e=expr: _build_value_program(e))
            )
            programs[(expr_id, kind)] = self.cache.get_or_build(
                ref, f"program:{kind}", factory
            )
        return programs

    # -- instruction specialization ---------------------------------------

    def _specialize(self, instr, grad: bool):
        if isinstance(instr, Write):
            return self._make_write(instr, grad)
        if isinstance(instr, MatMul):
            return self._make_matmul(instr, grad)
        if isinstance(instr, Kron):
            return self._make_kron(instr, grad)
        if isinstance(instr, Hadamard):
            return self._make_hadamard(instr, grad)
        return self._make_transpose(instr, grad)

    def _make_write(self, instr: Write, grad: bool):
        entry = self.program.expressions[instr.expr_id]
        use_grad = grad and bool(instr.deps)
        prog = self._programs[(instr.expr_id, "grad" if use_grad else "value")]
        locals_list = [
            b.value if isinstance(b, Constant) else 0.0 for b in instr.bindings
        ]
        gather = tuple(
            (slot, b.index)
            for slot, b in enumerate(instr.bindings)
            if isinstance(b, FreeVar)
        )
        size = entry.rows * entry.cols
        targets: list[np.ndarray] = [self._value1d[instr.out]]
        accumulate: list[tuple[np.ndarray, np.ndarray]] = []
        if use_grad:
            seen: dict[int, np.ndarray] = {}
            scratch_used = 0
            for b in instr.bindings:
                if isinstance(b, Constant):
                    targets.append(self._discard[:size])
                    continue
                main = self._partial2d[(instr.out, b.index)].reshape(-1)
                if b.index in seen:
                    view = self._scratch[scratch_used : scratch_used + size]
                    scratch_used += size
                    targets.append(view)
                    accumulate.append((main, view))
                else:
                    seen[b.index] = main
                    targets.append(main)
        regs = self._regs
        vm = self

        if accumulate:

            def op():
                lp = locals_list
                params = vm._params
                for slot, g in gather:
                    lp[slot] = params[g]
                prog.run(regs, lp, targets)
                for main, extra in accumulate:
                    np.add(main, extra, out=main)

        else:

            def op():
                lp = locals_list
                params = vm._params
                for slot, g in gather:
                    lp[slot] = params[g]
                prog.run(regs, lp, targets)

        return op

    def _matmul_views(self, instr: MatMul):
        out_info = self.program.buffers[instr.out]
        m, n = out_info.rows, out_info.cols
        k = self.program.buffers[instr.a].size // m
        a2 = self._value1d[instr.a].reshape(m, k)
        b2 = self._value1d[instr.b].reshape(k, n)
        c2 = self._value2d[instr.out]
        return m, n, k, a2, b2, c2

    def _make_matmul(self, instr: MatMul, grad: bool):
        m, n, k, a2, b2, c2 = self._matmul_views(instr)
        plans = self._bilinear_plans(
            instr,
            grad,
            lambda flat_a: flat_a.reshape(m, k),
            lambda flat_b: flat_b.reshape(k, n),
            lambda flat_c: flat_c.reshape(m, n),
        )
        scratch = None
        if any(case == 2 for case, *_ in plans):
            scratch = self._scratch[: m * n].reshape(m, n)

        def op():
            np.matmul(a2, b2, out=c2)
            for case, da, db, dc in plans:
                if case == 0:
                    np.matmul(da, b2, out=dc)
                elif case == 1:
                    np.matmul(a2, db, out=dc)
                else:
                    np.matmul(da, b2, out=dc)
                    np.matmul(a2, db, out=scratch)
                    np.add(dc, scratch, out=dc)

        return op

    def _make_kron(self, instr: Kron, grad: bool):
        a_info = self.program.buffers[instr.a]
        b_info = self.program.buffers[instr.b]
        ra, ca, rb, cb = a_info.rows, a_info.cols, b_info.rows, b_info.cols

        def view_a(flat):
            return flat.reshape(ra, 1, ca, 1)

        def view_b(flat):
            return flat.reshape(1, rb, 1, cb)

        def view_c(flat):
            return flat.reshape(ra, rb, ca, cb)

        a4 = view_a(self._value1d[instr.a])
        b4 = view_b(self._value1d[instr.b])
        c4 = view_c(self._value1d[instr.out])
        plans = self._bilinear_plans(instr, grad, view_a, view_b, view_c)
        scratch = None
        if any(case == 2 for case, *_ in plans):
            scratch = view_c(self._scratch[: self.program.buffers[instr.out].size])

        def op():
            np.multiply(a4, b4, out=c4)
            for case, da, db, dc in plans:
                if case == 0:
                    np.multiply(da, b4, out=dc)
                elif case == 1:
                    np.multiply(a4, db, out=dc)
                else:
                    np.multiply(da, b4, out=dc)
                    np.multiply(a4, db, out=scratch)
                    np.add(dc, scratch, out=dc)

        return op

    def _make_hadamard(self, instr: Hadamard, grad: bool):
        def ident(flat):
            return flat

        a1 = self._value1d[instr.a]
        b1 = self._value1d[instr.b]
        c1 = self._value1d[instr.out]
        plans = self._bilinear_plans(instr, grad, ident, ident, ident)
        scratch = None
        if any(case == 2 for case, *_ in plans):
            scratch = self._scratch[: c1.size]

        def op():
            np.multiply(a1, b1, out=c1)
            for case, da, db, dc in plans:
                if case == 0:
                    np.multiply(da, b1, out=dc)
                elif case == 1:
                    np.multiply(a1, db, out=dc)
                else:
                    np.multiply(da, b1, out=dc)
                    np.multiply(a1, db, out=scratch)
                    np.add(dc, scratch, out=dc)

        return op

    def _bilinear_plans(self, instr, grad: bool, view_a, view_b, view_c):
        """Per-parameter forward-mode cases for C = A o B.

        case 0: dC = dA o B; case 1: dC = A o dB; case 2: product rule.
        """
        if not grad or not instr.deps:
            return ()
        a_deps = set(self._buf_deps.get(instr.a, ()))
        b_deps = set(self._buf_deps.get(instr.b, ()))
        plans = []
        for p in instr.deps:
            dc = view_c(self._partial2d[(instr.out, p)].reshape(-1))
            in_a = p in a_deps
            in_b = p in b_deps
            da = view_a(self._partial2d[(instr.a, p)].reshape(-1)) if in_a else None
            db = view_b(self._partial2d[(instr.b, p)].reshape(-1)) if in_b else None
            if in_a and in_b:
                plans.append((2, da, db, dc))
            elif in_a:
                plans.append((0, da, None, dc))
            else:
                plans.append((1, None, db, dc))
        return tuple(plans)

    def _make_transpose(self, instr: Transpose, grad: bool):
        out_shape = tuple(instr.shape[p] for p in instr.perm)

        def permuted(flat):
            return flat.reshape(instr.shape).transpose(instr.perm)

        def dest(flat):
            return flat.reshape(out_shape)

        pairs = [(permuted(self._value1d[instr.src]), dest(self._value1d[instr.out]))]
        if grad and instr.deps:
            for p in instr.deps:
                pairs.append(
                    (
                        permuted(self._partial2d[(instr.src, p)].reshape(-1)),
                        dest(self._partial2d[(instr.out, p)].reshape(-1)),
                    )
                )
        pairs = tuple(pairs)

        def op():
            for src, dst in pairs:
                np.copyto(dst, src)

        return op

    # -- execution ---------------------------------------------------------

    def evaluate(self, params) -> EvaluationResult:
        """Run the dynamic section; the result views live in the arena."""
        params = np.asarray(params, dtype=np.float64)
        if params.shape != (self.num_params,):
            raise ArityMismatchError(
                f"expected {self.num_params} parameters, got {params.shape}"
            )
        self._params = params.tolist()
        for op in self._microps:
            op()
        return self._result

    @property
    def arena_bytes(self) -> int:
        return self._arena.nbytes
