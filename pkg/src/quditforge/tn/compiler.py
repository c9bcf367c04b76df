"""Bytecode emission: depth-first serialization of a planned tree."""

from __future__ import annotations

from quditforge.circuits.circuit import QuditCircuit
from quditforge.tn.network import TensorNetwork, lower_to_network
from quditforge.tn.path import find_path
from quditforge.tn.program import (
    CONST_SECTION,
    DYNAMIC_SECTION,
    BufferInfo,
    ExprEntry,
    Hadamard,
    Kron,
    MatMul,
    TnProgram,
    Transpose,
    Write,
)
from quditforge.tn.tree import ContractionTree, optimize_tree


class _Emitter:
    def __init__(self, net: TensorNetwork, circuit: QuditCircuit):
        self.net = net
        self.cache = circuit.cache
        self.buffers: list[BufferInfo] = []
        self.expr_ids: dict[int, int] = {}  # cache ref -> table index
        self.expressions: list[ExprEntry] = []
        self.const_instrs = []
        self.dyn_instrs = []

    def _buffer(self, rows: int, cols: int, section: int) -> int:
        self.buffers.append(BufferInfo(rows, cols, section))
        return len(self.buffers) - 1

    def _emit(self, instr, section: int) -> None:
        (self.const_instrs if section == CONST_SECTION else self.dyn_instrs).append(instr)

    def _expr_id(self, expr) -> int:
        ref = self.cache.intern(expr)
        expr_id = self.expr_ids.get(ref)
        if expr_id is None:
            expr_id = len(self.expressions)
            self.expressions.append(ExprEntry(self.cache.expr(ref)))
            self.expr_ids[ref] = expr_id
        return expr_id

    def emit_node(self, node: ContractionTree) -> int:
        dims = self.net.dims
        section = CONST_SECTION if not node.deps else DYNAMIC_SECTION
        deps = tuple(sorted(node.deps))
        if node.kind == "leaf":
            out = self._buffer(node.expr.rows, node.expr.cols, section)
            self._emit(Write(self._expr_id(node.expr), node.bindings, out, deps), section)
            return out

        a_buf = self.emit_node(node.left)
        b_buf = self.emit_node(node.right)
        if node.pre_left is not None:
            a_buf = self._transpose(a_buf, node.pre_left, node.left)
        if node.pre_right is not None:
            b_buf = self._transpose(b_buf, node.pre_right, node.right)
        out = self._buffer(node.rows(dims), node.cols(dims), section)
        cls = {"matmul": MatMul, "kron": Kron, "hadamard": Hadamard}[node.kind]
        self._emit(cls(a_buf, b_buf, out, deps), section)
        return out

    def _transpose(self, src: int, spec, child: ContractionTree) -> int:
        shape, perm, rows, cols = spec
        # The transpose inherits its operand's section and dependency set.
        child_section = CONST_SECTION if not child.deps else DYNAMIC_SECTION
        child_deps = tuple(sorted(child.deps))
        out = self._buffer(rows, cols, child_section)
        self._emit(Transpose(src, shape, perm, out, child_deps), child_section)
        return out


def emit_bytecode(
    tree: ContractionTree,
    final: tuple | None,
    net: TensorNetwork,
    circuit: QuditCircuit,
) -> TnProgram:
    emitter = _Emitter(net, circuit)
    out = emitter.emit_node(tree)
    dim = circuit.dim
    root_deps = tuple(sorted(tree.deps))
    root_section = CONST_SECTION if not tree.deps else DYNAMIC_SECTION
    if final is not None:
        shape, perm = final
        dst = emitter._buffer(dim, dim, root_section)
        emitter._emit(Transpose(out, shape, perm, dst, root_deps), root_section)
        out = dst
    return TnProgram(
        radices=circuit.radices,
        num_params=circuit.num_params,
        buffers=emitter.buffers,
        expressions=emitter.expressions,
        const_instrs=emitter.const_instrs,
        dyn_instrs=emitter.dyn_instrs,
        out_buffer=out,
    )


def compile_network(circuit: QuditCircuit, net: TensorNetwork | None = None) -> TnProgram:
    """The whole AOT pipeline: lower, find a path, plan, and emit.

    Freezes the circuit: afterwards the op list is immutable and the
    expression cache only grows through lazy compilation.
    """
    if net is None:
        net = lower_to_network(circuit)
    circuit.freeze()
    path = find_path(net)
    tree, final = optimize_tree(path, net, circuit)
    return emit_bytecode(tree, final, net, circuit)
