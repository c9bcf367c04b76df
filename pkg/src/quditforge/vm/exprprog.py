"""Flat register programs compiled from shared expression DAGs.

One register per DAG node, so shared subexpressions are computed once per
call. A store map writes (re, im) register pairs into complex matrix
slots: target 0 is the value matrix, target 1+k the partial with respect
to local parameter k. Execution is a tight dispatch loop over the op
list; a native code generator could replace `run` behind the same
callable shape.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from quditforge.egraph.extract import SharedDag
from quditforge.errors import QuditforgeError
from quditforge.symbolic import scalar as sc

LOAD_PARAM, CONST, ADD, SUB, NEG, MUL, DIV, POW, SIN, COS, SQRT, EXP, LN = range(13)

_OPCODE = {
    sc.ADD: ADD,
    sc.SUB: SUB,
    sc.NEG: NEG,
    sc.MUL: MUL,
    sc.DIV: DIV,
    sc.POW: POW,
    sc.SIN: SIN,
    sc.COS: COS,
    sc.SQRT: SQRT,
    sc.EXP: EXP,
    sc.LN: LN,
}

OP_NAMES = {
    LOAD_PARAM: "load_param",
    CONST: "const",
    ADD: "add",
    SUB: "sub",
    NEG: "neg",
    MUL: "mul",
    DIV: "div",
    POW: "pow",
    SIN: "sin",
    COS: "cos",
    SQRT: "sqrt",
    EXP: "exp",
    LN: "ln",
}


class UnsupportedNodeError(QuditforgeError):
    pass


@dataclass
class ExprProgram:
    ops: list[tuple]  # (opcode, dst, a, b) with payload in slot 3 for CONST
    n_regs: int
    stores: list[tuple[int, int, int, int]]  # (target, flat index, re reg, im reg)
    n_targets: int

    def op_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for op in self.ops:
            name = OP_NAMES[op[0]]
            counts[name] = counts.get(name, 0) + 1
        return counts

    def run(self, regs: list, params, targets) -> None:
        """Evaluate into ``targets`` (1D complex views indexed by store target)."""
        for code, dst, a, b in self.ops:
            if code == MUL:
                regs[dst] = regs[a] * regs[b]
            elif code == ADD:
                regs[dst] = regs[a] + regs[b]
            elif code == SUB:
                regs[dst] = regs[a] - regs[b]
            elif code == NEG:
                regs[dst] = -regs[a]
            elif code == SIN:
                regs[dst] = math.sin(regs[a])
            elif code == COS:
                regs[dst] = math.cos(regs[a])
            elif code == LOAD_PARAM:
                regs[dst] = params[a]
            elif code == CONST:
                regs[dst] = b
            elif code == DIV:
                regs[dst] = regs[a] / regs[b]
            elif code == EXP:
                regs[dst] = math.exp(regs[a])
            elif code == SQRT:
                regs[dst] = math.sqrt(regs[a])
            elif code == POW:
                regs[dst] = math.pow(regs[a], regs[b])
            else:
                regs[dst] = math.log(regs[a])
        for target, index, re_reg, im_reg in self.stores:
            targets[target][index] = complex(regs[re_reg], regs[im_reg])


def compile_expression(dag: SharedDag, layout: list[tuple[int, int]]) -> ExprProgram:
    """Compile a DAG against a store layout.

    ``layout[k]`` gives (target, flat index) for slot k; slots align with
    ``dag.slot_roots``. Every DAG node gets one dense register.
    """
    ops: list[tuple] = []
    for reg, node in enumerate(dag.nodes):
        if node.op == sc.VAR:
            ops.append((LOAD_PARAM, reg, node.value, 0))
        elif node.op == sc.CONST:
            ops.append((CONST, reg, 0, node.value))
        elif node.op == sc.PI:
            ops.append((CONST, reg, 0, math.pi))
        else:
            code = _OPCODE.get(node.op)
            if code is None:
                raise UnsupportedNodeError(f"cannot compile node kind {node.op!r}")
            a = node.children[0]
            b = node.children[1] if len(node.children) > 1 else 0
            if max(node.children, default=-1) >= reg:
                raise UnsupportedNodeError("DAG is not topologically ordered")
            ops.append((code, reg, a, b))
    slot_roots = dag.slot_roots
    if len(layout) != len(slot_roots) // 2:
        raise UnsupportedNodeError(
            f"layout has {len(layout)} slots for {len(slot_roots) // 2} complex entries"
        )
    stores = []
    n_targets = 0
    for k, (target, index) in enumerate(layout):
        re_reg = slot_roots[2 * k]
        im_reg = slot_roots[2 * k + 1]
        stores.append((target, index, re_reg, im_reg))
        n_targets = max(n_targets, target + 1)
    return ExprProgram(
        ops=ops, n_regs=len(dag.nodes), stores=stores, n_targets=n_targets
    )
