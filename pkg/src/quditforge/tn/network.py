"""Tensor-network view of a circuit.

Each gate placement becomes one tensor whose legs are the gate's output
wires followed by its input wires; a wire threads a fresh index between
consecutive gates, and the circuit boundary indices stay open. An index
therefore appears on at most two tensors. ``batch`` indices (shared but
kept open, giving element-wise contraction) never arise from circuits and
exist for synthetic-network tests of the full instruction set.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from quditforge.circuits.circuit import Binding, FreeVar, QuditCircuit
from quditforge.errors import QuditforgeError


class EmptyCircuitError(QuditforgeError):
    pass


@dataclass(frozen=True)
class TensorNode:
    ref: int  # operation ref into the circuit's cache
    bindings: tuple[Binding, ...]
    indices: tuple[int, ...]  # output legs then input legs
    out_count: int
    op_index: int

    @property
    def rank(self) -> int:
        return len(self.indices)

    def deps(self) -> frozenset[int]:
        return frozenset(
            b.index for b in self.bindings if isinstance(b, FreeVar)
        )


@dataclass
class TensorNetwork:
    nodes: list[TensorNode]
    dims: dict[int, int]
    open_out: tuple[int, ...]  # circuit outputs, wire order
    open_in: tuple[int, ...]  # circuit inputs, wire order
    radices: tuple[int, ...]
    num_params: int
    batch: frozenset[int] = field(default_factory=frozenset)

    def open_indices(self) -> frozenset[int]:
        return frozenset(self.open_out) | frozenset(self.open_in) | self.batch


def lower_to_network(circuit: QuditCircuit) -> TensorNetwork:
    """One tensor per gate placement, wires threaded through fresh indices."""
    if not circuit.ops:
        raise EmptyCircuitError("cannot lower an empty circuit")
    dims: dict[int, int] = {}
    next_index = 0

    def fresh(radix: int) -> int:
        nonlocal next_index
        dims[next_index] = radix
        next_index += 1
        return next_index - 1

    frontier = {w: fresh(r) for w, r in enumerate(circuit.radices)}
    open_in = tuple(frontier[w] for w in range(circuit.num_qudits))
    nodes: list[TensorNode] = []
    for pos, op in enumerate(circuit.ops):
        in_legs = tuple(frontier[q] for q in op.qudits)
        out_legs = tuple(fresh(circuit.radices[q]) for q in op.qudits)
        for q, leg in zip(op.qudits, out_legs):
            frontier[q] = leg
        nodes.append(
            TensorNode(
                ref=op.ref,
                bindings=op.bindings,
                indices=out_legs + in_legs,
                out_count=len(op.qudits),
                op_index=pos,
            )
        )
    open_out = tuple(frontier[w] for w in range(circuit.num_qudits))
    return TensorNetwork(
        nodes=nodes,
        dims=dims,
        open_out=open_out,
        open_in=open_in,
        radices=circuit.radices,
        num_params=circuit.num_params,
    )
