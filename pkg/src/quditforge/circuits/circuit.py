"""Qudit circuits as ordered gate placements over radix-typed wires."""

from __future__ import annotations

import json
from dataclasses import dataclass

from quditforge.circuits.cache import ExpressionCache
from quditforge.circuits.errors import (
    ArityMismatchError,
    BadRadixError,
    FrozenCircuitError,
    LocationOutOfRangeError,
    RadixMismatchError,
    UnknownRefError,
)
from quditforge.symbolic.printing import grid_to_qgl, positional_names
from quditforge.symbolic.unitary import UnitaryExpression


@dataclass(frozen=True, slots=True)
class FreeVar:
    index: int


@dataclass(frozen=True, slots=True)
class Constant:
    value: float


Binding = FreeVar | Constant


@dataclass(frozen=True, slots=True)
class CircuitOp:
    ref: int
    qudits: tuple[int, ...]
    bindings: tuple[Binding, ...]


class QuditCircuit:
    """Ordered gate placements; time order is the list order."""

    def __init__(self, radices, cache: ExpressionCache | None = None):
        radices = tuple(int(r) for r in radices)
        if not radices or any(r < 2 for r in radices):
            raise BadRadixError(f"radices must all be at least 2, got {radices}")
        self.radices = radices
        self.cache = cache if cache is not None else ExpressionCache()
        self.ops: list[CircuitOp] = []
        self._num_params = 0
        self._frozen = False

    @classmethod
    def pure(cls, radices) -> "QuditCircuit":
        return cls(radices)

    @property
    def num_qudits(self) -> int:
        return len(self.radices)

    @property
    def dim(self) -> int:
        d = 1
        for r in self.radices:
            d *= r
        return d

    @property
    def num_params(self) -> int:
        return self._num_params

    def freeze(self) -> None:
        """Make the op list immutable (done at first compilation)."""
        self._frozen = True

    def cache_operation(self, expr: UnitaryExpression) -> int:
        """Idempotently cache a gate expression, returning its reference."""
        if self._frozen:
            raise FrozenCircuitError("circuit is frozen; cannot cache new gates")
        return self.cache.intern(expr)

    def append_ref(self, ref: int, qudits, bindings=None) -> int:
        """Append a gate placement; None bindings allocate fresh parameters.

        Explicit FreeVar indices must reference an existing circuit
        parameter or be the next unused index, keeping indices dense.
        """
        if self._frozen:
            raise FrozenCircuitError("circuit is frozen; cannot append")
        if not 0 <= ref < len(self.cache):
            raise UnknownRefError(f"unknown operation ref {ref}")
        expr = self.cache.expr(ref)
        if isinstance(qudits, int):
            qudits = (qudits,)
        qudits = tuple(int(q) for q in qudits)
        if len(set(qudits)) != len(qudits):
            raise LocationOutOfRangeError(f"duplicate qudit locations {qudits}")
        for q in qudits:
            if not 0 <= q < self.num_qudits:
                raise LocationOutOfRangeError(
                    f"qudit {q} out of range for {self.num_qudits} wires"
                )
        wire_radices = tuple(self.radices[q] for q in qudits)
        if wire_radices != expr.radices:
            raise RadixMismatchError(
                f"gate {expr.name} has radices {expr.radices}, wires have {wire_radices}"
            )
        if bindings is None:
            bindings = tuple(
                FreeVar(self._num_params + k) for k in range(expr.num_params)
            )
        else:
            bindings = tuple(bindings)
        if len(bindings) != expr.num_params:
            raise ArityMismatchError(
                f"gate {expr.name} takes {expr.num_params} parameters, got {len(bindings)}"
            )
        next_free = self._num_params
        for b in bindings:
            if isinstance(b, FreeVar):
                if b.index == next_free:
                    next_free += 1
                elif not 0 <= b.index < next_free:
                    raise ArityMismatchError(
                        f"free parameter index {b.index} breaks dense numbering"
                    )
            elif not isinstance(b, Constant):
                raise ArityMismatchError(f"bad binding {b!r}")
        self._num_params = next_free
        self.ops.append(CircuitOp(ref, qudits, bindings))
        return len(self.ops) - 1

    def append_ref_constant(self, ref: int, qudits, constants) -> int:
        if isinstance(constants, (int, float)):
            constants = (constants,)
        return self.append_ref(
            ref, qudits, tuple(Constant(float(v)) for v in constants)
        )

    def append(self, expr: UnitaryExpression, qudits, bindings=None) -> int:
        """Cache and append in one step (convenience)."""
        return self.append_ref(self.cache_operation(expr), qudits, bindings)


def _canonical_definition(expr: UnitaryExpression) -> str:
    """A self-contained QGL definition for a (possibly composed) gate."""
    names = positional_names(expr.num_params)
    radices = "<" + ",".join(str(r) for r in expr.radices) + ">"
    return f"{expr.name}{radices}({', '.join(names)}) {{ {grid_to_qgl(expr.body, names)} }}"


def circuit_to_json(circuit: QuditCircuit) -> str:
    """Serialize a circuit with embedded QGL gate definitions."""
    used = sorted({op.ref for op in circuit.ops})
    names: dict[int, str] = {}
    definitions = []
    for ref in used:
        expr = circuit.cache.expr(ref)
        name = expr.name
        if name in names.values():
            name = f"{name}_{ref}"
        names[ref] = name
        source = _canonical_definition(expr)
        if name != expr.name:
            source = name + source[len(expr.name):]
        definitions.append({"name": name, "source": source})
    ops = []
    for op in circuit.ops:
        params = [
            {"var": b.index} if isinstance(b, FreeVar) else {"const": b.value}
            for b in op.bindings
        ]
        ops.append({"gate": names[op.ref], "qudits": list(op.qudits), "params": params})
    doc = {
        "radices": list(circuit.radices),
        "definitions": definitions,
        "ops": ops,
    }
    return json.dumps(doc, ensure_ascii=False)


def circuit_from_json(text: str) -> QuditCircuit:
    from quditforge.circuits.library import gate_from_source

    doc = json.loads(text)
    circuit = QuditCircuit(doc["radices"])
    refs: dict[str, int] = {}
    for definition in doc["definitions"]:
        expr = gate_from_source(definition["source"])
        refs[definition["name"]] = circuit.cache_operation(expr)
    for op in doc["ops"]:
        if op["gate"] not in refs:
            raise UnknownRefError(f"op references undefined gate {op['gate']!r}")
        bindings = []
        for p in op["params"]:
            if "var" in p:
                bindings.append(FreeVar(int(p["var"])))
            else:
                bindings.append(Constant(float(p["const"])))
        circuit.append_ref(refs[op["gate"]], tuple(op["qudits"]), tuple(bindings))
    return circuit
