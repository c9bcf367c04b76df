"""Two-section bytecode over abstract buffers.

The constant section runs once at VM initialization (parameter-free
subtrees); the dynamic section runs per evaluation. WRITE carries the
placement's parameter bindings beside the Table-style operands so the
program is self-contained. The serialized form is a versioned
little-endian binary layout; expressions are stored as canonical QGL
matrix text whose reparse reproduces the exact interned scalars, keeping
results bit-identical across a serialize/deserialize round trip.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

from quditforge.circuits.circuit import Binding, Constant, FreeVar
from quditforge.errors import QuditforgeError
from quditforge.symbolic.lowering import lower_expression
from quditforge.symbolic.printing import grid_to_qgl, positional_names
from quditforge.qgl.parser import parse_expression
from quditforge.symbolic.unitary import MatrixExpression

MAGIC = b"TNVM"
VERSION = 1

OP_WRITE, OP_MATMUL, OP_KRON, OP_HADAMARD, OP_TRANSPOSE = range(5)


class BytecodeError(QuditforgeError):
    pass


@dataclass(frozen=True)
class Write:
    expr_id: int
    bindings: tuple[Binding, ...]
    out: int
    deps: tuple[int, ...]


@dataclass(frozen=True)
class MatMul:
    a: int
    b: int
    out: int
    deps: tuple[int, ...]


@dataclass(frozen=True)
class Kron:
    a: int
    b: int
    out: int
    deps: tuple[int, ...]


@dataclass(frozen=True)
class Hadamard:
    a: int
    b: int
    out: int
    deps: tuple[int, ...]


@dataclass(frozen=True)
class Transpose:
    src: int
    shape: tuple[int, ...]
    perm: tuple[int, ...]
    out: int
    deps: tuple[int, ...]


Instruction = Write | MatMul | Kron | Hadamard | Transpose

CONST_SECTION = 0
DYNAMIC_SECTION = 1


@dataclass(frozen=True)
class BufferInfo:
    rows: int
    cols: int
    section: int

    @property
    def size(self) -> int:
        return self.rows * self.cols


@dataclass(frozen=True)
class ExprEntry:
    expr: MatrixExpression

    @property
    def rows(self) -> int:
        return self.expr.rows

    @property
    def cols(self) -> int:
        return self.expr.cols

    @property
    def num_params(self) -> int:
        return self.expr.num_params


@dataclass
class TnProgram:
    radices: tuple[int, ...]
    num_params: int
    buffers: list[BufferInfo]
    expressions: list[ExprEntry]
    const_instrs: list[Instruction]
    dyn_instrs: list[Instruction]
    out_buffer: int
    meta: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        d = 1
        for r in self.radices:
            d *= r
        return d


# -- binary serialization ------------------------------------------------


class _Writer:
    def __init__(self):
        self.parts: list[bytes] = []

    def u8(self, v: int):
        self.parts.append(struct.pack("<B", v))

    def u32(self, v: int):
        self.parts.append(struct.pack("<I", v))

    def f64(self, v: float):
        self.parts.append(struct.pack("<d", v))

    def text(self, s: str):
        raw = s.encode("utf-8")
        self.u32(len(raw))
        self.parts.append(raw)

    def bytes(self) -> bytes:
        return b"".join(self.parts)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def _take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise BytecodeError("truncated bytecode")
        chunk = self.data[self.pos : self.pos + n]
        self.pos += n
        return chunk

    def u8(self) -> int:
        return struct.unpack("<B", self._take(1))[0]

    def u32(self) -> int:
        return struct.unpack("<I", self._take(4))[0]

    def f64(self) -> float:
        return struct.unpack("<d", self._take(8))[0]

    def text(self) -> str:
        return self._take(self.u32()).decode("utf-8")


def _write_instr(w: _Writer, instr: Instruction) -> None:
    if isinstance(instr, Write):
        w.u8(OP_WRITE)
        w.u32(instr.expr_id)
        w.u32(instr.out)
        w.u32(len(instr.bindings))
        for b in instr.bindings:
            if isinstance(b, FreeVar):
                w.u8(0)
                w.u32(b.index)
            else:
                w.u8(1)
                w.f64(b.value)
    elif isinstance(instr, (MatMul, Kron, Hadamard)):
        w.u8({MatMul: OP_MATMUL, Kron: OP_KRON, Hadamard: OP_HADAMARD}[type(instr)])
        w.u32(instr.a)
        w.u32(instr.b)
        w.u32(instr.out)
    else:
        w.u8(OP_TRANSPOSE)
        w.u32(instr.src)
        w.u32(instr.out)
        w.u32(len(instr.shape))
        for d in instr.shape:
            w.u32(d)
        for p in instr.perm:
            w.u32(p)
    w.u32(len(instr.deps))
    for d in instr.deps:
        w.u32(d)


def _read_instr(r: _Reader) -> Instruction:
    opcode = r.u8()
    if opcode == OP_WRITE:
        expr_id = r.u32()
        out = r.u32()
        bindings = []
        for _ in range(r.u32()):
            tag = r.u8()
            bindings.append(FreeVar(r.u32()) if tag == 0 else Constant(r.f64()))
        deps = tuple(r.u32() for _ in range(r.u32()))
        return Write(expr_id, tuple(bindings), out, deps)
    if opcode in (OP_MATMUL, OP_KRON, OP_HADAMARD):
        a, b, out = r.u32(), r.u32(), r.u32()
        deps = tuple(r.u32() for _ in range(r.u32()))
        cls = {OP_MATMUL: MatMul, OP_KRON: Kron, OP_HADAMARD: Hadamard}[opcode]
        return cls(a, b, out, deps)
    if opcode == OP_TRANSPOSE:
        src = r.u32()
        out = r.u32()
        rank = r.u32()
        shape = tuple(r.u32() for _ in range(rank))
        perm = tuple(r.u32() for _ in range(rank))
        deps = tuple(r.u32() for _ in range(r.u32()))
        return Transpose(src, shape, perm, out, deps)
    raise BytecodeError(f"unknown opcode {opcode}")


def expr_to_text(expr: MatrixExpression) -> str:
    return grid_to_qgl(expr.body, positional_names(expr.num_params))


def expr_from_text(name: str, text: str, rows: int, cols: int, num_params: int) -> MatrixExpression:
    ast = parse_expression(text)
    names = tuple(positional_names(num_params))
    grid = lower_expression(ast, names)
    if not isinstance(grid, list):
        raise BytecodeError("expression table entry is not a matrix")
    return MatrixExpression(
        name=name,
        rows=rows,
        cols=cols,
        num_params=num_params,
        body=tuple(tuple(row) for row in grid),
    )


def serialize_program(program: TnProgram) -> bytes:
    w = _Writer()
    w.parts.append(MAGIC)
    w.u32(VERSION)
    w.u32(len(program.radices))
    for r in program.radices:
        w.u32(r)
    w.u32(program.num_params)
    w.u32(program.out_buffer)
    w.u32(len(program.buffers))
    for buf in program.buffers:
        w.u32(buf.rows)
        w.u32(buf.cols)
        w.u8(buf.section)
    w.u32(len(program.expressions))
    for entry in program.expressions:
        w.text(entry.expr.name)
        w.u32(entry.rows)
        w.u32(entry.cols)
        w.u32(entry.num_params)
        w.text(expr_to_text(entry.expr))
    w.u32(len(program.const_instrs))
    for instr in program.const_instrs:
        _write_instr(w, instr)
    w.u32(len(program.dyn_instrs))
    for instr in program.dyn_instrs:
        _write_instr(w, instr)
    return w.bytes()


def parse_program(data: bytes) -> TnProgram:
    r = _Reader(data)
    if r._take(4) != MAGIC:
        raise BytecodeError("not a TNVM bytecode file")
    version = r.u32()
    if version != VERSION:
        raise BytecodeError(f"unsupported bytecode version {version}")
    radices = tuple(r.u32() for _ in range(r.u32()))
    num_params = r.u32()
    out_buffer = r.u32()
    buffers = []
    for _ in range(r.u32()):
        rows, cols = r.u32(), r.u32()
        buffers.append(BufferInfo(rows, cols, r.u8()))
    expressions = []
    for _ in range(r.u32()):
        name = r.text()
        rows, cols, nparams = r.u32(), r.u32(), r.u32()
        expressions.append(ExprEntry(expr_from_text(name, r.text(), rows, cols, nparams)))
    const_instrs = [_read_instr(r) for _ in range(r.u32())]
    dyn_instrs = [_read_instr(r) for _ in range(r.u32())]
    if r.pos != len(data):
        raise BytecodeError("trailing bytes after bytecode")
    return TnProgram(
        radices=radices,
        num_params=num_params,
        buffers=buffers,
        expressions=expressions,
        const_instrs=const_instrs,
        dyn_instrs=dyn_instrs,
        out_buffer=out_buffer,
    )


# -- disassembly ---------------------------------------------------------


def _binding_text(b: Binding) -> str:
    if isinstance(b, FreeVar):
        return f"v{b.index}"
    return f"c{b.value!r}"


def _instr_text(instr: Instruction) -> str:
    if isinstance(instr, Write):
        bindings = ", ".join(_binding_text(b) for b in instr.bindings)
        return f"WRITE e{instr.expr_id} ({bindings}) -> b{instr.out}"
    if isinstance(instr, MatMul):
        return f"MATMUL b{instr.a} b{instr.b} -> b{instr.out}"
    if isinstance(instr, Kron):
        return f"KRON b{instr.a} b{instr.b} -> b{instr.out}"
    if isinstance(instr, Hadamard):
        return f"HADAMARD b{instr.a} b{instr.b} -> b{instr.out}"
    shape = ",".join(map(str, instr.shape))
    perm = ",".join(map(str, instr.perm))
    return f"TRANSPOSE b{instr.src} shape({shape}) perm({perm}) -> b{instr.out}"


def disassemble(program: TnProgram) -> str:
    lines = [f"TNVM v{VERSION}"]
    lines.append("radices " + " ".join(map(str, program.radices)))
    lines.append(f"params {program.num_params}")
    lines.append(f"output b{program.out_buffer}")
    lines.append(f"buffers {len(program.buffers)}")
    for k, buf in enumerate(program.buffers):
        section = "const" if buf.section == CONST_SECTION else "dyn"
        lines.append(f"b{k} {buf.rows} {buf.cols} {section}")
    lines.append(f"expressions {len(program.expressions)}")
    for k, entry in enumerate(program.expressions):
        text = expr_to_text(entry.expr)
        name = entry.expr.name.replace(" ", "_") or "_"
        lines.append(f"e{k} {name} {entry.rows} {entry.cols} {entry.num_params} {text}")
    lines.append(f"const {len(program.const_instrs)}")
    lines.extend(_instr_text(i) for i in program.const_instrs)
    lines.append(f"dynamic {len(program.dyn_instrs)}")
    lines.extend(_instr_text(i) for i in program.dyn_instrs)
    return "\n".join(lines) + "\n"


def _parse_instr_line(line: str, write_deps) -> Instruction:
    head, _, out_text = line.partition(" -> ")
    if not out_text.startswith("b"):
        raise BytecodeError(f"bad instruction line {line!r}")
    out = int(out_text[1:])
    parts = head.split(None, 1)
    op = parts[0]
    rest = parts[1] if len(parts) > 1 else ""
    if op == "WRITE":
        expr_text, _, binding_text = rest.partition(" (")
        expr_id = int(expr_text.strip()[1:])
        binding_text = binding_text.rstrip(")")
        bindings: list[Binding] = []
        if binding_text.strip():
            for token in binding_text.split(","):
                token = token.strip()
                if token.startswith("v"):
                    bindings.append(FreeVar(int(token[1:])))
                else:
                    bindings.append(Constant(float(token[1:])))
        deps = tuple(sorted({b.index for b in bindings if isinstance(b, FreeVar)}))
        return Write(expr_id, tuple(bindings), out, deps)
    if op in ("MATMUL", "KRON", "HADAMARD"):
        a_text, b_text = rest.split()
        a, b = int(a_text[1:]), int(b_text[1:])
        deps = write_deps(a, b)
        cls = {"MATMUL": MatMul, "KRON": Kron, "HADAMARD": Hadamard}[op]
        return cls(a, b, out, deps)
    if op == "TRANSPOSE":
        src_text, shape_text, perm_text = rest.split()
        src = int(src_text[1:])
        shape = tuple(int(v) for v in shape_text[len("shape(") : -1].split(",") if v)
        perm = tuple(int(v) for v in perm_text[len("perm(") : -1].split(",") if v)
        deps = write_deps(src, None)
        return Transpose(src, shape, perm, out, deps)
    raise BytecodeError(f"unknown instruction {op!r}")


def assemble(text: str) -> TnProgram:
    """Parse a disassembly back into a program (deps re-derived by dataflow)."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    pos = 0

    def take() -> str:
        nonlocal pos
        line = lines[pos]
        pos += 1
        return line

    header = take()
    if header != f"TNVM v{VERSION}":
        raise BytecodeError(f"bad header {header!r}")
    radices = tuple(int(v) for v in take().split()[1:])
    num_params = int(take().split()[1])
    out_buffer = int(take().split()[1][1:])
    buffers = []
    for _ in range(int(take().split()[1])):
        _, rows, cols, section = take().split()
        buffers.append(
            BufferInfo(
                int(rows),
                int(cols),
                CONST_SECTION if section == "const" else DYNAMIC_SECTION,
            )
        )
    expressions = []
    for _ in range(int(take().split()[1])):
        line = take()
        _, name, rows, cols, nparams, expr_text = line.split(" ", 5)
        expressions.append(
            ExprEntry(
                expr_from_text(name, expr_text, int(rows), int(cols), int(nparams))
            )
        )
    buffer_deps: dict[int, tuple[int, ...]] = {}

    def dataflow_deps(a: int, b: int | None) -> tuple[int, ...]:
        merged = set(buffer_deps.get(a, ()))
        if b is not None:
            merged |= set(buffer_deps.get(b, ()))
        return tuple(sorted(merged))

    const_instrs = []
    for _ in range(int(take().split()[1])):
        instr = _parse_instr_line(take(), dataflow_deps)
        buffer_deps[instr.out] = instr.deps
        const_instrs.append(instr)
    dyn_instrs = []
    for _ in range(int(take().split()[1])):
        instr = _parse_instr_line(take(), dataflow_deps)
        buffer_deps[instr.out] = instr.deps
        dyn_instrs.append(instr)
    return TnProgram(
        radices=radices,
        num_params=num_params,
        buffers=buffers,
        expressions=expressions,
        const_instrs=const_instrs,
        dyn_instrs=dyn_instrs,
        out_buffer=out_buffer,
    )


