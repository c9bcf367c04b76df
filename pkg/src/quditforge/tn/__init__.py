"""Ahead-of-time compiler: circuit -> tensor network -> bytecode.

Lowers a circuit to a tensor network, finds a contraction order (optimal
for small networks, greedy above), plans each pairwise contraction as a
transpose-transpose-GEMM-transpose schedule with permutations fused into
leaf expressions, partitions instructions into constant and dynamic
sections, and emits bytecode over abstract buffers.
"""

from quditforge.tn.network import (
    EmptyCircuitError,
    TensorNetwork,
    TensorNode,
    lower_to_network,
)
from quditforge.tn.path import PathNode, brute_force_min_flops, find_path
from quditforge.tn.tree import ContractionTree, optimize_tree
from quditforge.tn.program import (
    BufferInfo,
    ExprEntry,
    Instruction,
    MatMul,
    Kron,
    Hadamard,
    Transpose,
    Write,
    TnProgram,
    assemble,
    disassemble,
    parse_program,
    serialize_program,
)
from quditforge.tn.compiler import compile_network, emit_bytecode

__all__ = [
    "BufferInfo",
    "ContractionTree",
    "EmptyCircuitError",
    "ExprEntry",
    "Hadamard",
    "Instruction",
    "Kron",
    "MatMul",
    "PathNode",
    "TensorNetwork",
    "TensorNode",
    "TnProgram",
    "Transpose",
    "Write",
    "assemble",
    "brute_force_min_flops",
    "compile_network",
    "disassemble",
    "emit_bytecode",
    "find_path",
    "lower_to_network",
    "optimize_tree",
    "parse_program",
    "serialize_program",
]
