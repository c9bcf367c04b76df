"""Rewrite-rule patterns: parsing, matching, and instantiation.

Rule files hold one rule per line:

    name: <lhs> => <rhs> [if nonzero(?x)]

Patterns use QGL scalar syntax with `?x` wildcards. The only guard is
``nonzero(?x)``, satisfied when the matched class has a known nonzero
constant value; rules needing stronger side conditions are omitted from
the shipped set rather than approximated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterator

from quditforge.errors import QuditforgeError
from quditforge.qgl.ast import AstExpr, BinaryOp, Call, Const, Matrix, Neg, Var
from quditforge.qgl.parser import parse_expression
from quditforge.symbolic import scalar as sc
from quditforge.egraph.graph import EGraph, ENode


class RuleParseError(QuditforgeError):
    pass


@dataclass(frozen=True)
class PVar:
    name: str


@dataclass(frozen=True)
class PNode:
    op: str
    children: tuple  # of PVar | PNode
    value: float | None = None


Pattern = PVar | PNode


@dataclass(frozen=True)
class Rule:
    name: str
    lhs: Pattern
    rhs: Pattern
    guard: Callable[[EGraph, dict], bool] | None = None
    guard_text: str | None = None


_BINOPS = {"+": sc.ADD, "-": sc.SUB, "*": sc.MUL, "/": sc.DIV}
_CALLS = {"sin": sc.SIN, "cos": sc.COS, "exp": sc.EXP, "ln": sc.LN, "sqrt": sc.SQRT}


def _ast_to_pattern(ast: AstExpr) -> Pattern:
    if isinstance(ast, Var):
        if ast.name.startswith("?"):
            return PVar(ast.name[1:])
        if ast.name in ("pi", "π"):
            return PNode(sc.PI, ())
        if ast.name == "e":
            return PNode(sc.CONST, (), math.e)
        raise RuleParseError(f"free identifier {ast.name!r} in pattern; use ?{ast.name}")
    if isinstance(ast, Const):
        return PNode(sc.CONST, (), float(ast.value))
    if isinstance(ast, Neg):
        return PNode(sc.NEG, (_ast_to_pattern(ast.operand),))
    if isinstance(ast, Call):
        kind = _CALLS.get(ast.func)
        if kind is None:
            raise RuleParseError(f"function {ast.func!r} not allowed in patterns")
        return PNode(kind, (_ast_to_pattern(ast.arg),))
    if isinstance(ast, BinaryOp):
        if ast.op == "^":
            if isinstance(ast.left, Var) and ast.left.name == "e":
                return PNode(sc.EXP, (_ast_to_pattern(ast.right),))
            return PNode(sc.POW, (_ast_to_pattern(ast.left), _ast_to_pattern(ast.right)))
        return PNode(
            _BINOPS[ast.op], (_ast_to_pattern(ast.left), _ast_to_pattern(ast.right))
        )
    if isinstance(ast, Matrix):
        raise RuleParseError("matrices are not allowed in patterns")
    raise RuleParseError(f"unsupported pattern node {ast!r}")


def _pattern_vars(p: Pattern) -> set[str]:
    if isinstance(p, PVar):
        return {p.name}
    out: set[str] = set()
    for child in p.children:
        out |= _pattern_vars(child)
    return out


def _make_nonzero_guard(name: str) -> Callable[[EGraph, dict], bool]:
    def guard(graph: EGraph, subst: dict) -> bool:
        value = graph.get_const(subst[name])
        return value is not None and value != 0.0

    return guard


def parse_rule(line: str) -> Rule:
    head, _, body = line.partition(":")
    if not body:
        raise RuleParseError(f"missing ':' in rule {line!r}")
    name = head.strip()
    lhs_text, arrow, rhs_text = body.partition("=>")
    if not arrow:
        raise RuleParseError(f"missing '=>' in rule {name!r}")
    guard = None
    guard_text = None
    rhs_text = rhs_text.strip()
    if " if " in f" {rhs_text} ":
        rhs_text, _, guard_text = rhs_text.rpartition(" if ")
        guard_text = guard_text.strip()
        if not (guard_text.startswith("nonzero(?") and guard_text.endswith(")")):
            raise RuleParseError(f"unsupported guard {guard_text!r} in rule {name!r}")
        guard = _make_nonzero_guard(guard_text[len("nonzero(?"):-1])
    lhs = _ast_to_pattern(parse_expression(lhs_text.strip(), pattern_mode=True))
    rhs = _ast_to_pattern(parse_expression(rhs_text.strip(), pattern_mode=True))
    unbound = _pattern_vars(rhs) - _pattern_vars(lhs)
    if unbound:
        raise RuleParseError(f"rule {name!r} introduces unbound variables {unbound}")
    return Rule(name, lhs, rhs, guard, guard_text)


def load_rules(text: str) -> list[Rule]:
    rules = []
    for raw in text.splitlines():
        line = raw.split("//")[0].strip()
        if not line:
            continue
        rules.append(parse_rule(line))
    names = [r.name for r in rules]
    if len(set(names)) != len(names):
        raise RuleParseError("duplicate rule names in rule file")
    return rules


def match_rule(
    graph: EGraph,
    snapshot: dict[int, list[ENode]],
    index: dict[str, list[tuple[int, ENode]]],
    rule: Rule,
) -> Iterator[tuple[int, dict]]:
    """Yield (class id, substitution) pairs for a rule's left-hand side."""
    lhs = rule.lhs
    if isinstance(lhs, PVar) or lhs.op in (sc.CONST, sc.PI):
        for cid in snapshot:
            for subst in match_class(graph, snapshot, lhs, cid, {}):
                yield cid, dict(subst)
        return
    arity = len(lhs.children)
    for cid, enode in index.get(lhs.op, ()):
        if len(enode.children) != arity:
            continue
        for subst in _match_children(
            graph, snapshot, lhs.children, enode.children, 0, {}
        ):
            yield cid, dict(subst)


def match_class(
    graph: EGraph,
    snapshot: dict[int, list[ENode]],
    pattern: Pattern,
    cid: int,
    subst: dict,
) -> Iterator[dict]:
    """Yield substitutions matching ``pattern`` against class ``cid``."""
    cid = graph.find(cid)
    if isinstance(pattern, PVar):
        bound = subst.get(pattern.name)
        if bound is None:
            subst[pattern.name] = cid
            yield subst
            del subst[pattern.name]
        elif graph.find(bound) == cid:
            yield subst
        return
    if pattern.op == sc.CONST or pattern.op == sc.PI:
        want = math.pi if pattern.op == sc.PI else pattern.value
        if graph.get_const(cid) == want:
            yield subst
        return
    for enode in snapshot.get(cid, ()):
        if enode.op != pattern.op or len(enode.children) != len(pattern.children):
            continue
        yield from _match_children(graph, snapshot, pattern.children, enode.children, 0, subst)


def _match_children(graph, snapshot, patterns, classes, k, subst) -> Iterator[dict]:
    if k == len(patterns):
        yield subst
        return
    for sub in match_class(graph, snapshot, patterns[k], classes[k], subst):
        yield from _match_children(graph, snapshot, patterns, classes, k + 1, sub)


def instantiate(graph: EGraph, pattern: Pattern, subst: dict) -> int:
    if isinstance(pattern, PVar):
        return graph.find(subst[pattern.name])
    children = tuple(instantiate(graph, c, subst) for c in pattern.children)
    if pattern.op == sc.CONST:
        return graph.add(sc.CONST, (), pattern.value)
    if pattern.op == sc.VAR:  # pragma: no cover - patterns never hold params
        return graph.add(sc.VAR, (), pattern.value)
    return graph.add(pattern.op, children)
