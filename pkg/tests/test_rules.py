"""Numeric fuzzing of every shipped rewrite rule.

Each side of a rule is evaluated at random assignments; samples landing
outside an operand's domain (negative logs, division by ~0) are redrawn.
A rule passes when both sides agree at 256 valid points.
"""

import math

import numpy as np
import pytest

from quditforge.egraph import default_rules, parse_rule
from quditforge.egraph.pattern import PNode, PVar, RuleParseError


def _eval_pattern(pattern, env):
    if isinstance(pattern, PVar):
        return env[pattern.name]
    args = [_eval_pattern(c, env) for c in pattern.children]
    op = pattern.op
    if op == "const":
        return pattern.value
    if op == "pi":
        return math.pi
    fn = {
        "add": lambda a, b: a + b,
        "sub": lambda a, b: a - b,
        "mul": lambda a, b: a * b,
        "div": lambda a, b: a / b,
        "pow": math.pow,
        "neg": lambda a: -a,
        "sin": math.sin,
        "cos": math.cos,
        "exp": math.exp,
        "ln": math.log,
        "sqrt": math.sqrt,
    }[op]
    return fn(*args)


def _collect_vars(pattern, out):
    if isinstance(pattern, PVar):
        out.add(pattern.name)
    else:
        for child in pattern.children:
            _collect_vars(child, out)


@pytest.mark.parametrize("rule", default_rules(), ids=lambda r: r.name)
def test_rule_numerically_sound(rule):
    names = set()
    _collect_vars(rule.lhs, names)
    _collect_vars(rule.rhs, names)
    names = sorted(names)
    rng = np.random.default_rng(abs(hash(rule.name)) % 2**32)
    valid = 0
    attempts = 0
    while valid < 256:
        attempts += 1
        assert attempts < 20_000, f"rule {rule.name}: domain too hard to sample"
        env = {name: rng.uniform(-2 * math.pi, 2 * math.pi) for name in names}
        if rule.guard_text is not None:
            # nonzero(?x): honor the guard semantically while fuzzing.
            guarded = rule.guard_text[len("nonzero(?"):-1]
            if abs(env[guarded]) < 1e-6:
                continue
        try:
            lhs = _eval_pattern(rule.lhs, env)
            rhs = _eval_pattern(rule.rhs, env)
        except (ValueError, ZeroDivisionError, OverflowError):
            continue
        if not (math.isfinite(lhs) and math.isfinite(rhs)):
            continue
        scale = max(1.0, abs(lhs), abs(rhs))
        assert abs(lhs - rhs) <= 1e-9 * scale, (rule.name, env, lhs, rhs)
        valid += 1


def test_rule_count_and_names_unique():
    rules = default_rules()
    names = [r.name for r in rules]
    assert len(names) == len(set(names))
    assert len(rules) >= 40


def test_rule_parsing_rejects_unbound_rhs():
    with pytest.raises(RuleParseError):
        parse_rule("bad: ?a => ?b")


def test_rule_parsing_rejects_free_identifiers():
    with pytest.raises(RuleParseError):
        parse_rule("bad: x + 0 => x")


def test_guard_syntax():
    rule = parse_rule("r: ?a / ?a => 1 if nonzero(?a)")
    assert rule.guard is not None
    assert rule.guard_text == "nonzero(?a)"


def test_guarded_rule_requires_constant_witness():
    """x/x rewrites only when the class has a known nonzero value."""
    from quditforge.egraph import extract_shared, saturate
    from quditforge.symbolic import scalar as sc
    from quditforge.symbolic.scalar import div, var, raw_node

    # Symbolic x/x: no constant witness, must NOT collapse to 1.
    graph = saturate([div(var(0), var(0))], default_rules())
    dag = extract_shared(graph, graph.roots)
    assert dag.nodes[dag.roots[0]].op == sc.DIV

    # (2x)/(2x) with x bound to a constant: witness present, collapses.
    two_x = raw_node(sc.MUL, (raw_node(sc.CONST, value=2.0), raw_node(sc.CONST, value=3.0)))
    graph = saturate([raw_node(sc.DIV, (two_x, two_x))], default_rules())
    dag = extract_shared(graph, graph.roots)
    node = dag.nodes[dag.roots[0]]
    assert node.op == sc.CONST and node.value == 1.0
