import math

import numpy as np
import pytest

from quditforge.qgl import parse_definition, parse_expression
from quditforge.symbolic import (
    UnsupportedComplexFormError,
    eval_reference,
    lower,
)
from quditforge.symbolic import scalar as sc
from quditforge.symbolic.lowering import lower_expression
from quditforge.symbolic.scalar import eval_scalar, iter_nodes

from conftest import U3_SOURCE
from oracle import eval_ast_complex


def lower1(source, params=()):
    """Lower a bare scalar expression against a parameter list."""
    return lower_expression(parse_expression(source), tuple(params))


def test_u3_element_01_structure():
    u = lower(parse_definition(U3_SOURCE))
    re, im = u.body[0][1]
    # ~e^(i*λ)*sin(θ/2) -> re = -(cos λ · sin θ/2), im = -(sin λ · sin θ/2)
    assert re.kind == sc.NEG and im.kind == sc.NEG
    assert re.args[0].kind == sc.MUL
    assert re.args[0].args[0].kind == sc.COS
    assert re.args[0].args[1].kind == sc.SIN
    point = [0.8, -0.3, 1.7]
    assert eval_scalar(re, point) == pytest.approx(
        -math.cos(1.7) * math.sin(0.4), abs=1e-15
    )
    assert eval_scalar(im, point) == pytest.approx(
        -math.sin(1.7) * math.sin(0.4), abs=1e-15
    )


def test_euler_formula():
    c = lower1("e^(i*ϕ)", ["ϕ"])
    assert c.re.kind == sc.COS
    assert c.im.kind == sc.SIN


def test_complex_log_rejected():
    with pytest.raises(UnsupportedComplexFormError):
        lower1("ln(i*θ)", ["θ"])


def test_complex_sin_rejected():
    with pytest.raises(UnsupportedComplexFormError):
        lower1("sin(i*x)", ["x"])


def test_complex_power_requires_integer_exponent():
    with pytest.raises(UnsupportedComplexFormError):
        lower1("(i*x)^0.5", ["x"])


def test_complex_integer_power_expands():
    c = lower1("(1 + i*x)^2", ["x"])
    # (1+ix)^2 = 1-x^2 + 2ix
    assert eval_scalar(c.re, [3.0]) == pytest.approx(-8.0)
    assert eval_scalar(c.im, [3.0]) == pytest.approx(6.0)


def test_negative_integer_power():
    c = lower1("(i*x)^(0-2)", ["x"])
    # (ix)^-2 = -1/x^2
    assert eval_scalar(c.re, [2.0]) == pytest.approx(-0.25)
    assert eval_scalar(c.im, [2.0]) == pytest.approx(0.0)


def test_tan_canonicalized_to_sin_cos():
    c = lower1("tan(x)", ["x"])
    assert c.re.kind == sc.DIV
    assert c.re.args[0].kind == sc.SIN
    assert c.re.args[1].kind == sc.COS
    u = lower(parse_definition("G(x){[[tan(x),0],[0,1]]}"))
    kinds = {n.kind for n in iter_nodes(u.scalars())}
    assert "tan" not in kinds


def test_real_pow_kept():
    c = lower1("x^y", ["x", "y"])
    assert c.re.kind == sc.POW


def test_pi_and_e_constants():
    c = lower1("pi")
    assert c.re is sc.PI_NODE
    c = lower1("π")
    assert c.re is sc.PI_NODE
    c = lower1("e")
    assert c.re.kind == sc.CONST and c.re.value == math.e


def test_constant_folding():
    assert lower1("2*3 + 1").re.value == 7.0
    assert lower1("1/sqrt(2)").re.value == pytest.approx(1 / math.sqrt(2))
    c = lower1("x*1 + 0", ["x"])
    assert c.re.kind == sc.VAR


def test_scalar_times_matrix():
    u = lower(parse_definition("H(){ (1/sqrt(2)) * [[1,1],[1,~1]] }"))
    h = eval_reference(u, [])
    expected = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    assert np.abs(h - expected).max() < 1e-15


def test_matrix_product_in_body():
    u = lower(parse_definition("G(x){[[0,1],[1,0]] * [[1,0],[0,e^(i*x)]]}"))
    got = eval_reference(u, [0.3])
    expected = np.array([[0, 1], [1, 0]]) @ np.diag([1, np.exp(0.3j)])
    assert np.abs(got - expected).max() < 1e-15


def test_division_by_matrix_rejected():
    # The definition checker rejects it at parse time; bare lowering of the
    # expression reports the missing closed form.
    from quditforge.qgl import NonSquareMatrixError

    with pytest.raises(NonSquareMatrixError):
        parse_definition("G(){[[1,0],[0,1]] / [[1,0],[0,1]]}")
    with pytest.raises(UnsupportedComplexFormError):
        lower1("[[1,0],[0,1]] / [[1,0],[0,1]]")


LOWERING_CASES = [
    ("cos(θ/2)", ["θ"]),
    ("~e^(i*λ)*sin(θ/2)", ["θ", "λ"]),
    ("e^(i*(ϕ + λ))*cos(θ/2)", ["θ", "ϕ", "λ"]),
    ("tan(x/4) + sqrt(x*x)", ["x"]),
    ("(1 + i*y)^3 / (2 + i)", ["y"]),
    ("e^(x + i*y)", ["x", "y"]),
    ("ln(exp(x))", ["x"]),
    ("x^2 + 2^x", ["x"]),
    ("sin(pi/2) * x - cos(π)", ["x"]),
]


@pytest.mark.parametrize("source,params", LOWERING_CASES)
def test_lowering_soundness_vs_complex_tree_walk(source, params, rng):
    """lower() agrees with a direct complex AST evaluation at 100 points."""
    ast = parse_expression(source)
    c = lower_expression(ast, tuple(params))
    for _ in range(100):
        point = rng.uniform(0.1, 2.0, size=len(params))
        env = dict(zip(params, point))
        expected = eval_ast_complex(ast, env)
        got = complex(eval_scalar(c.re, point), eval_scalar(c.im, point))
        assert abs(got - expected) < 1e-12
