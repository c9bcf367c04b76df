import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quditforge.qgl import (
    AstDefinition,
    BinaryOp,
    Call,
    Const,
    DimensionMismatchError,
    DuplicateParameterError,
    Matrix,
    Neg,
    NonPowerOfTwoDimensionError,
    NonSquareMatrixError,
    QglSyntaxError,
    RaggedMatrixError,
    ReservedIdentifierError,
    Var,
    check_dimensions,
    format_definition,
    format_expr,
    parse_definition,
    parse_definitions,
    parse_expression,
)
from conftest import U3_SOURCE


def test_u3_definition():
    definition = parse_definition(U3_SOURCE)
    assert definition.name == "U3"
    assert definition.params == ("θ", "ϕ", "λ")
    assert definition.radices is None
    assert isinstance(definition.body, Matrix)
    assert len(definition.body.rows) == 2
    assert len(definition.body.rows[0]) == 2


def test_constant_identity_gate():
    definition = parse_definition("I(){[[1,0],[0,1]]}")
    assert definition.params == ()
    assert definition.body == Matrix(
        ((Const(1.0), Const(0.0)), (Const(0.0), Const(1.0)))
    )


def test_ragged_matrix():
    with pytest.raises(RaggedMatrixError):
        parse_definition("G(θ){[[1,0],[0]]}")


def test_non_square_matrix():
    with pytest.raises(NonSquareMatrixError):
        parse_definition("G(){[[1,0,0],[0,1,0]]}")


def test_scalar_body_rejected():
    with pytest.raises(NonSquareMatrixError):
        parse_definition("G(x){x}")


def test_duplicate_parameter():
    with pytest.raises(DuplicateParameterError):
        parse_definition("G(a, a){[[1,0],[0,1]]}")


@pytest.mark.parametrize("name", ["i", "e", "pi", "π"])
def test_reserved_parameter_names(name):
    with pytest.raises(ReservedIdentifierError):
        parse_definition(f"G({name}){{[[1,0],[0,1]]}}")


def test_trailing_semicolon_optional():
    with_semi = parse_definition("I(){[[1,0],[0,1]]};")
    without = parse_definition("I(){[[1,0],[0,1]]}")
    assert with_semi == without


def test_trailing_commas():
    definition = parse_definition("I(){[[1, 0,], [0, 1,],]}")
    assert len(definition.body.rows) == 2


def test_precedence_add_mul():
    assert parse_expression("a+b*c") == parse_expression("a+(b*c)")


def test_precedence_tilde_binds_term():
    # ~ negates the whole term: ~a*b == ~(a*b), not (~a)*b... which is equal
    # numerically but must be distinct structurally.
    assert parse_expression("~a*b") == Neg(BinaryOp("*", Var("a"), Var("b")))
    assert parse_expression("(~a)*b") == BinaryOp("*", Neg(Var("a")), Var("b"))


def test_caret_right_associative():
    assert parse_expression("a^b^c") == BinaryOp(
        "^", Var("a"), BinaryOp("^", Var("b"), Var("c"))
    )


def test_minus_is_binary_only():
    with pytest.raises(QglSyntaxError):
        parse_expression("-a")


def test_unknown_function():
    with pytest.raises(QglSyntaxError):
        parse_expression("frob(x)")


def test_function_arity():
    with pytest.raises(QglSyntaxError):
        parse_expression("sin(a, b)")


def test_error_carries_position():
    with pytest.raises(QglSyntaxError) as info:
        parse_definition("G(a){\n[[1,)]]}")
    assert info.value.line == 2


def test_multiple_definitions():
    defs = parse_definitions("A(){[[1,0],[0,1]]}; B(x){[[1,0],[0,e^(i*x)]]}")
    assert [d.name for d in defs] == ["A", "B"]


def test_one_definition_per_parse():
    with pytest.raises(QglSyntaxError):
        parse_definition("A(){[[1,0],[0,1]]} B(){[[1,0],[0,1]]}")


# -- dimension checking ----------------------------------------------------


def test_u3_infers_qubit():
    assert check_dimensions(parse_definition(U3_SOURCE)) == (2,)


def test_declared_radices_qubit_qutrit():
    rows = ", ".join(
        "[" + ", ".join("1" if r == c else "0" for c in range(6)) + "]"
        for r in range(6)
    )
    definition = parse_definition(f"G<2, 3>(){{[{rows}]}}")
    assert check_dimensions(definition) == (2, 3)


def test_declared_radices_mismatch():
    with pytest.raises(DimensionMismatchError):
        check_dimensions(parse_definition("G<2, 3>(){[[1,0],[0,1]]}"))


def test_three_by_three_needs_radices():
    src = "G(){[[1,0,0],[0,1,0],[0,0,1]]}"
    with pytest.raises(NonPowerOfTwoDimensionError):
        check_dimensions(parse_definition(src))


def test_eight_dim_infers_three_qubits():
    rows = ", ".join(
        "[" + ", ".join("1" if r == c else "0" for c in range(8)) + "]"
        for r in range(8)
    )
    assert check_dimensions(parse_definition(f"G(){{[{rows}]}}")) == (2, 2, 2)


def test_matrix_product_shapes_checked():
    # A 2x2 times 2x2 matrix product is still a valid square body.
    definition = parse_definition("G(x){[[0,1],[1,0]] * [[1,0],[0,e^(i*x)]]}")
    assert check_dimensions(definition) == (2,)


# -- pretty-printer round trip ----------------------------------------------

_NAMES = st.sampled_from(["a", "b", "θ", "x2"])


def _exprs(depth):
    scalar = st.one_of(
        _NAMES.map(Var),
        st.integers(0, 9).map(lambda v: Const(float(v))),
        st.floats(0.0, 100.0, allow_nan=False).map(
            lambda v: Const(float(f"{v:.4f}"))
        ),
    )
    if depth == 0:
        return scalar
    sub = _exprs(depth - 1)
    return st.one_of(
        scalar,
        st.tuples(st.sampled_from("+-*/^"), sub, sub).map(
            lambda t: BinaryOp(t[0], t[1], t[2])
        ),
        sub.map(Neg),
        st.tuples(st.sampled_from(sorted(["sin", "cos", "tan", "exp", "ln", "sqrt"])), sub).map(
            lambda t: Call(t[0], t[1])
        ),
    )


@settings(max_examples=300, deadline=None)
@given(_exprs(4))
def test_print_parse_round_trip(expr):
    assert parse_expression(format_expr(expr)) == expr


def test_definition_round_trip():
    definition = parse_definition(U3_SOURCE)
    assert parse_definition(format_definition(definition)) == definition


def test_definition_round_trip_with_radices():
    src = "G<3>(a){[[1,0,0],[0,e^(i*a),0],[0,0,1]]}"
    definition = parse_definition(src)
    assert parse_definition(format_definition(definition)) == definition


# -- grammar production coverage ---------------------------------------------

PRODUCTION_WITNESSES = [
    "G(a){[[a,0],[0,1]]}",  # definition + varlist
    "G<2>(){[[1,0],[0,1]]}",  # radices
    "G(a,b){[[a+b-a,0],[0,1]]}",  # expression: +,-
    "G(a){[[~a*a/a,0],[0,1]]}",  # term: ~, *, /
    "G(a){[[a^2,0],[0,1]]}",  # factor: ^
    "G(a){[[sin(a),0],[0,1]]}",  # function
    "G(a){[[(a),0],[0,1]]}",  # parenthesized expression
    "G(a){[[1.5,0],[0,1]]}",  # constant
    "G(a){[[a,0],[0,1],]}",  # matrix with trailing comma + rows
]


@pytest.mark.parametrize("source", PRODUCTION_WITNESSES)
def test_every_production_reachable(source):
    definition = parse_definition(source)
    assert isinstance(definition, AstDefinition)
