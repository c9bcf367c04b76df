import pytest

from quditforge.qgl import (
    MalformedNumberError,
    TokenKind,
    UnknownCharacterError,
    tokenize,
)


def kinds(source):
    return [t.kind for t in tokenize(source)[:-1]]


def texts(source):
    return [t.text for t in tokenize(source)[:-1]]


def test_cos_theta_over_two():
    assert kinds("cos(θ/2)") == [
        TokenKind.IDENT,
        TokenKind.LPAREN,
        TokenKind.IDENT,
        TokenKind.SLASH,
        TokenKind.NUMBER,
        TokenKind.RPAREN,
    ]
    assert texts("cos(θ/2)") == ["cos", "(", "θ", "/", "2", ")"]


def test_empty_input():
    assert kinds("") == []


def test_double_radix_point_rejected():
    with pytest.raises(MalformedNumberError):
        tokenize("3..4")


def test_trailing_dot_rejected():
    with pytest.raises(MalformedNumberError):
        tokenize("3.")


def test_unknown_character_reports_offset():
    with pytest.raises(UnknownCharacterError) as info:
        tokenize("ab\n$x")
    assert info.value.line == 2
    assert info.value.col == 1
    assert info.value.offset == 3


def test_comments_and_whitespace_skipped():
    assert texts("a // trailing comment\n + b") == ["a", "+", "b"]


def test_unicode_identifiers():
    assert texts("θ ϕ λ π alpha_2") == ["θ", "ϕ", "λ", "π", "alpha_2"]


def test_numbers():
    assert texts("0 12 3.5 0.25") == ["0", "12", "3.5", "0.25"]


def test_all_operator_terminals():
    source = "( ) { } [ ] < > , ; + - * / ^ ~"
    expected = [
        TokenKind.LPAREN,
        TokenKind.RPAREN,
        TokenKind.LBRACE,
        TokenKind.RBRACE,
        TokenKind.LBRACKET,
        TokenKind.RBRACKET,
        TokenKind.LANGLE,
        TokenKind.RANGLE,
        TokenKind.COMMA,
        TokenKind.SEMICOLON,
        TokenKind.PLUS,
        TokenKind.MINUS,
        TokenKind.STAR,
        TokenKind.SLASH,
        TokenKind.CARET,
        TokenKind.TILDE,
    ]
    assert kinds(source) == expected


def test_pattern_mode_tokens():
    toks = tokenize("?x => ?y", pattern_mode=True)[:-1]
    assert [t.kind for t in toks] == [
        TokenKind.PATTERN_VAR,
        TokenKind.ARROW,
        TokenKind.PATTERN_VAR,
    ]
    assert toks[0].text == "?x"


def test_question_mark_outside_pattern_mode():
    with pytest.raises(UnknownCharacterError):
        tokenize("?x")
