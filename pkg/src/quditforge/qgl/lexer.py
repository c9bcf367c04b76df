"""Tokenizer for QGL source text.

Identifiers may use any Unicode letters, so Greek parameter names lex the
same as ASCII ones. Numeric literals are unsigned decimals with an
optional fraction part; there is no exponent suffix. `//` starts a line
comment. Pattern mode additionally lexes `?name` wildcards, used by the
rewrite-rule file format, and the `=>` arrow.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from quditforge.qgl.errors import MalformedNumberError, UnknownCharacterError


class TokenKind(Enum):
    IDENT = "ident"
    NUMBER = "number"
    PATTERN_VAR = "pattern_var"
    ARROW = "=>"
    LPAREN = "("
    RPAREN = ")"
    LBRACE = "{"
    RBRACE = "}"
    LBRACKET = "["
    RBRACKET = "]"
    LANGLE = "<"
    RANGLE = ">"
    COMMA = ","
    SEMICOLON = ";"
    PLUS = "+"
    MINUS = "-"
    STAR = "*"
    SLASH = "/"
    CARET = "^"
    TILDE = "~"
    EOF = "eof"


_PUNCT = {
    "(": TokenKind.LPAREN,
    ")": TokenKind.RPAREN,
    "{": TokenKind.LBRACE,
    "}": TokenKind.RBRACE,
    "[": TokenKind.LBRACKET,
    "]": TokenKind.RBRACKET,
    "<": TokenKind.LANGLE,
    ">": TokenKind.RANGLE,
    ",": TokenKind.COMMA,
    ";": TokenKind.SEMICOLON,
    "+": TokenKind.PLUS,
    "-": TokenKind.MINUS,
    "*": TokenKind.STAR,
    "/": TokenKind.SLASH,
    "^": TokenKind.CARET,
    "~": TokenKind.TILDE,
}


@dataclass(frozen=True, slots=True)
class Token:
    kind: TokenKind
    text: str
    line: int
    col: int
    offset: int


def _is_ident_start(ch: str) -> bool:
    return ch.isalpha() or ch == "_"


def _is_ident_part(ch: str) -> bool:
    return ch.isalpha() or ch.isdigit() or ch == "_"


def tokenize(source: str, pattern_mode: bool = False) -> list[Token]:
    """Split QGL source into tokens, ending with an EOF token."""
    tokens: list[Token] = []
    i = 0
    line = 1
    col = 1
    n = len(source)

    def advance(k: int) -> None:
        nonlocal i, line, col
        for _ in range(k):
            if source[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        ch = source[i]
        if ch in " \t\r\n":
            advance(1)
            continue
        if ch == "/" and i + 1 < n and source[i + 1] == "/":
            while i < n and source[i] != "\n":
                advance(1)
            continue
        start_line, start_col, start_off = line, col, i
        if pattern_mode and ch == "=" and i + 1 < n and source[i + 1] == ">":
            tokens.append(Token(TokenKind.ARROW, "=>", start_line, start_col, start_off))
            advance(2)
            continue
        if pattern_mode and ch == "?":
            j = i + 1
            if j >= n or not _is_ident_start(source[j]):
                raise UnknownCharacterError(
                    "'?' must be followed by a pattern variable name",
                    start_line,
                    start_col,
                    start_off,
                )
            while j < n and _is_ident_part(source[j]):
                j += 1
            text = source[i:j]
            tokens.append(Token(TokenKind.PATTERN_VAR, text, start_line, start_col, start_off))
            advance(j - i)
            continue
        if ch.isdigit():
            j = i
            while j < n and source[j].isdigit():
                j += 1
            if j < n and source[j] == ".":
                j += 1
                if j >= n or not source[j].isdigit():
                    raise MalformedNumberError(
                        "expected digits after decimal point",
                        start_line,
                        start_col,
                        start_off,
                    )
                while j < n and source[j].isdigit():
                    j += 1
            text = source[i:j]
            tokens.append(Token(TokenKind.NUMBER, text, start_line, start_col, start_off))
            advance(j - i)
            continue
        if _is_ident_start(ch):
            j = i
            while j < n and _is_ident_part(source[j]):
                j += 1
            text = source[i:j]
            tokens.append(Token(TokenKind.IDENT, text, start_line, start_col, start_off))
            advance(j - i)
            continue
        kind = _PUNCT.get(ch)
        if kind is None:
            raise UnknownCharacterError(
                f"unknown character {ch!r} (byte offset {start_off})",
                start_line,
                start_col,
                start_off,
            )
        tokens.append(Token(kind, ch, start_line, start_col, start_off))
        advance(1)

    tokens.append(Token(TokenKind.EOF, "", line, col, i))
    return tokens
