"""Tokenizer for RCL source text.

Identifiers are lowercase ([a-z][a-z0-9_]*), variables carry a leading '?',
comments run from '#' to end of line, and integers are non-negative
decimals. Unknown characters become error tokens with a span; the parser
turns them into diagnostics, so tokenizing never fails.
"""

from __future__ import annotations

from dataclasses import dataclass

KEYWORD = "keyword"
IDENT = "ident"
INT = "int"
PUNCT = "punct"
VAR = "var"
ERROR = "error"

KEYWORDS = frozenset(
    {
        # declaration heads and structure words
        "kind", "relation", "rule", "chain", "procedure", "trace",
        "step", "event", "by", "requires", "max", "during", "o", "base",
        # category names (also usable as individual-declaration sugar)
        "continuant", "independent", "dependent", "realizable",
        "role", "right", "occurrent", "process", "occurrence",
        "region", "universal", "activity", "state", "person",
    }
)

_TWO_CHAR_PUNCT = ("<:", ":-")
_ONE_CHAR_PUNCT = "(),.:{}[]="


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int
    length: int

    def __post_init__(self) -> None:
        if self.line < 1 or self.column < 1:
            raise ValueError("source positions are 1-based")


@dataclass(frozen=True)
class Token:
    kind: str
    lexeme: str
    span: SourceSpan


def _is_ident_start(ch: str) -> bool:
    return "a" <= ch <= "z"


def _is_ident_char(ch: str) -> bool:
    return "a" <= ch <= "z" or "0" <= ch <= "9" or ch == "_"


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    i = 0
    line = 1
    col = 1
    n = len(source)

    def emit(kind: str, lexeme: str) -> None:
        tokens.append(Token(kind, lexeme, SourceSpan(line, col, len(lexeme))))

    while i < n:
        ch = source[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and source[i] != "\n":
                i += 1
            continue
        if source.startswith(_TWO_CHAR_PUNCT[0], i) or source.startswith(
            _TWO_CHAR_PUNCT[1], i
        ):
            emit(PUNCT, source[i : i + 2])
            i += 2
            col += 2
            continue
        if _is_ident_start(ch):
            j = i + 1
            while j < n and _is_ident_char(source[j]):
                j += 1
            word = source[i:j]
            emit(KEYWORD if word in KEYWORDS else IDENT, word)
            col += j - i
            i = j
            continue
        if ch == "?":
            j = i + 1
            while j < n and _is_ident_char(source[j]):
                j += 1
            word = source[i:j]
            # a bare '?' is not a variable
            emit(VAR if len(word) > 1 and _is_ident_start(word[1]) else ERROR, word)
            col += j - i
            i = j
            continue
        if ch.isdigit():
            j = i + 1
            while j < n and source[j].isdigit():
                j += 1
            emit(INT, source[i:j])
            col += j - i
            i = j
            continue
        if ch in _ONE_CHAR_PUNCT:
            emit(PUNCT, ch)
            i += 1
            col += 1
            continue
        emit(ERROR, ch)
        i += 1
        col += 1
    return tokens
