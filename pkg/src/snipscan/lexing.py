"""Shared lexical utilities for Java-like snippet text.

Two scanners live here. ``strip_comments`` is lenient: forum snippets mix
code with prose, so it must never raise. ``java_tokens`` is the strict
scanner used by the compiler frontend and raises :class:`LexError` on
input it cannot tokenize.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

__all__ = [
    "LexError",
    "Token",
    "java_tokens",
    "loose_tokens",
    "simple_tokens",
    "strip_comments",
]


class LexError(ValueError):
    """Raised by the strict scanner on untokenizable input."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (offset {pos})")
        self.pos = pos


@dataclass(frozen=True)
class Token:
    kind: str  # ident | number | string | char | punct
    text: str
    pos: int


# Longest first so the strict scanner is greedy.
_OPERATORS = [
    ">>>=", "<<<=", ">>>", "<<=", ">>=", "...",
    "==", "!=", "<=", ">=", "&&", "||", "++", "--",
    "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=",
    "<<", ">>", "->", "::",
]
_SINGLE = set("+-*/%=<>!&|^~?:;,.(){}[]@")

_IDENT_RE = re.compile(r"[A-Za-z_$][A-Za-z0-9_$]*")
_NUMBER_RE = re.compile(
    r"0[xX][0-9a-fA-F]+[lL]?"
    r"|\d+\.\d*(?:[eE][+-]?\d+)?[fFdD]?"
    r"|\.\d+(?:[eE][+-]?\d+)?[fFdD]?"
    r"|\d+(?:[eE][+-]?\d+)?[fFdDlL]?"
)


def _scan_string(text: str, i: int, quote: str) -> int:
    """Return the index one past the closing quote, or -1 if unterminated
    before end of line."""
    j = i + 1
    n = len(text)
    while j < n:
        c = text[j]
        if c == "\\":
            j += 2
            continue
        if c == quote:
            return j + 1
        if c == "\n":
            return -1
        j += 1
    return -1


def strip_comments(text: str) -> str:
    """Blank out ``//`` and ``/* */`` comments, preserving offsets.

    Comment bytes become spaces (newlines kept) so positions of the
    surviving code are unchanged. String literals are respected; an
    apostrophe is only treated as a char literal when a closing quote
    follows within a plausible distance, which keeps prose like
    "don't" from eating the rest of the line.
    """
    out = list(text)
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c == '"':
            end = _scan_string(text, i, '"')
            i = end if end != -1 else i + 1
            continue
        if c == "'":
            end = _scan_string(text, i, "'")
            # Longest valid char literal is a unicode escape, 8 chars total.
            if end != -1 and end - i <= 8:
                i = end
            else:
                i += 1
            continue
        if c == "/" and i + 1 < n:
            nxt = text[i + 1]
            if nxt == "/":
                j = i
                while j < n and text[j] != "\n":
                    out[j] = " "
                    j += 1
                i = j
                continue
            if nxt == "*":
                j = i
                close = text.find("*/", i + 2)
                stop = n if close == -1 else close + 2
                while j < stop:
                    if text[j] != "\n":
                        out[j] = " "
                    j += 1
                i = stop
                continue
        i += 1
    return "".join(out)


def simple_tokens(text: str) -> list[str]:
    """Word/punctuation tokens over raw text: maximal ``[A-Za-z0-9_$]``
    runs, every other non-whitespace character on its own."""
    return re.findall(r"[A-Za-z0-9_$]+|[^\sA-Za-z0-9_$]", text)


def _tokens(text: str, strict: bool) -> list[Token]:
    toks: list[Token] = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c == '"' or c == "'":
            end = _scan_string(text, i, c)
            if end == -1:
                if strict:
                    raise LexError("unterminated string literal", i)
                i += 1
                continue
            toks.append(Token("string" if c == '"' else "char", text[i:end], i))
            i = end
            continue
        m = _IDENT_RE.match(text, i)
        if m:
            toks.append(Token("ident", m.group(), i))
            i = m.end()
            continue
        m = _NUMBER_RE.match(text, i)
        if m:
            toks.append(Token("number", m.group(), i))
            i = m.end()
            continue
        matched = False
        for op in _OPERATORS:
            if text.startswith(op, i):
                toks.append(Token("punct", op, i))
                i += len(op)
                matched = True
                break
        if matched:
            continue
        if c in _SINGLE:
            toks.append(Token("punct", c, i))
            i += 1
            continue
        if strict:
            raise LexError(f"unexpected character {c!r}", i)
        i += 1
    return toks


def java_tokens(text: str) -> list[Token]:
    """Strict token stream for the compiler frontend.

    Expects comment-free input (callers run ``strip_comments`` first).
    """
    return _tokens(text, strict=True)


def loose_tokens(text: str) -> list[Token]:
    """Best-effort token stream: unknown characters and unterminated
    literals are skipped instead of raising."""
    return _tokens(text, strict=False)
