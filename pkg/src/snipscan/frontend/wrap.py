"""Completion of partial snippets into compilable units.

Forum snippets come in three shapes: complete classes, bare methods,
and bare statement lists. The latter two are wrapped in a synthetic
``class Snippet`` (and ``void snippetBody()`` for statements) so one
front end handles everything. Complete classes pass through unchanged.
"""

from __future__ import annotations

import re

from ..lexing import loose_tokens, strip_comments

__all__ = ["wrap_partial"]

_TYPE_DECL_KEYWORDS = {"class", "interface", "enum"}
_NON_METHOD_HEADS = {
    "if", "while", "for", "switch", "catch", "do", "try", "return",
    "new", "throw", "else", "synchronized", "assert",
}

_IMPORT_LINE_RE = re.compile(r"^\s*(package|import)\s+[\w.*\s]+;", re.MULTILINE)


def _has_top_level_type_decl(toks) -> bool:
    depth = 0
    for t in toks:
        if t.kind == "punct":
            if t.text == "{":
                depth += 1
            elif t.text == "}":
                depth = max(0, depth - 1)
        elif t.kind == "ident" and depth == 0 and t.text in _TYPE_DECL_KEYWORDS:
            return True
    return False


def _has_top_level_method_decl(toks) -> bool:
    """A ``Type name(...)... {`` sequence at depth 0 reads as a method
    header (covers ``void m(...) {``, ``public boolean verify(...) {``
    and array returns like ``byte[] encrypt(...) {``)."""
    depth = 0
    i = 0
    n = len(toks)
    while i < n:
        t = toks[i]
        if t.kind == "punct":
            if t.text == "{":
                depth += 1
            elif t.text == "}":
                depth = max(0, depth - 1)
            i += 1
            continue
        if (
            depth == 0
            and t.kind == "ident"
            and t.text not in _NON_METHOD_HEADS
        ):
            j = i + 1
            # array brackets may sit between type and name: byte[] m(
            while j + 1 < n and toks[j].kind == "punct" and toks[j].text == "[" \
                    and toks[j + 1].text == "]":
                j += 2
            if not (
                j < n
                and toks[j].kind == "ident"
                and toks[j].text not in _NON_METHOD_HEADS
            ):
                i += 1
                continue
            j += 1
            if j < n and toks[j].kind == "punct" and toks[j].text == "(":
                pdepth = 0
                while j < n:
                    if toks[j].kind == "punct":
                        if toks[j].text == "(":
                            pdepth += 1
                        elif toks[j].text == ")":
                            pdepth -= 1
                            if pdepth == 0:
                                break
                    j += 1
                j += 1
                if j < n and toks[j].kind == "ident" and toks[j].text == "throws":
                    while j < n and not (toks[j].kind == "punct" and toks[j].text == "{"):
                        j += 1
                if j < n and toks[j].kind == "punct" and toks[j].text == "{":
                    return True
        i += 1
    return False


def wrap_partial(code_text: str) -> str:
    """Return a complete compilation unit for the snippet.

    Complete classes come back byte-identical. Bare methods gain a
    ``class Snippet`` shell; bare statements additionally gain a
    ``void snippetBody()``. Leading package/import lines stay at unit
    level.
    """
    stripped = strip_comments(code_text)
    toks = loose_tokens(stripped)
    if _has_top_level_type_decl(toks):
        return code_text

    headers = []
    body = code_text
    while True:
        m = _IMPORT_LINE_RE.search(body)
        if m is None or body[:m.start()].strip():
            break
        headers.append(m.group(0).strip())
        body = body[m.end():]
    header_text = ("\n".join(headers) + "\n") if headers else ""

    if _has_top_level_method_decl(loose_tokens(strip_comments(body))):
        return f"{header_text}class Snippet {{\n{body}\n}}\n"
    return (
        f"{header_text}class Snippet {{\nvoid snippetBody() {{\n{body}\n}}\n}}\n"
    )
