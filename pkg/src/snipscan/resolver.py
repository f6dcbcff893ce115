"""Decides whether a snippet is security-related.

Snippet code rarely compiles, so code elements are recovered lexically:
capitalized identifiers in type position, ``Receiver.method()`` chains,
imports and fully qualified references. Each element is then resolved
against the :class:`~snipscan.registry.ApiRegistry` by narrowing the
classes sharing its simple name down to those that support every
observed method. Elements that resolve into a blacklisted package, stay
ambiguous, or are only ever constructed are dropped; a snippet is
security-related when at least one element survives.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .diagnostics import Diagnostics
from .ingest import SnippetRecord
from .lexing import Token, loose_tokens, strip_comments
from .registry import ApiRegistry

__all__ = [
    "ElementKind",
    "LexedElement",
    "ResolvedElement",
    "SecurityScreen",
    "is_security_related",
    "lex_elements",
    "resolve",
]

_KEYWORDS = {
    "abstract", "assert", "boolean", "break", "byte", "case", "catch", "char",
    "class", "const", "continue", "default", "do", "double", "else", "enum",
    "extends", "final", "finally", "float", "for", "goto", "if", "implements",
    "import", "instanceof", "int", "interface", "long", "native", "new",
    "package", "private", "protected", "public", "return", "short", "static",
    "strictfp", "super", "switch", "synchronized", "this", "throw", "throws",
    "transient", "try", "void", "volatile", "while", "true", "false", "null",
    "String", "Object", "Integer", "Boolean", "Byte", "Long", "Double",
    "Float", "Character", "Short", "System", "Math", "Exception", "Thread",
}


class ElementKind(str, Enum):
    TYPE_REF = "TypeRef"
    METHOD_CALL = "MethodCall"
    FIELD_ACCESS = "FieldAccess"


@dataclass
class LexedElement:
    simple_name: str
    observed_methods: set[str] = field(default_factory=set)
    observed_fields: set[str] = field(default_factory=set)
    explicit_package: str | None = None
    kinds: set[ElementKind] = field(default_factory=set)


@dataclass(frozen=True)
class ResolvedElement:
    simple_name: str
    resolved_fqn: str
    kind: ElementKind
    observed_methods: frozenset[str]


@dataclass(frozen=True)
class SecurityScreen:
    related: bool
    resolved: tuple[ResolvedElement, ...]


def _is_type_name(tok: Token) -> bool:
    return tok.kind == "ident" and tok.text[0].isupper() and tok.text not in _KEYWORDS


class _Scan:
    """Cursor helpers over a loose token list."""

    def __init__(self, toks: list[Token]):
        self.toks = toks

    def at(self, i: int) -> Token | None:
        return self.toks[i] if 0 <= i < len(self.toks) else None

    def is_punct(self, i: int, text: str) -> bool:
        t = self.at(i)
        return t is not None and t.kind == "punct" and t.text == text

    def is_ident(self, i: int, text: str | None = None) -> bool:
        t = self.at(i)
        return t is not None and t.kind == "ident" and (text is None or t.text == text)

    def skip_generics(self, i: int) -> int:
        """If a ``<...>`` type-argument group starts at i, skip past it."""
        if not self.is_punct(i, "<"):
            return i
        depth = 0
        j = i
        while j < len(self.toks):
            t = self.toks[j]
            if t.kind == "punct":
                if t.text == "<":
                    depth += 1
                elif t.text in (">", ">>", ">>>"):
                    depth -= t.text.count(">")
                    if depth <= 0:
                        return j + 1
                elif t.text in (";", "{", "}", ")"):
                    return i  # not generics after all
            j += 1
        return i

    def skip_array_suffix(self, i: int) -> int:
        while self.is_punct(i, "[") and self.is_punct(i + 1, "]"):
            i += 2
        return i

    def matching_brace(self, i: int) -> int:
        """Index of the ``}`` matching the ``{`` at i, or len(toks)."""
        depth = 0
        j = i
        while j < len(self.toks):
            if self.is_punct(j, "{"):
                depth += 1
            elif self.is_punct(j, "}"):
                depth -= 1
                if depth == 0:
                    return j
            j += 1
        return len(self.toks)


def lex_elements(code_text: str) -> list[LexedElement]:
    """Best-effort recovery of type elements and their used methods.

    Comments are stripped first. Tolerates arbitrary junk around the
    code; never raises.
    """
    toks = loose_tokens(strip_comments(code_text))
    scan = _Scan(toks)
    elements: dict[str, LexedElement] = {}
    var_types: dict[str, str] = {}

    def elem(name: str) -> LexedElement:
        if name not in elements:
            elements[name] = LexedElement(simple_name=name)
        return elements[name]

    def note_type(name: str) -> None:
        elem(name).kinds.add(ElementKind.TYPE_REF)

    i = 0
    n = len(toks)
    while i < n:
        t = toks[i]

        # import [static] a.b.C; / import a.b.*;
        if t.kind == "ident" and t.text == "import":
            j = i + 1
            if scan.is_ident(j, "static"):
                j += 1
            parts: list[str] = []
            wildcard = False
            while j < n:
                tj = toks[j]
                if tj.kind == "ident":
                    parts.append(tj.text)
                    j += 1
                elif tj.kind == "punct" and tj.text == ".":
                    j += 1
                elif tj.kind == "punct" and tj.text == "*":
                    wildcard = True
                    j += 1
                else:
                    break
            if parts and not wildcard and parts[-1][0].isupper():
                e = elem(parts[-1])
                e.explicit_package = ".".join(parts[:-1]) or None
                e.kinds.add(ElementKind.TYPE_REF)
            i = j
            continue

        # extends/implements T1, T2: attribute overridden methods below.
        if t.kind == "ident" and t.text in ("extends", "implements"):
            j = i + 1
            supertypes = []
            while j < n:
                tj = toks[j]
                if tj.kind == "ident" and _is_type_name(tj):
                    supertypes.append(tj.text)
                    note_type(tj.text)
                    j = scan.skip_generics(j + 1)
                    if scan.is_punct(j, ","):
                        j += 1
                        continue
                    if scan.is_ident(j, "implements") or scan.is_ident(j, "extends"):
                        j += 1
                        continue
                    break
                else:
                    break
            if scan.is_punct(j, "{"):
                _attribute_overrides(scan, j, supertypes, elem)
            i = j
            continue

        # new T(...)  /  new T(...) { anonymous body }  /  new T[...]
        if t.kind == "ident" and t.text == "new":
            j = i + 1
            qual_parts = []
            while scan.is_ident(j) and scan.is_punct(j + 1, "."):
                qual_parts.append(toks[j].text)
                j += 2
            if j < n and _is_type_name(toks[j]):
                tname = toks[j].text
                e = elem(tname)
                e.kinds.add(ElementKind.TYPE_REF)
                if qual_parts and all(p[0].islower() for p in qual_parts):
                    e.explicit_package = ".".join(qual_parts)
                j = scan.skip_generics(j + 1)
                if scan.is_punct(j, "("):
                    e.observed_methods.add("<init>")
                    e.kinds.add(ElementKind.METHOD_CALL)
                    depth = 0
                    while j < n:
                        if scan.is_punct(j, "("):
                            depth += 1
                        elif scan.is_punct(j, ")"):
                            depth -= 1
                            if depth == 0:
                                break
                        j += 1
                    j += 1
                    if scan.is_punct(j, "{"):
                        _attribute_overrides(scan, j, [tname], elem)
            i = j
            continue

        if t.kind == "ident" and not _is_type_name(t) and t.text not in _KEYWORDS:
            # var.method(...) via declared type
            if scan.is_punct(i + 1, ".") and scan.is_ident(i + 2):
                vtype = var_types.get(t.text)
                if vtype is not None and scan.is_punct(i + 3, "("):
                    e = elem(vtype)
                    e.observed_methods.add(toks[i + 2].text)
                    e.kinds.add(ElementKind.METHOD_CALL)
                    i += 3
                    continue
                # qualified reference pkg.sub.Type.member
                if t.text[0].islower() and vtype is None:
                    j = i
                    parts = []
                    while (
                        scan.is_ident(j)
                        and toks[j].text[0].islower()
                        and scan.is_punct(j + 1, ".")
                    ):
                        parts.append(toks[j].text)
                        j += 2
                    if (
                        scan.is_ident(j)
                        and _is_type_name(toks[j])
                        and parts
                    ):
                        e = elem(toks[j].text)
                        e.explicit_package = ".".join(parts)
                        e.kinds.add(ElementKind.TYPE_REF)
                        if scan.is_punct(j + 1, ".") and scan.is_ident(j + 2):
                            member = toks[j + 2].text
                            if scan.is_punct(j + 3, "("):
                                e.observed_methods.add(member)
                                e.kinds.add(ElementKind.METHOD_CALL)
                            else:
                                e.observed_fields.add(member)
                                e.kinds.add(ElementKind.FIELD_ACCESS)
                            i = j + 3
                            continue
                        i = j + 1
                        continue
            i += 1
            continue

        if _is_type_name(t):
            name = t.text
            # Type.method(...) or Type.FIELD
            if scan.is_punct(i + 1, ".") and scan.is_ident(i + 2):
                member = toks[i + 2].text
                e = elem(name)
                if scan.is_punct(i + 3, "("):
                    e.observed_methods.add(member)
                    e.kinds.add(ElementKind.METHOD_CALL)
                else:
                    e.observed_fields.add(member)
                    e.kinds.add(ElementKind.FIELD_ACCESS)
                i += 3
                continue
            # Type ident reads as a declaration (also Type<..>, Type[])
            j = scan.skip_generics(i + 1)
            j = scan.skip_array_suffix(j)
            tj = scan.at(j)
            if (
                tj is not None
                and tj.kind == "ident"
                and tj.text not in _KEYWORDS
                and not tj.text[0].isupper()
            ):
                after = scan.at(j + 1)
                if after is not None and after.kind == "punct" and after.text in ("=", ";", ",", ")", ":"):
                    note_type(name)
                    var_types[tj.text] = name
                    i = j + 1
                    continue
            note_type(name)
            i += 1
            continue

        i += 1

    return sorted(elements.values(), key=lambda e: e.simple_name)


def _attribute_overrides(scan: _Scan, brace_idx: int, supertypes: list[str], elem) -> None:
    """Record method declarations inside a class body as observed methods
    of the supertype(s). Registry-unknown names are attributed anyway;
    resolution later keeps only names the candidate class supports."""
    end = scan.matching_brace(brace_idx)
    j = brace_idx + 1
    depth = 0
    while j < end:
        if scan.is_punct(j, "{"):
            depth += 1
        elif scan.is_punct(j, "}"):
            depth -= 1
        elif (
            depth == 0
            and scan.is_ident(j)
            and not scan.toks[j].text[0].isupper()
            and scan.toks[j].text not in _KEYWORDS
            and scan.is_punct(j + 1, "(")
        ):
            # method declaration iff the matching ')' is followed by
            # '{' or 'throws'
            k = j + 1
            pdepth = 0
            while k < end:
                if scan.is_punct(k, "("):
                    pdepth += 1
                elif scan.is_punct(k, ")"):
                    pdepth -= 1
                    if pdepth == 0:
                        break
                k += 1
            if scan.is_punct(k + 1, "{") or scan.is_ident(k + 1, "throws"):
                for s in supertypes:
                    elem(s).observed_methods.add(scan.toks[j].text)
        j += 1


def resolve(
    elements: list[LexedElement],
    registry: ApiRegistry,
    diagnostics: Diagnostics | None = None,
) -> list[ResolvedElement]:
    """Constraint-narrow each element to a unique registry class.

    An element survives when exactly one candidate class supports every
    observed method, the class's package is not blacklisted, and at
    least one non-constructor method was actually used.
    """
    diag = diagnostics if diagnostics is not None else Diagnostics()
    out: list[ResolvedElement] = []
    for e in sorted(elements, key=lambda x: x.simple_name):
        if e.explicit_package is not None:
            cls = registry.by_fqn(f"{e.explicit_package}.{e.simple_name}")
            candidates = [cls] if cls is not None else []
        else:
            candidates = registry.candidates(e.simple_name)
        needed = e.observed_methods - {"<init>"}
        candidates = [c for c in candidates if needed <= c.methods]
        if not candidates:
            diag.bump("unresolved")
            continue
        if len(candidates) > 1:
            diag.bump("ambiguous")
            continue
        cls = candidates[0]
        if e.observed_methods <= {"<init>"}:
            diag.bump("init_only")
            continue
        if not cls.security or registry.is_blacklisted(cls.package):
            diag.bump("blacklisted")
            continue
        if ElementKind.METHOD_CALL in e.kinds:
            kind = ElementKind.METHOD_CALL
        elif ElementKind.FIELD_ACCESS in e.kinds:
            kind = ElementKind.FIELD_ACCESS
        else:
            kind = ElementKind.TYPE_REF
        out.append(
            ResolvedElement(
                simple_name=e.simple_name,
                resolved_fqn=cls.fqn,
                kind=kind,
                observed_methods=frozenset(e.observed_methods),
            )
        )
    return out


def is_security_related(
    snippet: SnippetRecord,
    registry: ApiRegistry,
    diagnostics: Diagnostics | None = None,
) -> SecurityScreen:
    """A snippet is security-related iff resolution yields a non-empty
    element set after the blacklist and constructor-only filters."""
    resolved = resolve(lex_elements(snippet.code_text), registry, diagnostics)
    return SecurityScreen(related=bool(resolved), resolved=tuple(resolved))
