"""Lexical fact extraction for the labeling rules.

Rules match on what is syntactically visible in a snippet: which
crypto calls receive which literal arguments, where key and IV bytes
come from, what overridden validation methods do. Extraction is
token-based and tolerant: snippets that cannot compile still yield
facts. Value provenance follows single-variable assignment chains
(a literal flowing through one or two locals into a constructor), not
real data flow.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum

from .lexing import Token, loose_tokens, strip_comments

__all__ = ["BodyInfo", "CallSite", "Provenance", "ProvKind", "SnippetFacts", "extract_facts"]

_WATCHED_BODIES = {
    "verify", "checkServerTrusted", "checkClientTrusted",
    "getAcceptedIssuers", "onReceivedSslError",
}

_CREDENTIAL_RE = re.compile(
    r"password|passwd|pwd|credential|login|token|pin\b|userid|username|passphrase",
    re.IGNORECASE,
)

_KEY_NAME_RE = re.compile(
    r"(?i)^(raw)?_?(secret|encryption|aes|des)?_?key(_?bytes)?$"
)
_IV_NAME_RE = re.compile(r"(?i)^(raw)?_?iv(_?bytes|_?spec)?$|^init_?vector$")


class ProvKind(str, Enum):
    UNKNOWN = "unknown"
    INT = "int-literal"
    STRING = "string-literal"
    ZEROED = "zeroed-array"
    STATIC = "static-array"
    STRING_BYTES = "string-bytes"
    DIGEST = "digest-of-literal"
    RANDOM = "random"
    GENERATED = "generator"
    PROVIDER = "provider"

    @property
    def is_static_value(self) -> bool:
        return self in (
            ProvKind.INT, ProvKind.STRING, ProvKind.ZEROED,
            ProvKind.STATIC, ProvKind.STRING_BYTES,
        )


@dataclass(frozen=True)
class Provenance:
    kind: ProvKind
    bits: int | None = None  # payload size when statically known
    value: str | None = None  # literal text when applicable


@dataclass
class CallSite:
    pos: int
    receiver_type: str | None  # simple type name when known
    method: str
    args: list[tuple[int, int]]  # token index ranges
    receiver_var: str | None = None
    chained_from: int | None = None  # index into calls list


@dataclass
class BodyInfo:
    name: str
    params_text: str
    tokens: list[Token]
    calls: set[str]
    idents: set[str]

    @property
    def is_empty(self) -> bool:
        return not self.tokens

    @property
    def is_trivial(self) -> bool:
        """Empty, or a single constant return."""
        if self.is_empty:
            return True
        texts = [t.text for t in self.tokens]
        return (
            len(texts) <= 3
            and texts[0] == "return"
            and texts[-1] == ";"
        )

    def returns_constant_true(self) -> bool:
        texts = [t.text for t in self.tokens]
        return texts == ["return", "true", ";"]


@dataclass
class SnippetFacts:
    transformations: list[str] = field(default_factory=list)
    digest_algorithms: list[str] = field(default_factory=list)
    signature_algorithms: list[str] = field(default_factory=list)
    key_factory_algorithms: list[str] = field(default_factory=list)
    mac_algorithms: list[str] = field(default_factory=list)
    protocols: list[str] = field(default_factory=list)
    cipher_suites: list[str] = field(default_factory=list)
    keypair_sizes: list[tuple[str, int]] = field(default_factory=list)  # (alg, bits)
    ec_curves: list[str] = field(default_factory=list)
    key_sources: list[Provenance] = field(default_factory=list)
    iv_sources: list[Provenance] = field(default_factory=list)
    pbe_specs: list[dict] = field(default_factory=list)
    rng_events: list[tuple[int, str, str, Provenance | None]] = field(default_factory=list)
    bodies: dict[str, list[BodyInfo]] = field(default_factory=dict)
    used_types: set[str] = field(default_factory=set)
    used_fields: set[str] = field(default_factory=set)
    called_methods: set[str] = field(default_factory=set)
    uses_java_random: bool = False
    uses_secure_random: bool = False
    uses_trustmanager_factory: bool = False
    uses_pkcs8_keyspec: bool = False
    uses_keygenerator: bool = False
    uses_keystore_key: bool = False
    uses_cipher_getiv: bool = False
    credential_context: bool = False
    tls_related: bool = False


_TYPEISH = re.compile(r"^[A-Z][A-Za-z0-9_$]*$")


class _FactScanner:
    def __init__(self, code_text: str):
        self.toks = loose_tokens(strip_comments(code_text))
        self.n = len(self.toks)
        self.var_types: dict[str, str] = {}
        # var -> list of (pos, value-slice); later assignments shadow
        self.assignments: dict[str, list[tuple[int, tuple[int, int]]]] = {}
        self.mutations: dict[str, list[int]] = {}  # var -> positions of nextBytes(var)
        self.calls: list[CallSite] = []
        self.facts = SnippetFacts()

    # -- token helpers ----------------------------------------------------

    def t(self, i: int) -> Token | None:
        return self.toks[i] if 0 <= i < self.n else None

    def is_p(self, i: int, text: str) -> bool:
        tok = self.t(i)
        return tok is not None and tok.kind == "punct" and tok.text == text

    def is_id(self, i: int, text: str | None = None) -> bool:
        tok = self.t(i)
        return tok is not None and tok.kind == "ident" and (text is None or tok.text == text)

    def match_paren(self, i: int) -> int:
        """Matching ')' for '(' at i, or n."""
        depth = 0
        j = i
        while j < self.n:
            if self.is_p(j, "("):
                depth += 1
            elif self.is_p(j, ")"):
                depth -= 1
                if depth == 0:
                    return j
            j += 1
        return self.n

    def match_brace(self, i: int) -> int:
        depth = 0
        j = i
        while j < self.n:
            if self.is_p(j, "{"):
                depth += 1
            elif self.is_p(j, "}"):
                depth -= 1
                if depth == 0:
                    return j
            j += 1
        return self.n

    def split_args(self, open_paren: int) -> list[tuple[int, int]]:
        close = self.match_paren(open_paren)
        args = []
        depth = 0
        start = open_paren + 1
        for j in range(open_paren + 1, close):
            if self.is_p(j, "(") or self.is_p(j, "[") or self.is_p(j, "{"):
                depth += 1
            elif self.is_p(j, ")") or self.is_p(j, "]") or self.is_p(j, "}"):
                depth -= 1
            elif depth == 0 and self.is_p(j, ","):
                args.append((start, j))
                start = j + 1
        if close > start:
            args.append((start, close))
        return args

    # -- scanning ----------------------------------------------------------

    def scan(self) -> SnippetFacts:
        self._collect_structure()
        self._collect_bodies()
        self._derive_facts()
        return self.facts

    def _collect_structure(self) -> None:
        i = 0
        while i < self.n:
            tok = self.toks[i]
            if tok.kind == "ident":
                if _TYPEISH.match(tok.text):
                    self.facts.used_types.add(tok.text)
                    # Type var (declaration)
                    j = i + 1
                    while self.is_p(j, "[") and self.is_p(j + 1, "]"):
                        j += 2
                    if (
                        self.is_id(j)
                        and not _TYPEISH.match(self.toks[j].text)
                        and (self.is_p(j + 1, "=") or self.is_p(j + 1, ";") or self.is_p(j + 1, ",") or self.is_p(j + 1, ")") or self.is_p(j + 1, ":"))
                    ):
                        self.var_types[self.toks[j].text] = tok.text
                    # Type.member
                    if self.is_p(i + 1, ".") and self.is_id(i + 2):
                        member = self.toks[i + 2].text
                        if self.is_p(i + 3, "("):
                            args = self.split_args(i + 3)
                            self.calls.append(CallSite(
                                pos=i, receiver_type=tok.text, method=member, args=args,
                            ))
                            self._maybe_chain(self.match_paren(i + 3), len(self.calls) - 1, tok.text)
                            self.facts.called_methods.add(member)
                        else:
                            self.facts.used_fields.add(member)
                elif tok.text == "new" and self.is_id(i + 1):
                    tname = self.toks[i + 1].text
                    if _TYPEISH.match(tname) and self.is_p(i + 2, "("):
                        self.facts.used_types.add(tname)
                        args = self.split_args(i + 2)
                        self.calls.append(CallSite(
                            pos=i, receiver_type=tname, method="<init>", args=args,
                        ))
                        self._maybe_chain(self.match_paren(i + 2), len(self.calls) - 1, tname)
                else:
                    # var.method(...) or var = ...
                    if self.is_p(i + 1, ".") and self.is_id(i + 2) and self.is_p(i + 3, "("):
                        vtype = self.var_types.get(tok.text)
                        args = self.split_args(i + 3)
                        method = self.toks[i + 2].text
                        self.calls.append(CallSite(
                            pos=i, receiver_type=vtype, method=method, args=args,
                            receiver_var=tok.text,
                        ))
                        self._maybe_chain(self.match_paren(i + 3), len(self.calls) - 1, vtype)
                        self.facts.called_methods.add(method)
                    elif self.is_p(i + 1, "=") and not self.is_p(i + 2, "="):
                        end = self._value_end(i + 2)
                        self.assignments.setdefault(tok.text, []).append((i, (i + 2, end)))
            i += 1

    def _maybe_chain(self, close_paren: int, call_idx: int, head_type: str | None) -> None:
        j = close_paren + 1
        while self.is_p(j, ".") and self.is_id(j + 1) and self.is_p(j + 2, "("):
            args = self.split_args(j + 2)
            method = self.toks[j + 1].text
            self.calls.append(CallSite(
                pos=j, receiver_type=head_type, method=method, args=args,
                chained_from=call_idx,
            ))
            self.facts.called_methods.add(method)
            call_idx = len(self.calls) - 1
            j = self.match_paren(j + 2) + 1

    def _value_end(self, start: int) -> int:
        depth = 0
        j = start
        while j < self.n:
            tok = self.toks[j]
            if tok.kind == "punct":
                if tok.text in ("(", "[", "{"):
                    depth += 1
                elif tok.text in (")", "]", "}"):
                    if depth == 0:
                        return j
                    depth -= 1
                elif depth == 0 and tok.text in (";", ","):
                    return j
            j += 1
        return j

    def _collect_bodies(self) -> None:
        for i in range(self.n):
            if (
                self.is_id(i)
                and self.toks[i].text in _WATCHED_BODIES
                and self.is_p(i + 1, "(")
            ):
                close = self.match_paren(i + 1)
                j = close + 1
                if self.is_id(j, "throws"):
                    while j < self.n and not self.is_p(j, "{") and not self.is_p(j, ";"):
                        j += 1
                if not self.is_p(j, "{"):
                    continue
                end = self.match_brace(j)
                body = self.toks[j + 1:end]
                calls = {
                    body[k].text
                    for k in range(len(body) - 1)
                    if body[k].kind == "ident"
                    and body[k + 1].kind == "punct" and body[k + 1].text == "("
                }
                info = BodyInfo(
                    name=self.toks[i].text,
                    params_text=" ".join(t.text for t in self.toks[i + 2:close]),
                    tokens=body,
                    calls=calls,
                    idents={t.text for t in body if t.kind == "ident"},
                )
                self.facts.bodies.setdefault(info.name, []).append(info)

    # -- provenance ---------------------------------------------------------

    def provenance(self, rng: tuple[int, int], at_pos: int, depth: int = 0) -> Provenance:
        start, end = rng
        ts = self.toks[start:end]
        if not ts or depth > 4:
            return Provenance(ProvKind.UNKNOWN)
        texts = [t.text for t in ts]
        if len(ts) == 1:
            tok = ts[0]
            if tok.kind == "string":
                return Provenance(ProvKind.STRING, bits=8 * max(len(tok.text) - 2, 0),
                                  value=tok.text[1:-1])
            if tok.kind == "number":
                return Provenance(ProvKind.INT, value=tok.text)
            if tok.kind == "ident":
                return self._var_provenance(tok.text, at_pos, depth)
        # "literal".getBytes(...)
        if ts[0].kind == "string" and "getBytes" in texts:
            return Provenance(ProvKind.STRING_BYTES, bits=8 * max(len(ts[0].text) - 2, 0),
                              value=ts[0].text[1:-1])
        # var.getBytes() where var holds a string literal
        if ts[0].kind == "ident" and len(ts) > 2 and texts[1] == "." and "getBytes" in texts:
            inner = self._var_provenance(ts[0].text, at_pos, depth + 1)
            if inner.kind == ProvKind.STRING:
                return Provenance(ProvKind.STRING_BYTES, bits=inner.bits, value=inner.value)
            if inner.kind != ProvKind.UNKNOWN:
                return inner
            return Provenance(ProvKind.UNKNOWN)
        # array initializer { ... } possibly behind new byte[] prefix
        if "{" in texts:
            open_idx = start + texts.index("{")
            close = self.match_brace(open_idx)
            elems = [t for t in self.toks[open_idx + 1:close] if t.kind in ("number", "string", "char")]
            values = [t.text for t in elems]
            nonzero = any(self._nonzero_literal(v) for v in values)
            bits = 8 * len(elems) if elems else None
            return Provenance(ProvKind.STATIC if nonzero else ProvKind.ZEROED, bits=bits)
        # new byte[N]
        if texts[0] == "new" and "[" in texts and "{" not in texts:
            try:
                li = texts.index("[")
                size_tok = ts[li + 1]
                if size_tok.kind == "number":
                    return Provenance(ProvKind.ZEROED, bits=8 * int(size_tok.text, 0))
            except (IndexError, ValueError):
                pass
            return Provenance(ProvKind.ZEROED)
        # method-call provenance
        if "." in texts:
            for k in range(len(ts) - 2):
                if ts[k + 1].kind == "punct" and ts[k + 1].text == "." and ts[k + 2].kind == "ident":
                    callee = ts[k + 2].text
                    recv_type = None
                    if ts[k].kind == "ident":
                        recv_type = (
                            ts[k].text if _TYPEISH.match(ts[k].text)
                            else self.var_types.get(ts[k].text)
                        )
                    prov = self._call_provenance(recv_type, callee)
                    if prov is not None:
                        return prov
        if texts[0] == "new":
            if "SecureRandom" in texts:
                return Provenance(ProvKind.RANDOM)
        return Provenance(ProvKind.UNKNOWN)

    @staticmethod
    def _nonzero_literal(text: str) -> bool:
        try:
            return int(text, 0) != 0
        except ValueError:
            return True  # strings/chars count as non-zero payload

    def _call_provenance(self, recv_type: str | None, callee: str) -> Provenance | None:
        if callee in ("generateKey", "genKeyPair", "generateKeyPair"):
            return Provenance(ProvKind.GENERATED)
        if callee in ("generateSecret", "getKey", "getEntry"):
            return Provenance(ProvKind.PROVIDER)
        if callee == "generateSeed" or (recv_type == "SecureRandom" and callee == "nextBytes"):
            return Provenance(ProvKind.RANDOM)
        if callee == "getIV" and recv_type == "Cipher":
            return Provenance(ProvKind.PROVIDER)
        if callee == "digest":
            return Provenance(ProvKind.DIGEST)
        if callee == "getEncoded":
            if recv_type in ("SecretKey", "Key", "SecretKeySpec"):
                return Provenance(ProvKind.PROVIDER)
            return None
        if callee == "nextBytes":
            return Provenance(ProvKind.RANDOM)
        return None

    def _var_provenance(self, var: str, at_pos: int, depth: int) -> Provenance:
        muts = [p for p in self.mutations.get(var, []) if p < at_pos]
        chain = [a for a in self.assignments.get(var, []) if a[0] < at_pos]
        base: Provenance | None = None
        if chain:
            pos, rng = chain[-1]
            base = self.provenance(rng, pos, depth + 1)
        elif self.assignments.get(var):
            pos, rng = self.assignments[var][0]
            base = self.provenance(rng, pos, depth + 1)
        if muts and (not chain or muts[-1] > chain[-1][0]):
            bits = base.bits if base is not None else None
            return Provenance(ProvKind.RANDOM, bits=bits)
        return base if base is not None else Provenance(ProvKind.UNKNOWN)

    # -- fact derivation ------------------------------------------------------

    def _arg_string(self, call: CallSite, idx: int) -> str | None:
        if idx >= len(call.args):
            return None
        start, end = call.args[idx]
        for j in range(start, end):
            tok = self.toks[j]
            if tok.kind == "string":
                return tok.text[1:-1]
            if tok.kind == "ident":
                prov = self._var_provenance(tok.text, call.pos, 0)
                if prov.kind == ProvKind.STRING and prov.value is not None:
                    return prov.value
                break
        return None

    def _arg_int(self, call: CallSite, idx: int) -> int | None:
        if idx >= len(call.args):
            return None
        start, end = call.args[idx]
        ts = self.toks[start:end]
        if len(ts) == 1 and ts[0].kind == "number":
            try:
                return int(ts[0].text, 0)
            except ValueError:
                return None
        if len(ts) == 1 and ts[0].kind == "ident":
            prov = self._var_provenance(ts[0].text, call.pos, 0)
            if prov.kind == ProvKind.INT and prov.value is not None:
                try:
                    return int(prov.value, 0)
                except ValueError:
                    return None
        return None

    def _arg_strings_all(self, call: CallSite) -> list[str]:
        out = []
        for start, end in call.args:
            for j in range(start, end):
                tok = self.toks[j]
                if tok.kind == "string":
                    out.append(tok.text[1:-1])
                elif tok.kind == "ident" and not _TYPEISH.match(tok.text):
                    for _, rng in self.assignments.get(tok.text, []):
                        for t2 in self.toks[rng[0]:rng[1]]:
                            if t2.kind == "string":
                                out.append(t2.text[1:-1])
        return out

    def _derive_facts(self) -> None:
        f = self.facts
        kpg_algs: dict[str, str] = {}

        # record nextBytes mutations before provenance queries
        for c in self.calls:
            if c.method == "nextBytes" and c.args:
                start, end = c.args[0]
                if end - start == 1 and self.toks[start].kind == "ident":
                    self.mutations.setdefault(self.toks[start].text, []).append(c.pos)

        for ci, c in enumerate(self.calls):
            rt = c.receiver_type
            if c.method == "getInstance":
                arg = self._arg_string(c, 0)
                if arg is not None:
                    if rt == "Cipher":
                        f.transformations.append(arg)
                    elif rt == "MessageDigest":
                        f.digest_algorithms.append(arg)
                    elif rt == "Signature":
                        f.signature_algorithms.append(arg)
                    elif rt == "SecretKeyFactory":
                        f.key_factory_algorithms.append(arg)
                    elif rt == "Mac":
                        f.mac_algorithms.append(arg)
                    elif rt == "SSLContext":
                        f.protocols.append(arg)
                        f.tls_related = True
                    elif rt == "KeyPairGenerator":
                        if c.receiver_var is not None:
                            kpg_algs[c.receiver_var] = arg
                        kpg_algs[f"@{ci}"] = arg
                    elif rt == "SecureRandom":
                        f.uses_secure_random = True
            elif c.method == "initialize" and rt == "KeyPairGenerator":
                size = self._arg_int(c, 0)
                alg = None
                if c.receiver_var is not None:
                    alg = kpg_algs.get(c.receiver_var)
                if alg is None and c.chained_from is not None:
                    alg = kpg_algs.get(f"@{c.chained_from}")
                if size is not None:
                    f.keypair_sizes.append(((alg or "RSA").upper(), size))
            elif c.method == "setEnabledCipherSuites":
                f.cipher_suites.extend(self._arg_strings_all(c))
                f.tls_related = True
            elif c.method == "setEnabledProtocols":
                f.protocols.extend(self._arg_strings_all(c))
                f.tls_related = True
            elif c.method == "<init>":
                self._derive_ctor_facts(c)
            elif c.method in ("setSeed", "nextBytes"):
                recv_t = rt or "SecureRandom"
                if recv_t in ("SecureRandom", "Random"):
                    prov = self.provenance(c.args[0], c.pos, 0) if c.args else None
                    var = c.receiver_var or "?"
                    f.rng_events.append((c.pos, var, c.method, prov))
            elif c.method == "generateKey":
                f.uses_keygenerator = True
            elif c.method == "getKey" and rt == "KeyStore":
                f.uses_keystore_key = True
            elif c.method == "getIV":
                f.uses_cipher_getiv = True

        for c in self.calls:
            if c.receiver_type in ("TrustManagerFactory",):
                f.uses_trustmanager_factory = True
        if "TrustManagerFactory" in self.var_types.values() or "TrustManagerFactory" in f.used_types:
            f.uses_trustmanager_factory = True
        if "PKCS8EncodedKeySpec" in f.used_types:
            f.uses_pkcs8_keyspec = True

        tls_types = {
            "SSLContext", "SSLSocket", "SSLSocketFactory", "TrustManager",
            "X509TrustManager", "HostnameVerifier", "HttpsURLConnection",
            "AllowAllHostnameVerifier", "StrictHostnameVerifier",
            "BrowserCompatHostnameVerifier", "SslErrorHandler", "TrustManagerFactory",
        }
        if f.used_types & tls_types or f.bodies:
            f.tls_related = True

        # java.util.Random vs SecureRandom by type usage
        if "SecureRandom" in f.used_types:
            f.uses_secure_random = True
        if "Random" in f.used_types:
            f.uses_java_random = True

        # EC curves from any ECGenParameterSpec constructor
        for c in self.calls:
            if c.method == "<init>" and c.receiver_type == "ECGenParameterSpec":
                curve = self._arg_string(c, 0)
                if curve:
                    f.ec_curves.append(curve)

        # credential context from identifiers and string literals
        for tok in self.toks:
            if tok.kind in ("ident", "string") and _CREDENTIAL_RE.search(tok.text):
                f.credential_context = True
                break

        # name-hint fallback: key/iv-looking locals initialized statically
        for var, chain in self.assignments.items():
            consumed = any(
                c.method == "<init>" and any(
                    self.toks[s:e] and len(self.toks[s:e]) >= 1
                    and any(t.kind == "ident" and t.text == var for t in self.toks[s:e])
                    for (s, e) in c.args
                )
                for c in self.calls
                if c.receiver_type in (
                    "SecretKeySpec", "IvParameterSpec", "PBEKeySpec",
                    "DESKeySpec", "DESedeKeySpec", "GCMParameterSpec",
                )
            )
            if consumed:
                continue
            pos, rng = chain[-1]
            prov = self.provenance(rng, self.n, 0)
            if not prov.kind.is_static_value:
                continue
            if _KEY_NAME_RE.match(var):
                f.key_sources.append(prov)
            elif _IV_NAME_RE.match(var):
                f.iv_sources.append(prov)

    def _derive_ctor_facts(self, c: CallSite) -> None:
        f = self.facts
        rt = c.receiver_type
        if rt in ("SecretKeySpec", "DESKeySpec", "DESedeKeySpec"):
            if c.args:
                f.key_sources.append(self.provenance(c.args[0], c.pos, 0))
        elif rt in ("IvParameterSpec", "GCMParameterSpec"):
            idx = 0 if rt == "IvParameterSpec" else (1 if len(c.args) > 1 else None)
            if idx is not None and idx < len(c.args):
                f.iv_sources.append(self.provenance(c.args[idx], c.pos, 0))
        elif rt == "PBEKeySpec" and len(c.args) >= 3:
            salt = self.provenance(c.args[1], c.pos, 0)
            f.pbe_specs.append({
                "salt": salt,
                "iterations": self._arg_int(c, 2),
            })
        elif rt == "RSAKeyGenParameterSpec":
            size = self._arg_int(c, 0)
            if size is not None:
                f.keypair_sizes.append(("RSA", size))
        elif rt == "Random":
            f.uses_java_random = True
        elif rt == "SecureRandom":
            f.uses_secure_random = True


def extract_facts(code_text: str) -> SnippetFacts:
    """Extract rule-relevant facts; never raises on odd input."""
    return _FactScanner(code_text).scan()
