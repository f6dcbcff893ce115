"""Deterministic secure/insecure labeling rules.

Each rule transcribes one secure- or insecure-column entry of the
parameter tables for TLS, symmetric and asymmetric cryptography, hash
functions, and random number generation. A snippet is Insecure iff at
least one insecure-class rule fires; everything else (including
parameter-configurable code) stays Secure: the labeling is
deliberately conservative about what counts as definitely vulnerable.

Two entries are scenario-dependent: AES/CBC and RSA with PKCS1 padding
are exploitable via padding oracles only against a client/server
endpoint, so their insecure variants fire only under that context.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

from .facts import ProvKind, SnippetFacts, extract_facts
from .ingest import SnippetRecord
from .resolver import ResolvedElement

__all__ = [
    "Category",
    "Context",
    "Rule",
    "SecurityVerdict",
    "Severity",
    "catalog_to_json",
    "default_context",
    "label",
    "label_code",
    "lookup",
    "rule_catalog",
]


class Context(str, Enum):
    CLIENT_SERVER = "client-server"
    NON_CLIENT_SERVER = "non-client-server"


class Category(str, Enum):
    TLS = "TLS"
    SYMMETRIC = "SymmetricCrypto"
    ASYMMETRIC = "AsymmetricCrypto"
    HASH = "Hash"
    SECURE_RANDOM = "SecureRandom"
    AUTHENTICATION = "Authentication"
    STORAGE = "Storage"


class Severity(str, Enum):
    SECURE = "SecureIndicator"
    INSECURE = "InsecureIndicator"


@dataclass(frozen=True)
class Rule:
    rule_id: str
    category: Category
    severity: Severity
    matcher: Callable[[SnippetFacts], bool]
    context_condition: Context | None = None  # None = any
    description: str = ""

    def fires(self, facts: SnippetFacts, context: Context) -> bool:
        if self.context_condition is not None and self.context_condition != context:
            return False
        try:
            return bool(self.matcher(facts))
        except Exception:
            return False  # matchers are total by contract


@dataclass(frozen=True)
class SecurityVerdict:
    label: str  # "secure" | "insecure"
    categories: frozenset[Category]
    fired_rules: tuple[str, ...]
    rationale: str

    @property
    def insecure(self) -> bool:
        return self.label == "insecure"

    def to_json_dict(self) -> dict:
        return {
            "label": self.label,
            "categories": sorted(c.value for c in self.categories),
            "fired_rules": list(self.fired_rules),
            "rationale": self.rationale,
        }


# --- matcher helpers ---------------------------------------------------------

_BLOCK_CIPHERS = {"AES", "DES", "DESEDE", "3DES", "TRIPLEDES", "BLOWFISH", "RC2"}


def _parse_transformation(t: str) -> tuple[str, str, str]:
    parts = [p.strip().upper() for p in t.split("/")]
    alg = parts[0] if parts else ""
    mode = parts[1] if len(parts) > 1 else ("ECB" if alg in _BLOCK_CIPHERS else "")
    padding = parts[2] if len(parts) > 2 else ""
    return alg, mode, padding


def _transforms(f: SnippetFacts):
    return [_parse_transformation(t) for t in f.transformations]


def _any_cipher(f: SnippetFacts, algs: set[str], modes: set[str] | None = None) -> bool:
    for alg, mode, _ in _transforms(f):
        if alg in algs and (modes is None or mode in modes or any(mode.startswith(m) for m in modes)):
            return True
    return False


_WEAK_SUITE = re.compile(r"RC4|3DES|MD5|MD2", re.IGNORECASE)
_WEAK_SUITE_CBC = re.compile(r"AES.{0,8}CBC", re.IGNORECASE)
_STRONG_SUITE = re.compile(r"DHE_RSA|ECDHE|GCM|AES_(128|256)|SHA(256|384|512)", re.IGNORECASE)


def _suite_weak(s: str) -> bool:
    return bool(_WEAK_SUITE.search(s) or _WEAK_SUITE_CBC.search(s))


_LEGACY_PROTOCOLS = {"SSL", "SSLV2", "SSLV3", "TLSV1", "TLSV1.0"}
_MODERN_PROTOCOLS = {"TLSV1.1", "TLSV1.2", "TLSV1.3"}

_STATIC_KINDS = {ProvKind.ZEROED, ProvKind.STATIC, ProvKind.STRING, ProvKind.INT}
_DERIVED_KINDS = {ProvKind.STRING_BYTES, ProvKind.DIGEST}


def _tm_bodies(f: SnippetFacts):
    return f.bodies.get("checkServerTrusted", []) + f.bodies.get("checkClientTrusted", [])


def _pbkdf_digests(f: SnippetFacts) -> list[str]:
    out = []
    for alg in f.key_factory_algorithms:
        m = re.match(r"(?i)PBKDF2WithHmac(\w+)", alg.strip())
        if m:
            out.append(m.group(1).upper())
    return out


def _sig_digest(alg: str) -> str:
    m = re.match(r"(?i)(\w+?)with", alg.strip())
    return m.group(1).upper() if m else ""


_STRONG_DIGESTS = {"SHA224", "SHA256", "SHA384", "SHA512", "SHA-224", "SHA-256", "SHA-384", "SHA-512"}


def _norm_digest(alg: str) -> str:
    return alg.strip().upper().replace("-", "").replace("_", "")


def _ec_bits(f: SnippetFacts) -> list[int]:
    bits = [size for alg, size in f.keypair_sizes if alg in ("EC", "ECDSA", "ECDH")]
    for curve in f.ec_curves:
        m = re.search(r"(\d{3})", curve)
        if m:
            bits.append(int(m.group(1)))
    return bits


def _rng_setseed_events(f: SnippetFacts):
    return [(pos, var, prov) for pos, var, kind, prov in f.rng_events if kind == "setSeed"]


def _rng_nextbytes_positions(f: SnippetFacts, var: str) -> list[int]:
    return [pos for pos, v, kind, _ in f.rng_events if kind == "nextBytes" and v == var]


def _seed_static(prov) -> bool:
    return prov is not None and prov.kind in (_STATIC_KINDS | _DERIVED_KINDS)


# --- the catalog -------------------------------------------------------------

def _build_catalog() -> list[Rule]:
    R: list[Rule] = []

    def add(rule_id, category, severity, matcher, ctx=None, desc=""):
        R.append(Rule(rule_id, category, severity, matcher, ctx, desc))

    S, I = Severity.SECURE, Severity.INSECURE
    CS, NCS = Context.CLIENT_SERVER, Context.NON_CLIENT_SERVER

    # TLS: hostname verification
    add("tls-hv-allow-all", Category.TLS, I,
        lambda f: "AllowAllHostnameVerifier" in f.used_types
        or "ALLOW_ALL_HOSTNAME_VERIFIER" in f.used_fields
        or any(b.returns_constant_true() for b in f.bodies.get("verify", [])),
        desc="hostname verifier accepts every host")
    add("tls-hv-browser-compat", Category.TLS, S,
        lambda f: "BrowserCompatHostnameVerifier" in f.used_types
        or "BROWSER_COMPATIBLE_HOSTNAME_VERIFIER" in f.used_fields,
        desc="browser-compatible hostname verifier")
    add("tls-hv-strict", Category.TLS, S,
        lambda f: "StrictHostnameVerifier" in f.used_types
        or "STRICT_HOSTNAME_VERIFIER" in f.used_fields,
        desc="strict hostname verifier")

    # TLS: trust managers
    add("tls-tm-trust-all", Category.TLS, I,
        lambda f: any(b.is_trivial for b in _tm_bodies(f)),
        desc="trust manager accepts every certificate chain")
    add("tls-tm-validity-only", Category.TLS, I,
        lambda f: any(
            b.calls and b.calls <= {"checkValidity"} for b in _tm_bodies(f)
        ),
        desc="trust manager checks expiry only")
    add("tls-tm-bad-pinning", Category.TLS, I,
        lambda f: any("getSerialNumber" in b.idents for b in _tm_bodies(f)),
        desc="pinning against ambiguous certificate fields")
    add("tls-tm-pinning", Category.TLS, S,
        lambda f: any(
            not b.is_trivial
            and "getSerialNumber" not in b.idents
            and b.idents & {"getEncoded", "getPublicKey"}
            and b.idents & {"MessageDigest", "digest", "equals", "isEqual"}
            for b in _tm_bodies(f)
        ),
        desc="certificate or public key pinning")
    add("tls-tm-default", Category.TLS, S,
        lambda f: f.uses_trustmanager_factory and not _tm_bodies(f),
        desc="platform default trust management")

    # TLS: protocol versions
    add("tls-version-ge-1.1", Category.TLS, S,
        lambda f: any(p.strip().upper() in _MODERN_PROTOCOLS for p in f.protocols),
        desc="TLSv1.1 or newer")
    add("tls-version-lt-1.1", Category.TLS, I,
        lambda f: any(p.strip().upper() in _LEGACY_PROTOCOLS for p in f.protocols),
        desc="SSL or TLS below 1.1")

    # TLS: cipher suites
    add("tls-cipher-suite-strong", Category.TLS, S,
        lambda f: any(_STRONG_SUITE.search(s) and not _suite_weak(s) for s in f.cipher_suites),
        desc="forward-secret AEAD suites")
    add("tls-cipher-suite-weak", Category.TLS, I,
        lambda f: any(_suite_weak(s) for s in f.cipher_suites),
        desc="RC4/3DES/CBC/MD5-family suites enabled")

    # TLS: WebView certificate error handling
    add("tls-osse-cancel", Category.TLS, S,
        lambda f: any("cancel" in b.calls for b in f.bodies.get("onReceivedSslError", [])),
        desc="certificate errors abort the handshake")
    add("tls-osse-proceed", Category.TLS, I,
        lambda f: any("proceed" in b.calls for b in f.bodies.get("onReceivedSslError", [])),
        desc="certificate errors are ignored")

    # Symmetric ciphers and modes
    add("sym-cipher-aes-gcm", Category.SYMMETRIC, S,
        lambda f: _any_cipher(f, {"AES"}, {"GCM"}), desc="AES in GCM mode")
    add("sym-cipher-aes-cfb", Category.SYMMETRIC, S,
        lambda f: _any_cipher(f, {"AES"}, {"CFB"}), desc="AES in CFB mode")
    add("sym-cipher-aes-cbc", Category.SYMMETRIC, S,
        lambda f: _any_cipher(f, {"AES"}, {"CBC"}), ctx=NCS,
        desc="AES-CBC outside a client/server exchange")
    add("sym-cipher-aes-cbc-client-server", Category.SYMMETRIC, I,
        lambda f: _any_cipher(f, {"AES"}, {"CBC"}), ctx=CS,
        desc="AES-CBC in a padding-oracle-prone setting")
    add("sym-cipher-aes-ecb", Category.SYMMETRIC, I,
        lambda f: _any_cipher(f, {"AES"}, {"ECB"}),
        desc="AES in ECB mode (including the bare-name default)")
    add("sym-cipher-rc2", Category.SYMMETRIC, I,
        lambda f: _any_cipher(f, {"RC2"}), desc="RC2 cipher")
    add("sym-cipher-rc4", Category.SYMMETRIC, I,
        lambda f: _any_cipher(f, {"RC4", "ARCFOUR"}), desc="RC4 cipher")
    add("sym-cipher-des", Category.SYMMETRIC, I,
        lambda f: _any_cipher(f, {"DES"}), desc="single DES")
    add("sym-cipher-3des", Category.SYMMETRIC, I,
        lambda f: _any_cipher(f, {"DESEDE", "3DES", "TRIPLEDES"}), desc="triple DES")
    add("sym-cipher-blowfish", Category.SYMMETRIC, I,
        lambda f: _any_cipher(f, {"BLOWFISH"}), desc="Blowfish cipher")

    # Symmetric keys
    add("sym-key-generated", Category.SYMMETRIC, S,
        lambda f: f.uses_keygenerator
        or any(p.kind in (ProvKind.GENERATED, ProvKind.RANDOM) for p in f.key_sources),
        desc="generated key material")
    add("sym-key-provider", Category.SYMMETRIC, S,
        lambda f: f.uses_keystore_key
        or any(p.kind == ProvKind.PROVIDER for p in f.key_sources),
        desc="provider-supplied key material")
    add("sym-key-static", Category.SYMMETRIC, I,
        lambda f: any(p.kind in _STATIC_KINDS for p in f.key_sources),
        desc="hard-coded key bytes")
    add("sym-key-bad-derivation", Category.SYMMETRIC, I,
        lambda f: any(p.kind in _DERIVED_KINDS for p in f.key_sources),
        desc="key derived directly from literal text")

    # Initialization vectors
    add("sym-iv-generated", Category.SYMMETRIC, S,
        lambda f: any(p.kind in (ProvKind.RANDOM, ProvKind.GENERATED) for p in f.iv_sources),
        desc="randomly generated IV")
    add("sym-iv-provider", Category.SYMMETRIC, S,
        lambda f: f.uses_cipher_getiv
        or any(p.kind == ProvKind.PROVIDER for p in f.iv_sources),
        desc="provider-supplied IV")
    add("sym-iv-zeroed", Category.SYMMETRIC, I,
        lambda f: any(p.kind == ProvKind.ZEROED for p in f.iv_sources),
        desc="all-zero IV")
    add("sym-iv-static", Category.SYMMETRIC, I,
        lambda f: any(p.kind in (ProvKind.STATIC, ProvKind.STRING, ProvKind.INT) for p in f.iv_sources),
        desc="hard-coded IV")
    add("sym-iv-bad-derivation", Category.SYMMETRIC, I,
        lambda f: any(p.kind in _DERIVED_KINDS for p in f.iv_sources),
        desc="IV derived directly from literal text")

    # Password-based encryption
    add("sym-pbe-iterations-ok", Category.SYMMETRIC, S,
        lambda f: any(s["iterations"] is not None and s["iterations"] >= 1000 for s in f.pbe_specs),
        desc="1000+ KDF iterations")
    add("sym-pbe-iterations-low", Category.SYMMETRIC, I,
        lambda f: any(s["iterations"] is not None and s["iterations"] < 1000 for s in f.pbe_specs),
        desc="fewer than 1000 KDF iterations")
    add("sym-pbe-salt-size-ok", Category.SYMMETRIC, S,
        lambda f: any(s["salt"].bits is not None and s["salt"].bits >= 64 for s in f.pbe_specs),
        desc="64-bit or larger salt")
    add("sym-pbe-salt-size-low", Category.SYMMETRIC, I,
        lambda f: any(s["salt"].bits is not None and s["salt"].bits < 64 for s in f.pbe_specs),
        desc="salt below 64 bits")
    add("sym-pbe-salt-random", Category.SYMMETRIC, S,
        lambda f: any(s["salt"].kind == ProvKind.RANDOM for s in f.pbe_specs),
        desc="random per-use salt")
    add("sym-pbe-salt-static", Category.SYMMETRIC, I,
        lambda f: any(s["salt"].kind in (_STATIC_KINDS | _DERIVED_KINDS) for s in f.pbe_specs),
        desc="constant salt")

    # Asymmetric cryptography
    add("asym-cipher-rsa", Category.ASYMMETRIC, S,
        lambda f: any(alg == "RSA" for alg, _, _ in _transforms(f)),
        desc="RSA transformations (mode is ignored by providers)")
    add("asym-padding-pkcs1", Category.ASYMMETRIC, S,
        lambda f: any(pad == "PKCS1PADDING" for _, _, pad in _transforms(f)), ctx=NCS,
        desc="PKCS1 padding outside a client/server exchange")
    add("asym-padding-pkcs1-client-server", Category.ASYMMETRIC, I,
        lambda f: any(pad == "PKCS1PADDING" for _, _, pad in _transforms(f)), ctx=CS,
        desc="PKCS1 padding against an oracle-capable peer")
    add("asym-padding-oaep", Category.ASYMMETRIC, S,
        lambda f: any(pad.startswith("OAEP") for _, _, pad in _transforms(f)),
        desc="OAEP padding")
    add("asym-padding-pkcs8", Category.ASYMMETRIC, S,
        lambda f: f.uses_pkcs8_keyspec,
        desc="PKCS8-encoded key handling")
    add("asym-key-rsa-ok", Category.ASYMMETRIC, S,
        lambda f: any(alg == "RSA" and bits >= 2048 for alg, bits in f.keypair_sizes),
        desc="RSA modulus of 2048 bits or more")
    add("asym-key-rsa-small", Category.ASYMMETRIC, I,
        lambda f: any(alg == "RSA" and bits < 2048 for alg, bits in f.keypair_sizes),
        desc="RSA modulus below 2048 bits")
    add("asym-key-ecc-ok", Category.ASYMMETRIC, S,
        lambda f: any(b >= 224 for b in _ec_bits(f)),
        desc="elliptic curves of 224 bits or more")
    add("asym-key-ecc-small", Category.ASYMMETRIC, I,
        lambda f: any(b < 224 for b in _ec_bits(f)),
        desc="elliptic curves below 224 bits")

    # Hash functions
    add("hash-pbkdf-strong", Category.HASH, S,
        lambda f: any(d not in ("MD2", "MD5") for d in _pbkdf_digests(f)),
        desc="PBKDF2 over a non-broken digest")
    add("hash-pbkdf-weak-md", Category.HASH, I,
        lambda f: any(d in ("MD2", "MD5") for d in _pbkdf_digests(f)),
        desc="PBKDF2 over MD2/MD5")
    add("hash-signature-strong", Category.HASH, S,
        lambda f: any(_norm_digest(_sig_digest(a)) in
                      {"SHA224", "SHA256", "SHA384", "SHA512"} for a in f.signature_algorithms),
        desc="signatures over SHA-224 or stronger")
    add("hash-signature-weak-md", Category.HASH, I,
        lambda f: any(_sig_digest(a) in ("MD2", "MD5") for a in f.signature_algorithms),
        desc="signatures over MD2/MD5")
    add("hash-credentials-strong", Category.HASH, S,
        lambda f: f.credential_context
        and any(_norm_digest(a) in {"SHA224", "SHA256", "SHA384", "SHA512"}
                for a in f.digest_algorithms),
        desc="credentials hashed with SHA-224 or stronger")
    add("hash-credentials-weak-md", Category.HASH, I,
        lambda f: f.credential_context
        and any(_norm_digest(a) in ("MD2", "MD5") for a in f.digest_algorithms),
        desc="credentials hashed with MD2/MD5")

    # Random number generation
    add("rng-type-securerandom", Category.SECURE_RANDOM, S,
        lambda f: f.uses_secure_random,
        desc="cryptographic RNG type")
    add("rng-type-random", Category.SECURE_RANDOM, I,
        lambda f: f.uses_java_random,
        desc="non-cryptographic RNG type")
    add("rng-seed-self-seeded", Category.SECURE_RANDOM, S,
        lambda f: any(k == "nextBytes" for _, _, k, _ in f.rng_events)
        and not _rng_setseed_events(f),
        desc="self-seeding RNG")
    add("rng-seed-nextbytes-then-setseed", Category.SECURE_RANDOM, S,
        lambda f: any(
            any(p < pos for p in _rng_nextbytes_positions(f, var))
            for pos, var, _ in _rng_setseed_events(f)
        ),
        desc="seed supplements an already self-seeded RNG")
    add("rng-seed-setseed-then-nextbytes", Category.SECURE_RANDOM, I,
        lambda f: any(
            _seed_static(prov)
            and not any(p < pos for p in _rng_nextbytes_positions(f, var))
            and any(p > pos for p in _rng_nextbytes_positions(f, var))
            for pos, var, prov in _rng_setseed_events(f)
        ),
        desc="static seed installed before first use")
    add("rng-seed-static", Category.SECURE_RANDOM, I,
        lambda f: any(
            _seed_static(prov)
            and not any(p < pos for p in _rng_nextbytes_positions(f, var))
            for pos, var, prov in _rng_setseed_events(f)
        ),
        desc="RNG seeded from a constant value")

    return R


_CATALOG: list[Rule] = _build_catalog()
_BY_ID: dict[str, Rule] = {r.rule_id: r for r in _CATALOG}
assert len(_BY_ID) == len(_CATALOG), "duplicate rule ids"


def rule_catalog() -> list[Rule]:
    """The full shipped catalog, one rule per table entry."""
    return list(_CATALOG)


def lookup(rule_id: str) -> Rule:
    return _BY_ID[rule_id]


def catalog_to_json() -> str:
    rows = [
        {
            "rule_id": r.rule_id,
            "category": r.category.value,
            "severity": r.severity.value,
            "context": r.context_condition.value if r.context_condition else "any",
            "description": r.description,
        }
        for r in _CATALOG
    ]
    return json.dumps({"format": "snipscan-rules/1", "rules": rows}, indent=2, sort_keys=True)


def default_context(facts: SnippetFacts) -> Context:
    """TLS-adjacent snippets default to the client/server scenario."""
    return Context.CLIENT_SERVER if facts.tls_related else Context.NON_CLIENT_SERVER


def label_code(code_text: str, context: Context | None = None) -> SecurityVerdict:
    """Label raw snippet text; context defaults per TLS adjacency."""
    facts = extract_facts(code_text)
    ctx = context if context is not None else default_context(facts)
    fired = [r for r in _CATALOG if r.fires(facts, ctx)]
    insecure = [r for r in fired if r.severity is Severity.INSECURE]
    verdict_label = "insecure" if insecure else "secure"
    leading = insecure if insecure else fired
    rationale = "; ".join(r.description or r.rule_id for r in leading[:4])
    return SecurityVerdict(
        label=verdict_label,
        categories=frozenset(r.category for r in fired),
        fired_rules=tuple(r.rule_id for r in fired),
        rationale=rationale or "no parameter rule matched",
    )


def label(
    snippet: SnippetRecord,
    resolved: tuple[ResolvedElement, ...] = (),
    context: Context | None = None,
) -> SecurityVerdict:
    """Verdict for a security-related snippet.

    ``resolved`` is accepted for interface symmetry with the filtering
    stage; matching itself is lexical over the snippet text.
    """
    del resolved
    return label_code(snippet.code_text, context)
