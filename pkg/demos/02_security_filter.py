"""
Security-API resolution
=======================

Shows how partially qualified snippet elements narrow down to unique
registry classes, and the three ways an element drops out: ambiguity,
constructor-only usage, and the package blacklist.
"""

from snipscan.registry import load_registry
from snipscan.resolver import lex_elements, resolve
from snipscan.diagnostics import Diagnostics

registry = load_registry()
print(f"registry: {sum(len(l.classes) for l in registry.libraries)} classes "
      f"across {len(registry.libraries)} libraries, "
      f"{len(registry.blacklist_packages)} blacklisted package prefixes\n")

CASES = {
    "observed methods pin the class": (
        'Cipher c = Cipher.getInstance("AES");\nc.init(mode, key);\nc.doFinal(data);'
    ),
    "constructor-only usage is dropped": (
        "Configuration cfg = new Configuration();"
    ),
    "shared simple names stay ambiguous": (
        "byte[] raw = Base64.decode(text, 0);"
    ),
    "unique but blacklisted package": (
        "byte[] raw = Base64.getEncoder().encode(data);"
    ),
    "method set disambiguates twin names": (
        "SSLSocketFactory f = (SSLSocketFactory) SSLSocketFactory.getDefault();"
    ),
}

for title, code in CASES.items():
    diag = Diagnostics()
    resolved = resolve(lex_elements(code), registry, diag)
    print(f"-- {title}")
    print("   " + code.replace("\n", "\n   "))
    if resolved:
        for r in resolved:
            print(f"   -> {r.resolved_fqn}  methods={sorted(r.observed_methods)}")
    else:
        print(f"   -> no security elements ({diag.counters})")
    print()
