"""
Clone containment and its robustness envelope
=============================================

Plants one snippet into a synthetic app and shows which modifications
the detector tolerates (renaming, reordering, unrelated insertions) and
which must break the match (constant changes, removed security calls,
splitting a method in two).
"""

from snipscan import synth
from snipscan.clones import CompiledCode, MatchConfig, match_snippet
from snipscan.frontend import compile_unit, wrap_partial
from snipscan.registry import load_registry

registry = load_registry()
cfg = MatchConfig()  # similarity threshold 0.91, containment fixed at 1.0


def compiled(uid, code):
    return CompiledCode.from_methods(uid, compile_unit(wrap_partial(code), registry))


def app_of(bodies):
    methods = []
    for k, stmts in enumerate(bodies):
        inner = "\n".join("        " + s for s in stmts)
        methods.append(f"    void task{k}() {{\n{inner}\n    }}")
    return "public class DemoApp {\n" + "\n\n".join(methods) + "\n}"


plant = synth.plants()[8]  # hard-coded key flowing into a bare-AES cipher
print(f"snippet fixture: {plant.name}")
for line in plant.snippet_text().splitlines():
    print("  |", line)
snippet = compiled(plant.name, plant.snippet_text())

variants = [
    ("verbatim copy", [plant.render_stmts()], True),
    ("variables renamed", [synth.variant_renamed(plant)], True),
    ("independent statements reordered", [synth.variant_reordered(plant)], True),
    ("unrelated statements inserted", [synth.variant_with_insertions(plant)], True),
    ("one constant changed", [synth.variant_constant_mutated(plant)], False),
    ("security call removed", [synth.variant_security_removed(plant)], False),
    ("method split in two", synth.variant_split(plant), False),
]

print(f"\n{'variant':<36} expected   detected")
for title, bodies, expected in variants:
    app = compiled("demo", app_of(bodies))
    match = match_snippet(snippet, app, cfg, registry)
    got = match is not None
    marker = "ok" if got == expected else "UNEXPECTED"
    print(f"{title:<36} {str(expected):<10} {str(got):<10} {marker}")

print("\nbindings for the verbatim copy:")
match = match_snippet(snippet, compiled("demo", app_of([plant.render_stmts()])), cfg, registry)
for snippet_path, app_path in sorted(match.bindings.items()):
    print(f"  {snippet_path}  ->  {app_path}")
