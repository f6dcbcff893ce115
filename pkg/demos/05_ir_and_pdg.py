"""
Partial-snippet compilation, dependence graphs, semantic vectors
================================================================

Completes an incomplete snippet into a compilation unit, lowers it to
three-address IR, builds the per-method dependence graph, and embeds
each semantic block as a fixed-length count vector.
"""

from snipscan.clones import embed
from snipscan.frontend import compile_unit, wrap_partial
from snipscan.ir import KIND_ORDER
from snipscan.pdg import build_pdg
from snipscan.registry import load_registry

registry = load_registry()

SNIPPET = """Cipher cipher = Cipher.getInstance("AES/GCM/NoPadding");
cipher.init(Cipher.ENCRYPT_MODE, key);
byte[] out = cipher.doFinal(plain);
int unrelated = logCounter + 1;"""

# Bare statements gain a synthetic class and method shell.
unit = wrap_partial(SNIPPET)
print("wrapped unit:")
for line in unit.splitlines():
    print("  |", line)

for method in compile_unit(unit, registry):
    pdg = build_pdg(method)
    print(f"\nmethod {method.path_str}")
    print(f"  constants: {sorted(method.constants.elements())}")
    print(f"  security calls: {sorted(method.security_method_names)}")
    print("  instructions:")
    for instr in method.instructions:
        uses = ",".join(str(u) for u in sorted(instr.uses)) or "-"
        print(f"    {instr.id:>2} {instr.kind.value:<18} uses={uses:<8} {instr.detail}")
    print(f"  def-use edges: {pdg.edges}")
    print(f"  semantic blocks: {pdg.semantic_blocks}")
    for i, block in enumerate(pdg.semantic_blocks):
        vec = embed(pdg, block)
        nonzero = {
            kind.value: (vec[2 * j], vec[2 * j + 1])
            for j, kind in enumerate(KIND_ORDER)
            if vec[2 * j] or vec[2 * j + 1]
        }
        print(f"  block {i} vector (count, max out-degree per kind): {nonzero}")
