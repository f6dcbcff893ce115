"""Per-method dependence graphs and their semantic blocks.

Nodes are IR instructions; an edge (a, b) exists iff a defines a value
that b uses. Semantic blocks are the weakly-connected components: the
data-independent subgraphs that clone comparison works on. An empty
method has zero blocks.
"""

from __future__ import annotations

from .ir import IrMethod, MethodPdg

__all__ = ["build_pdg"]


def build_pdg(method: IrMethod) -> MethodPdg:
    defs = {i.defines: i.id for i in method.instructions if i.defines is not None}
    edges: list[tuple[int, int]] = []
    parent = list(range(len(method.instructions)))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a: int, b: int) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra

    for instr in method.instructions:
        for value in sorted(instr.uses):
            src = defs.get(value)
            if src is not None:
                edges.append((src, instr.id))
                union(src, instr.id)

    groups: dict[int, list[int]] = {}
    for instr in method.instructions:
        groups.setdefault(find(instr.id), []).append(instr.id)
    blocks = sorted(groups.values(), key=min)
    return MethodPdg(method=method, edges=edges, semantic_blocks=blocks)
