"""Snippet containment detection over compiled method PDGs.

A snippet is contained in a compiled unit when every snippet method can
be placed inside a single app method such that (a) each of its semantic
blocks has a distinct app block with Jaccard similarity at or above the
threshold, (b) its security method names are fully contained in the app
method's, (c) its constants multiset is fully contained, and the bound
methods reproduce the snippet's nested-class co-membership. Empty
trust-manager validation methods carry no structure at all and match by
qualified method name instead.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .ir import KIND_ORDER, IrMethod, MethodPdg
from .pdg import build_pdg
from .registry import ApiRegistry

__all__ = [
    "CloneMatch",
    "CompiledCode",
    "MatchConfig",
    "MethodMatch",
    "SemanticVector",
    "TRUST_MANAGER_METHODS",
    "embed",
    "jaccard_containment",
    "jaccard_similarity",
    "match_empty_trustmanager",
    "match_method",
    "match_snippet",
]

TRUST_MANAGER_METHODS = frozenset(
    {"checkClientTrusted", "checkServerTrusted", "getAcceptedIssuers"}
)

SemanticVector = tuple[int, ...]  # interleaved (count, max out-degree) per kind

VECTOR_DIM = 2 * len(KIND_ORDER)


@dataclass(frozen=True)
class MatchConfig:
    similarity_threshold: float = 0.91
    containment_threshold: float = 1.0
    candidate_class_filter: bool = True

    def __post_init__(self) -> None:
        if not (0.0 < self.similarity_threshold <= 1.0):
            raise ValueError("similarity threshold must be in (0, 1]")
        if self.containment_threshold != 1.0:
            raise ValueError("containment threshold is fixed at 1.0")


@dataclass(frozen=True)
class MethodMatch:
    snippet_path: str
    app_path: str
    block_pairs: tuple[tuple[int, int, float], ...]  # (snippet block, app block, J_s)
    empty_trustmanager: bool = False


@dataclass(frozen=True)
class CloneMatch:
    snippet_id: str
    app_id: str
    bindings: dict[str, str]
    scores: dict[str, tuple[tuple[int, int, float], ...]]
    flags: dict[str, bool]

    def to_json_dict(self) -> dict:
        return {
            "snippet_id": self.snippet_id,
            "app_id": self.app_id,
            "bindings": dict(sorted(self.bindings.items())),
            "scores": {
                k: [list(p) for p in v] for k, v in sorted(self.scores.items())
            },
            "flags": dict(sorted(self.flags.items())),
        }


@dataclass
class CompiledCode:
    """A compiled snippet or corpus unit: methods with their PDGs."""

    unit_id: str
    pdgs: list[MethodPdg]
    _classes: dict[tuple[str, ...], list[MethodPdg]] = field(default_factory=dict, repr=False)

    @classmethod
    def from_methods(cls, unit_id: str, methods: Iterable[IrMethod]) -> "CompiledCode":
        return cls(unit_id=unit_id, pdgs=[build_pdg(m) for m in methods])

    def classes(self) -> dict[tuple[str, ...], list[MethodPdg]]:
        if not self._classes:
            for pdg in self.pdgs:
                self._classes.setdefault(pdg.method.class_path, []).append(pdg)
        return self._classes

    def security_relevant_classes(self, registry: ApiRegistry) -> list[tuple[str, ...]]:
        """Classes worth searching: they call security APIs, subclass a
        registry type, declare trust-manager-shaped methods, or enclose
        a class that does (nested classes are part of their code)."""
        security_simple = {
            c.simple_name
            for lib in registry.libraries if lib.security
            for c in lib.classes
        }
        direct = set()
        for cpath, pdgs in self.classes().items():
            for pdg in pdgs:
                m = pdg.method
                if (
                    m.security_method_names
                    or m.declared_supertypes & security_simple
                    or m.name in TRUST_MANAGER_METHODS
                ):
                    direct.add(cpath)
                    break
        out = {
            cpath
            for cpath in self.classes()
            if any(hit[: len(cpath)] == cpath for hit in direct)
        }
        return sorted(out)


def _is_empty_method(pdg: MethodPdg) -> bool:
    m = pdg.method
    return (
        not m.instructions
        and not m.constants
        and not m.security_method_names
    )


def embed(pdg: MethodPdg, block: Sequence[int]) -> SemanticVector:
    """Fixed-length count embedding of one semantic block: per
    instruction kind, the node count and the maximum out-degree."""
    block_set = set(block)
    out_deg: dict[int, int] = {}
    for a, b in pdg.edges:
        if a in block_set and b in block_set:
            out_deg[a] = out_deg.get(a, 0) + 1
    counts: dict[str, int] = {}
    max_out: dict[str, int] = {}
    for node_id in block:
        kind = pdg.method.instructions[node_id].kind.value
        counts[kind] = counts.get(kind, 0) + 1
        max_out[kind] = max(max_out.get(kind, 0), out_deg.get(node_id, 0))
    vec: list[int] = []
    for kind in KIND_ORDER:
        vec.append(counts.get(kind.value, 0))
        vec.append(max_out.get(kind.value, 0))
    return tuple(vec)


def jaccard_similarity(x: Sequence[int], y: Sequence[int]) -> float:
    """Count-vector Jaccard: sum of elementwise minima over maxima.
    Two all-zero vectors compare equal (1.0)."""
    if len(x) != len(y):
        raise ValueError(f"dimension mismatch: {len(x)} vs {len(y)}")
    num = sum(min(a, b) for a, b in zip(x, y))
    den = sum(max(a, b) for a, b in zip(x, y))
    if den == 0:
        return 1.0
    return num / den


def jaccard_containment(x, y) -> float:
    """Fraction of x present in y; multisets use minimum multiplicity.
    An empty x is contained everywhere (1.0)."""
    cx = x if isinstance(x, Counter) else Counter(x)
    cy = y if isinstance(y, Counter) else Counter(y)
    size = sum(cx.values())
    if size == 0:
        return 1.0
    inter = sum(min(c, cy.get(k, 0)) for k, c in cx.items())
    return inter / size


def match_method(
    sm: MethodPdg, am: MethodPdg, cfg: MatchConfig = MatchConfig()
) -> MethodMatch | None:
    """Containment of one snippet method inside one app method.

    Blocks are assigned one-to-one, greedily by descending similarity
    with (snippet block, app block) index tie-breaks; extra app blocks
    are unconstrained, which is what makes unrelated insertions
    harmless.
    """
    s_blocks = sm.semantic_blocks
    a_blocks = am.semantic_blocks
    s_vecs = [embed(sm, b) for b in s_blocks]
    a_vecs = [embed(am, b) for b in a_blocks]
    pairs = []
    for i, sv in enumerate(s_vecs):
        for j, av in enumerate(a_vecs):
            sim = jaccard_similarity(sv, av)
            if sim >= cfg.similarity_threshold:
                pairs.append((-sim, i, j))
    pairs.sort()
    taken_s: dict[int, tuple[int, float]] = {}
    taken_a: set[int] = set()
    for neg_sim, i, j in pairs:
        if i in taken_s or j in taken_a:
            continue
        taken_s[i] = (j, -neg_sim)
        taken_a.add(j)
    if len(taken_s) != len(s_blocks):
        return None
    if jaccard_containment(
        set(sm.method.security_method_names), set(am.method.security_method_names)
    ) < cfg.containment_threshold:
        return None
    if jaccard_containment(sm.method.constants, am.method.constants) < cfg.containment_threshold:
        return None
    block_pairs = tuple(
        (i, taken_s[i][0], taken_s[i][1]) for i in sorted(taken_s)
    )
    return MethodMatch(
        snippet_path=sm.method.path_str,
        app_path=am.method.path_str,
        block_pairs=block_pairs,
    )


def match_empty_trustmanager(sm: MethodPdg, app: CompiledCode) -> list[str] | None:
    """Name-based matching for structureless trust-manager methods.

    Returns None when the snippet method is not the empty shape (caller
    falls back to the normal path); otherwise the qualified paths of app
    methods that are empty and share one of the trust-manager method
    names.
    """
    if not _is_empty_method(sm):
        return None
    if sm.method.name not in TRUST_MANAGER_METHODS:
        return []
    return sorted(
        pdg.method.path_str
        for pdg in app.pdgs
        if _is_empty_method(pdg) and pdg.method.name == sm.method.name
    )


def _empty_tm_pair(sm: MethodPdg, am: MethodPdg) -> bool:
    return (
        _is_empty_method(sm)
        and _is_empty_method(am)
        and sm.method.name in TRUST_MANAGER_METHODS
        and am.method.name == sm.method.name
    )


def _bipartite_assignment(
    left: list[MethodPdg],
    right: list[MethodPdg],
    feasible: Mapping[tuple[int, int], MethodMatch | str],
) -> dict[int, int] | None:
    """Maximum bipartite matching (Kuhn's augmenting paths); returns a
    full left-covering assignment or None. Deterministic: candidates
    are tried in index order."""
    match_of_right: dict[int, int] = {}

    def try_assign(i: int, visited: set[int]) -> bool:
        for j in range(len(right)):
            if (i, j) not in feasible or j in visited:
                continue
            visited.add(j)
            if j not in match_of_right or try_assign(match_of_right[j], visited):
                match_of_right[j] = i
                return True
        return False

    for i in range(len(left)):
        if not try_assign(i, set()):
            return None
    return {i: j for j, i in match_of_right.items()}


def _class_binding(
    s_pdgs: list[MethodPdg],
    a_pdgs: list[MethodPdg],
    cfg: MatchConfig,
) -> tuple[dict[str, str], dict[str, tuple], bool] | None:
    """Bind every snippet method of one class into distinct app methods
    of one app class."""
    feasible: dict[tuple[int, int], MethodMatch | str] = {}
    for i, sp in enumerate(s_pdgs):
        for j, ap in enumerate(a_pdgs):
            if _is_empty_method(sp):
                if _empty_tm_pair(sp, ap):
                    feasible[(i, j)] = "empty-trustmanager"
            else:
                mm = match_method(sp, ap, cfg)
                if mm is not None:
                    feasible[(i, j)] = mm
    assignment = _bipartite_assignment(s_pdgs, a_pdgs, feasible)
    if assignment is None:
        return None
    bindings: dict[str, str] = {}
    scores: dict[str, tuple] = {}
    tm_flag = False
    for i, j in assignment.items():
        sp, ap = s_pdgs[i], a_pdgs[j]
        bindings[sp.method.path_str] = ap.method.path_str
        outcome = feasible[(i, j)]
        if outcome == "empty-trustmanager":
            tm_flag = True
            scores[sp.method.path_str] = ()
        else:
            scores[sp.method.path_str] = outcome.block_pairs
    return bindings, scores, tm_flag


def _is_prefix(a: tuple[str, ...], b: tuple[str, ...]) -> bool:
    return len(a) < len(b) and b[: len(a)] == a


def match_snippet(
    snippet: CompiledCode,
    app: CompiledCode,
    cfg: MatchConfig = MatchConfig(),
    registry: ApiRegistry | None = None,
) -> CloneMatch | None:
    """Whole-snippet containment in one compiled unit.

    Snippet classes map injectively to app classes; methods sharing a
    snippet class land in one app class, and class nesting (path
    prefixes) is preserved. With the candidate filter on, only app
    classes showing security API usage are searched.
    """
    s_classes = sorted(snippet.classes().items())
    if not s_classes:
        return None
    a_classes = app.classes()
    if cfg.candidate_class_filter and registry is not None:
        candidate_paths = app.security_relevant_classes(registry)
    else:
        candidate_paths = sorted(a_classes)

    # Precompute feasible app classes per snippet class.
    options: list[tuple[tuple[str, ...], list[tuple[tuple[str, ...], tuple]]]] = []
    for cpath, s_pdgs in s_classes:
        feasible_here = []
        for apath in candidate_paths:
            bound = _class_binding(s_pdgs, a_classes[apath], cfg)
            if bound is not None:
                feasible_here.append((apath, bound))
        if not feasible_here:
            return None
        options.append((cpath, feasible_here))

    chosen: dict[tuple[str, ...], tuple[tuple[str, ...], tuple]] = {}

    def place(k: int) -> bool:
        if k == len(options):
            return True
        cpath, feasible_here = options[k]
        for apath, bound in feasible_here:
            if any(prev_a == apath for prev_a, _ in chosen.values()):
                continue
            ok = True
            for prev_c, (prev_a, _) in chosen.items():
                if _is_prefix(prev_c, cpath) and not _is_prefix(prev_a, apath):
                    ok = False
                elif _is_prefix(cpath, prev_c) and not _is_prefix(apath, prev_a):
                    ok = False
                if not ok:
                    break
            if not ok:
                continue
            chosen[cpath] = (apath, bound)
            if place(k + 1):
                return True
            del chosen[cpath]
        return False

    if not place(0):
        return None

    bindings: dict[str, str] = {}
    scores: dict[str, tuple] = {}
    tm_flag = False
    for _, (_, (b, s, tm)) in sorted(chosen.items()):
        bindings.update(b)
        scores.update(s)
        tm_flag = tm_flag or tm
    return CloneMatch(
        snippet_id=snippet.unit_id,
        app_id=app.unit_id,
        bindings=bindings,
        scores=scores,
        flags={"empty_trustmanager_case": tm_flag},
    )
