from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from snipscan import synth
from snipscan.clones import (
    CompiledCode,
    MatchConfig,
    TRUST_MANAGER_METHODS,
    embed,
    jaccard_containment,
    jaccard_similarity,
    match_empty_trustmanager,
    match_method,
    match_snippet,
)
from snipscan.frontend import compile_unit, wrap_partial
from snipscan.ir import KIND_ORDER
from snipscan.pdg import build_pdg


def compiled(uid, code, registry):
    return CompiledCode.from_methods(uid, compile_unit(wrap_partial(code), registry))


def host_class(bodies, cls="Host"):
    methods = []
    for k, stmts in enumerate(bodies):
        inner = "\n".join("        " + line for line in stmts)
        methods.append(f"    void task{k}() {{\n{inner}\n    }}")
    return f"public class {cls} {{\n" + "\n\n".join(methods) + "\n}"


# --- oracles -----------------------------------------------------------------

def expand_multiset(vec):
    """Count vector -> set of tagged elements (dimension, copy index)."""
    return {(i, k) for i, count in enumerate(vec) for k in range(count)}


def set_jaccard(a, b):
    if not a and not b:
        return 1.0
    return len(a & b) / len(a | b)


def containment_oracle(x_counter, y_counter):
    xs = expand_multiset([x_counter.get(k, 0) for k in sorted(set(x_counter) | set(y_counter))])
    # tag by element identity instead of index for dict inputs
    xs = {(k, i) for k, c in x_counter.items() for i in range(c)}
    ys = {(k, i) for k, c in y_counter.items() for i in range(c)}
    if not xs:
        return 1.0
    return len(xs & ys) / len(xs)


# --- vector similarity ----------------------------------------------------------

class TestJaccardSimilarity:
    def test_identical_nonzero(self):
        assert jaccard_similarity((2, 1, 3), (2, 1, 3)) == 1.0

    def test_zero_vs_nonzero(self):
        assert jaccard_similarity((0, 0, 0), (1, 2, 0)) == 0.0

    def test_worked_example(self):
        assert jaccard_similarity((2, 1, 0), (1, 1, 1)) == 0.5

    def test_both_zero_defined_one(self):
        assert jaccard_similarity((0, 0), (0, 0)) == 1.0

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            jaccard_similarity((1, 2), (1, 2, 3))

    @given(st.lists(st.integers(0, 4), min_size=1, max_size=8).flatmap(
        lambda x: st.tuples(st.just(x), st.lists(st.integers(0, 4), min_size=len(x), max_size=len(x)))
    ))
    def test_symmetry_bounds_and_self(self, pair):
        x, y = pair
        js = jaccard_similarity(x, y)
        assert js == jaccard_similarity(y, x)
        assert 0.0 <= js <= 1.0
        assert jaccard_similarity(x, x) == 1.0

    @given(st.integers(1, 8).flatmap(
        lambda d: st.tuples(
            st.lists(st.integers(0, 1), min_size=d, max_size=d),
            st.lists(st.integers(0, 1), min_size=d, max_size=d),
        )
    ))
    def test_binary_vectors_match_classical_jaccard(self, pair):
        x, y = pair
        num = sum(a & b for a, b in zip(x, y))
        den = sum(a | b for a, b in zip(x, y))
        classical = 1.0 if den == 0 else num / den
        assert jaccard_similarity(x, y) == pytest.approx(classical)

    def test_multiset_expansion_oracle_exhaustive_random(self):
        rng = np.random.default_rng(2024)
        for _ in range(1000):
            d = int(rng.integers(1, 9))
            x = [int(v) for v in rng.integers(0, 5, size=d)]
            y = [int(v) for v in rng.integers(0, 5, size=d)]
            assert jaccard_similarity(x, y) == pytest.approx(
                set_jaccard(expand_multiset(x), expand_multiset(y)), abs=0.0
            )


class TestJaccardContainment:
    def test_subset(self):
        assert jaccard_containment({"a", "b"}, {"a", "b", "c"}) == 1.0

    def test_half(self):
        assert jaccard_containment({"a", "b"}, {"a"}) == 0.5

    def test_multiset_multiplicity(self):
        assert jaccard_containment(Counter({"a": 2}), Counter({"a": 1})) == 0.5

    def test_empty_contained_everywhere(self):
        assert jaccard_containment(Counter(), Counter({"a": 3})) == 1.0
        assert jaccard_containment(set(), set()) == 1.0

    def test_multiset_expansion_oracle(self):
        rng = np.random.default_rng(7)
        keys = list("abcdefgh")
        for _ in range(1000):
            x = Counter({k: int(rng.integers(0, 5)) for k in rng.choice(keys, 3)})
            y = Counter({k: int(rng.integers(0, 5)) for k in rng.choice(keys, 3)})
            x = Counter({k: v for k, v in x.items() if v})
            y = Counter({k: v for k, v in y.items() if v})
            assert jaccard_containment(x, y) == pytest.approx(containment_oracle(x, y), abs=0.0)


class TestEmbed:
    def _vec_dict(self, vec):
        return {
            k.value: (vec[2 * i], vec[2 * i + 1])
            for i, k in enumerate(KIND_ORDER)
            if vec[2 * i] or vec[2 * i + 1]
        }

    def test_singleton_constload(self, registry):
        code = "class A { void m() { use(1); } }"
        # use(1) -> ConstLoad + InvokeVirtual; take a real singleton instead:
        m = compile_unit("class A { void m() { int x = 1; } }", registry)[0]
        pdg = build_pdg(m)
        (block,) = pdg.semantic_blocks
        assert self._vec_dict(embed(pdg, block)) == {"ConstLoad": (1, 0)}

    def test_chain_example(self, registry):
        m = compile_unit('class A { int m() { return Integer.parse("5"); } }', registry)[0]
        pdg = build_pdg(m)
        (block,) = pdg.semantic_blocks
        assert self._vec_dict(embed(pdg, block)) == {
            "ConstLoad": (1, 1), "InvokeStatic": (1, 1), "Return": (1, 0),
        }

    def test_two_constloads_one_binop(self, registry):
        m = compile_unit("class A { int m() { int x = 1 + 2; return x; } }", registry)[0]
        pdg = build_pdg(m)
        (block,) = pdg.semantic_blocks
        vec = self._vec_dict(embed(pdg, block))
        assert vec["ConstLoad"] == (2, 1)
        assert vec["BinaryOp"] == (1, 1)


# --- method- and snippet-level matching ----------------------------------------

class TestMatchMethod:
    def test_verbatim(self, registry):
        p = synth.plants()[0]
        snip = compiled("s", p.snippet_text(), registry)
        app = compiled("a", host_class([p.render_stmts()]), registry)
        sm = snip.pdgs[0]
        am = next(x for x in app.pdgs if x.method.name == "task0")
        mm = match_method(sm, am)
        assert mm is not None
        assert all(score == 1.0 for _, _, score in mm.block_pairs)

    def test_constant_change_breaks_containment(self, registry):
        snip = compiled("s", 'Cipher c = Cipher.getInstance("AES");', registry)
        app = compiled("a", host_class([['Cipher c = Cipher.getInstance("DES");']]), registry)
        sm = snip.pdgs[0]
        am = next(x for x in app.pdgs if x.method.name == "task0")
        assert match_method(sm, am) is None

    def test_extra_independent_blocks_tolerated(self, registry):
        p = synth.plants()[0]
        snip = compiled("s", p.snippet_text(), registry)
        stmts = p.render_stmts() + ["int unrelated = 5;", 'String tag = "x";']
        app = compiled("a", host_class([stmts]), registry)
        sm = snip.pdgs[0]
        am = next(x for x in app.pdgs if x.method.name == "task0")
        assert match_method(sm, am) is not None


class TestMatchSnippet:
    def test_two_methods_same_class(self, registry):
        snippet_code = """public class Pair {
            void first() { Cipher c = Cipher.getInstance("AES/GCM/NoPadding"); }
            void second() { SecureRandom r = new SecureRandom(); r.nextBytes(buf); }
        }"""
        app_code = """public class Together {
            void alpha() { Cipher k = Cipher.getInstance("AES/GCM/NoPadding"); }
            void beta() { SecureRandom q = new SecureRandom(); q.nextBytes(data); }
        }"""
        snip = compiled("s", snippet_code, registry)
        app = compiled("a", app_code, registry)
        assert match_snippet(snip, app, MatchConfig(), registry) is not None

    def test_methods_split_across_classes_rejected(self, registry):
        snippet_code = """public class Pair {
            void first() { Cipher c = Cipher.getInstance("AES/GCM/NoPadding"); }
            void second() { SecureRandom r = new SecureRandom(); r.nextBytes(buf); }
        }"""
        app_code = """public class One {
            void alpha() { Cipher k = Cipher.getInstance("AES/GCM/NoPadding"); }
        }
        class Two {
            void beta() { SecureRandom q = new SecureRandom(); q.nextBytes(data); }
        }"""
        snip = compiled("s", snippet_code, registry)
        app = compiled("a", app_code, registry)
        assert match_snippet(snip, app, MatchConfig(), registry) is None

    def test_planted_among_many_classes(self, registry):
        p = synth.plants()[8]  # aes-ecb-a
        snip = compiled("s", p.snippet_text(), registry)
        filler = "\n".join(
            f"class Filler{i} {{ int f{i}() {{ int v{i} = {i}; return v{i}; }} }}"
            for i in range(100)
        )
        app_code = filler + "\n" + host_class([p.render_stmts()], cls="Needle")
        app = compiled("a", app_code, registry)
        match = match_snippet(snip, app, MatchConfig(), registry)
        assert match is not None
        assert all("Needle" in v for v in match.bindings.values())
        # candidate filter actually prunes: only the needle class survives
        assert app.security_relevant_classes(registry) == [("Needle",)]

    def test_iteration_order_independence(self, registry):
        p = synth.plants()[0]
        snip = compiled("s", p.snippet_text(), registry)
        app_code = host_class([p.render_stmts()], cls="Zed") + "\n" + host_class(
            [p.render_stmts()], cls="Abc"
        ).replace("task0", "other0")
        app = compiled("a", app_code, registry)
        m1 = match_snippet(snip, app, MatchConfig(), registry)
        reversed_app = CompiledCode(unit_id="a", pdgs=list(reversed(app.pdgs)))
        m2 = match_snippet(snip, reversed_app, MatchConfig(), registry)
        assert (m1 is None) == (m2 is None)
        assert m1.bindings == m2.bindings


class TestEmptyTrustManager:
    def test_listing_shape_matches_and_flags(self, registry):
        snip = compiled("tm", synth.trustmanager_plant_text(), registry)
        app_code = """public class NetClient {
            void relax() {
                TrustManager tm = new X509TrustManager() {
                    public void checkClientTrusted(X509Certificate[] c, String a) throws CertificateException { }
                    public void checkServerTrusted(X509Certificate[] c, String a) throws CertificateException { }
                    public X509Certificate[] getAcceptedIssuers() { return null; }
                };
            }
        }"""
        app = compiled("netapp", app_code, registry)
        match = match_snippet(snip, app, MatchConfig(), registry)
        assert match is not None
        assert match.flags["empty_trustmanager_case"] is True

    def test_empty_oncreate_not_matched(self, registry):
        snip = compiled("tm", synth.trustmanager_plant_text(), registry)
        sm = next(p for p in snip.pdgs if p.method.name == "checkServerTrusted")
        app = compiled("a", "public class A { void onCreate() { } }", registry)
        assert match_empty_trustmanager(sm, app) == []

    def test_nonempty_body_falls_back(self, registry):
        code = """TrustManager tm = new X509TrustManager() {
            public void checkServerTrusted(X509Certificate[] c, String a) throws CertificateException {
                Log.d("tls", "checking");
            }
        };"""
        snip = compiled("tm", code, registry)
        sm = next(p for p in snip.pdgs if p.method.name == "checkServerTrusted")
        app = compiled("a", "public class A { void m() { } }", registry)
        assert match_empty_trustmanager(sm, app) is None  # not the empty shape

    def test_trio_names(self):
        assert TRUST_MANAGER_METHODS == {
            "checkClientTrusted", "checkServerTrusted", "getAcceptedIssuers",
        }


class TestThresholds:
    def _chain(self, extra=0):
        return "int acc = 7;\n" + "acc = acc + acc;\n" * (6 + extra) + "return acc;"

    def test_verbatim_matches_at_091_and_100(self, registry):
        snip = compiled("s", self._chain(), registry)
        app = compiled("a", host_class([self._chain().splitlines()]), registry)
        sm, am = snip.pdgs[0], next(x for x in app.pdgs if x.method.name == "task0")
        assert match_method(sm, am, MatchConfig(similarity_threshold=0.91)) is not None
        assert match_method(sm, am, MatchConfig(similarity_threshold=1.0)) is not None

    def test_ten_over_eleven_brackets_the_threshold(self, registry):
        snip = compiled("s", self._chain(), registry)
        app = compiled("a", host_class([self._chain(extra=1).splitlines()]), registry)
        sm, am = snip.pdgs[0], next(x for x in app.pdgs if x.method.name == "task0")
        sv = embed(sm, sm.semantic_blocks[0])
        av = embed(am, am.semantic_blocks[0])
        assert sum(sv) == 10 and sum(av) == 11
        assert jaccard_similarity(sv, av) == pytest.approx(10 / 11)
        assert match_method(sm, am, MatchConfig(similarity_threshold=0.90)) is not None
        assert match_method(sm, am, MatchConfig(similarity_threshold=0.91)) is None

    def test_bad_config_rejected(self):
        with pytest.raises(ValueError):
            MatchConfig(similarity_threshold=0.0)
        with pytest.raises(ValueError):
            MatchConfig(containment_threshold=0.9)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 19))
def test_robustness_suite_randomized_over_plants(plant_idx):
    from snipscan.registry import load_registry

    registry = load_registry()
    p = synth.plants()[plant_idx]
    snip = compiled("s", p.snippet_text(), registry)
    keep = [
        synth.variant_renamed(p),
        synth.variant_reordered(p),
        synth.variant_with_insertions(p),
    ]
    for stmts in keep:
        app = compiled("a", host_class([stmts]), registry)
        assert match_snippet(snip, app, MatchConfig(), registry) is not None
    destroy = [
        [synth.variant_constant_mutated(p)],
        [synth.variant_security_removed(p)],
        synth.variant_split(p),
    ]
    for bodies in destroy:
        app = compiled("a", host_class(bodies), registry)
        assert match_snippet(snip, app, MatchConfig(), registry) is None
