from collections import Counter

import pytest

from snipscan.frontend import CompileRejection, compile_unit, try_compile, wrap_partial
from snipscan.ir import InstructionKind as K
from snipscan.pdg import build_pdg


def compile_snippet(code, registry):
    return compile_unit(wrap_partial(code), registry)


def only(methods, name=None):
    if name is None:
        assert len(methods) == 1
        return methods[0]
    return next(m for m in methods if m.name == name)


class TestWrapPartial:
    def test_bare_statements(self):
        out = wrap_partial('int a = 1;\nuse(a);')
        assert "class Snippet" in out
        assert "void snippetBody()" in out

    def test_bare_method_gets_class_only(self):
        code = "public boolean verify(String h, SSLSession s) {\n    return true;\n}"
        out = wrap_partial(code)
        assert "class Snippet" in out
        assert "snippetBody" not in out

    def test_complete_class_unchanged(self):
        code = "public class Already {\n    void run() { int x = 1; }\n}\n"
        assert wrap_partial(code) == code

    def test_leading_imports_stay_at_unit_level(self):
        code = "import javax.crypto.Cipher;\nCipher c = Cipher.getInstance(t);"
        out = wrap_partial(code)
        assert out.index("import javax.crypto.Cipher;") < out.index("class Snippet")


class TestCompile:
    def test_verify_true_shape(self, registry):
        code = "public boolean verify(String h, SSLSession s) { return true; }"
        m = only(compile_snippet(code, registry))
        kinds = [i.kind for i in m.instructions]
        assert kinds == [K.CONST_LOAD, K.RETURN]
        assert m.constants == Counter()  # booleans are not constants

    def test_cipher_getinstance_lowering(self, registry):
        m = only(compile_snippet('Cipher.getInstance("AES");', registry))
        const, invoke = m.instructions
        assert const.kind is K.CONST_LOAD and const.detail == "AES"
        assert invoke.kind is K.INVOKE_STATIC
        assert invoke.uses == {const.id}
        assert m.constants == Counter({"AES": 1})
        assert "getInstance" in m.security_method_names

    def test_prose_with_elision_rejected(self, registry):
        with pytest.raises(CompileRejection):
            compile_snippet("first you set up the socket (...) and then retry", registry)

    def test_try_compile_records_reason(self, registry):
        methods, reason = try_compile("int x = ;", registry)
        assert methods is None
        assert reason

    def test_constants_normalization(self, registry):
        code = 'use(0x10, 12L, 1.50f, "text", \'c\', true, null);'
        m = only(compile_snippet(code, registry))
        assert m.constants == Counter({"16": 1, "12": 1, "1.5": 1, "text": 1, "c": 1})

    def test_string_escapes_unescaped(self, registry):
        m = only(compile_snippet('use("a\\nb\\"q");', registry))
        assert m.constants == Counter({'a\nb"q': 1})

    def test_new_object_emits_two_instructions(self, registry):
        m = only(compile_snippet("Object o = new SecureRandom();", registry))
        kinds = [i.kind for i in m.instructions]
        assert kinds == [K.NEW_OBJECT, K.INVOKE_CONSTRUCTOR]
        ctor = m.instructions[1]
        assert m.instructions[0].id in ctor.uses

    def test_array_initializer_lowering(self, registry):
        m = only(compile_snippet("byte[] iv = { 1, 2 };", registry))
        kinds = [i.kind for i in m.instructions]
        assert kinds == [K.ARRAY_NEW, K.CONST_LOAD, K.ARRAY_STORE, K.CONST_LOAD, K.ARRAY_STORE]

    def test_anonymous_class_methods_compiled(self, registry):
        code = """TrustManager tm = new X509TrustManager() {
            public void checkServerTrusted(X509Certificate[] c, String a) { }
            public X509Certificate[] getAcceptedIssuers() { return null; }
        };"""
        methods = compile_snippet(code, registry)
        paths = {m.path_str for m in methods}
        assert "Snippet/snippetBody" in paths
        assert "Snippet/$anon1/checkServerTrusted" in paths
        assert "Snippet/$anon1/getAcceptedIssuers" in paths
        anon = only(methods, "checkServerTrusted")
        assert anon.instructions == []
        assert anon.declared_supertypes == {"X509TrustManager"}

    def test_nested_class_paths(self, registry):
        code = """public class Outer {
            void a() { int x = 1; }
            class Inner {
                void b() { int y = 2; }
            }
        }"""
        methods = compile_unit(code, registry)
        assert {m.path_str for m in methods} == {"Outer/a", "Outer/Inner/b"}

    def test_field_initializers_collected(self, registry):
        code = """public class Holder {
            static final String NAME = "box";
            int size = 3;
            void use() { int k = size; }
        }"""
        methods = compile_unit(code, registry)
        fi = only(methods, "<fieldinit>")
        assert fi.constants == Counter({"box": 1, "3": 1})

    def test_security_names_from_typed_receiver(self, registry):
        code = (
            'Cipher c = Cipher.getInstance("AES/GCM/NoPadding");\n'
            "c.init(1, key);\nbyte[] out = c.doFinal(data);"
        )
        m = only(compile_snippet(code, registry))
        assert m.security_method_names == {"getInstance", "init", "doFinal"}

    def test_unknown_receivers_do_not_contribute_security_names(self, registry):
        m = only(compile_snippet("mystery.doFinal(x); Widget.getInstance();", registry))
        assert m.security_method_names == set()
        assert m.uses_unknown_types

    def test_control_flow_constructs_parse(self, registry):
        code = """int total = 0;
for (int i = 0; i < 10; i++) { total += i; }
while (total > 3) { total = total - 1; }
if (total == 2) { log(total); } else { log(0); }
try { risky(); } catch (Exception e) { recover(); } finally { done(); }
switch (total) { case 1: one(); break; default: other(); }
do { total++; } while (total < 5);
String[] names = new String[4];
for (String n : names) { log(n); }"""
        m = only(compile_snippet(code, registry))
        assert len(m.instructions) > 10


class TestPdgInvariants:
    def test_chain_is_one_block(self, registry):
        m = only(compile_snippet("int a = 1; int b = f(a); return b;", registry))
        pdg = build_pdg(m)
        assert len(m.instructions) == 3
        assert pdg.semantic_blocks == [[0, 1, 2]]

    def test_independent_statements_two_blocks(self, registry):
        m = only(compile_snippet("int a = f(); int b = g();", registry))
        assert len(build_pdg(m).semantic_blocks) == 2

    def test_empty_method_zero_blocks(self, registry):
        methods = compile_unit("class A { void empty() { } }", registry)
        pdg = build_pdg(only(methods))
        assert pdg.semantic_blocks == []
        assert pdg.edges == []

    def test_edges_match_def_use(self, registry):
        code = 'Cipher c = Cipher.getInstance("AES"); c.init(m, k);'
        m = only(compile_snippet(code, registry))
        pdg = build_pdg(m)
        defs = {i.defines: i.id for i in m.instructions if i.defines is not None}
        expected = sorted(
            (defs[v], instr.id)
            for instr in m.instructions
            for v in instr.uses
            if v in defs
        )
        assert sorted(pdg.edges) == expected

    def test_dag_over_value_ids(self, registry):
        code = "int a = 1; a = a + a; int b = a * 2; return b;"
        m = only(compile_snippet(code, registry))
        for a, b in build_pdg(m).edges:
            assert a < b

    def test_renaming_yields_isomorphic_pdg(self, registry):
        code1 = 'Cipher c = Cipher.getInstance("AES"); c.init(mode, spec); byte[] r = c.doFinal(d);'
        code2 = 'Cipher zz = Cipher.getInstance("AES"); zz.init(qq, ww); byte[] yy = zz.doFinal(ee);'
        m1 = only(compile_snippet(code1, registry))
        m2 = only(compile_snippet(code2, registry))
        assert [i.kind for i in m1.instructions] == [i.kind for i in m2.instructions]
        assert build_pdg(m1).edges == build_pdg(m2).edges
        assert build_pdg(m1).semantic_blocks == build_pdg(m2).semantic_blocks

    def test_reordering_independent_statements_keeps_partition(self, registry):
        code1 = "int a = f(); int b = g(); use(a); poke(b);"
        code2 = "int b = g(); int a = f(); use(a); poke(b);"
        p1 = build_pdg(only(compile_snippet(code1, registry)))
        p2 = build_pdg(only(compile_snippet(code2, registry)))
        shape1 = sorted(tuple(sorted(len(b) for b in p.semantic_blocks)) for p in (p1,))
        shape2 = sorted(tuple(sorted(len(b) for b in p.semantic_blocks)) for p in (p2,))
        assert shape1 == shape2

    def test_ir_dump_shape(self, registry):
        m = only(compile_snippet('Cipher.getInstance("AES");', registry))
        d = build_pdg(m).to_json_dict()
        assert set(d) == {"path", "instructions", "edges", "constants", "sec_methods", "supertypes"}
        assert d["instructions"][0] == {"id": 0, "kind": "ConstLoad", "uses": [], "defines": 0}

    def test_ir_json_roundtrip(self, registry):
        from snipscan.ir import method_from_json_dict

        code = 'Cipher c = Cipher.getInstance("AES"); c.init(m, k);'
        m = only(compile_snippet(code, registry))
        restored = method_from_json_dict(build_pdg(m).to_json_dict())
        assert restored.qualified_path == m.qualified_path
        assert restored.constants == m.constants
        assert restored.security_method_names == m.security_method_names
        assert build_pdg(restored).edges == build_pdg(m).edges


def test_compile_is_total_over_golden_fixtures(registry):
    from snipscan.synth import golden_cases

    for case in golden_cases():
        methods, reason = try_compile(wrap_partial(case.code), registry)
        assert methods is not None, (case.rule_id, reason)
