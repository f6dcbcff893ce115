from snipscan.facts import ProvKind, extract_facts


class TestProvenance:
    def test_zeroed_array(self):
        f = extract_facts("byte[] data = new byte[16];\nIvParameterSpec s = new IvParameterSpec(data);")
        assert f.iv_sources[0].kind is ProvKind.ZEROED
        assert f.iv_sources[0].bits == 128

    def test_literal_array_static(self):
        f = extract_facts("byte[] data = { 1, 2, 3, 4 };\nIvParameterSpec s = new IvParameterSpec(data);")
        assert f.iv_sources[0].kind is ProvKind.STATIC
        assert f.iv_sources[0].bits == 32

    def test_string_getbytes(self):
        f = extract_facts('byte[] raw = "abcd".getBytes();\nSecretKeySpec k = new SecretKeySpec(raw, "AES");')
        assert f.key_sources[0].kind is ProvKind.STRING_BYTES

    def test_mutation_upgrades_to_random(self):
        code = (
            "byte[] salt = new byte[8];\n"
            "SecureRandom r = new SecureRandom();\n"
            "r.nextBytes(salt);\n"
            "PBEKeySpec spec = new PBEKeySpec(pw, salt, 1000, 256);"
        )
        f = extract_facts(code)
        assert f.pbe_specs[0]["salt"].kind is ProvKind.RANDOM
        assert f.pbe_specs[0]["salt"].bits == 64
        assert f.pbe_specs[0]["iterations"] == 1000

    def test_keygen_provenance(self):
        code = (
            'KeyGenerator kg = KeyGenerator.getInstance("AES");\n'
            "SecretKey k = kg.generateKey();\n"
            'SecretKeySpec spec = new SecretKeySpec(k.getEncoded(), "AES");'
        )
        f = extract_facts(code)
        assert f.key_sources[0].kind in (ProvKind.GENERATED, ProvKind.PROVIDER)

    def test_variable_chain_resolution(self):
        code = 'String seedText = "fixed";\nbyte[] seed = seedText.getBytes();\nSecureRandom r = new SecureRandom();\nr.setSeed(seed);'
        f = extract_facts(code)
        (ev,) = [e for e in f.rng_events if e[2] == "setSeed"]
        assert ev[3].kind is ProvKind.STRING_BYTES


class TestCallFacts:
    def test_transformation_collection(self):
        f = extract_facts('Cipher c = Cipher.getInstance("AES/CBC/PKCS5Padding");')
        assert f.transformations == ["AES/CBC/PKCS5Padding"]

    def test_keypair_size_via_variable(self):
        f = extract_facts(
            'KeyPairGenerator g = KeyPairGenerator.getInstance("RSA");\ng.initialize(1024);'
        )
        assert f.keypair_sizes == [("RSA", 1024)]

    def test_keypair_size_via_chain(self):
        f = extract_facts('KeyPairGenerator.getInstance("RSA").initialize(4096);')
        assert f.keypair_sizes == [("RSA", 4096)]

    def test_cipher_suites_from_array_argument(self):
        code = 'socket.setEnabledCipherSuites(new String[] { "A_SUITE", "B_SUITE" });'
        f = extract_facts(code)
        assert f.cipher_suites == ["A_SUITE", "B_SUITE"]

    def test_cipher_suites_via_variable(self):
        code = 'String[] suites = new String[] { "ONLY" };\nsock.setEnabledCipherSuites(suites);'
        f = extract_facts(code)
        assert f.cipher_suites == ["ONLY"]

    def test_rng_event_ordering(self):
        code = (
            "SecureRandom sr = new SecureRandom();\n"
            "byte[] b = new byte[8];\n"
            "sr.nextBytes(b);\n"
            'sr.setSeed("more".getBytes());'
        )
        f = extract_facts(code)
        kinds = [k for _, _, k, _ in f.rng_events]
        assert kinds == ["nextBytes", "setSeed"]


class TestBodies:
    def test_verify_returning_true(self):
        code = "public boolean verify(String h, SSLSession s) { return true; }"
        f = extract_facts(code)
        (body,) = f.bodies["verify"]
        assert body.returns_constant_true()

    def test_empty_trustmanager_bodies(self):
        code = (
            "public void checkServerTrusted(X509Certificate[] c, String a) "
            "throws CertificateException { }"
        )
        f = extract_facts(code)
        (body,) = f.bodies["checkServerTrusted"]
        assert body.is_empty and body.is_trivial

    def test_nontrivial_body_calls(self):
        code = (
            "public void checkServerTrusted(X509Certificate[] c, String a) "
            "throws CertificateException { c[0].checkValidity(); }"
        )
        f = extract_facts(code)
        (body,) = f.bodies["checkServerTrusted"]
        assert not body.is_trivial
        assert body.calls == {"checkValidity"}

    def test_credential_context_detection(self):
        assert extract_facts('String password = read();').credential_context
        assert not extract_facts("int counter = 1;").credential_context

    def test_never_raises_on_garbage(self):
        for junk in ("", "((((", "'", '"', "int x = ;", "☃ snowman"):
            extract_facts(junk)
