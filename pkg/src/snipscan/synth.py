"""Bundled synthetic fixtures: rule-table golden snippets, a mini post
dump, plantable clone templates, and a labeled training corpus.

Everything here is deterministic. The golden cases cover every rule in
the catalog with the label its table column dictates; the plant
templates are structured statement lists so clone-robustness mutations
(renaming, reordering, insertion, constant change, call removal,
splitting) can be applied mechanically and correctly.
"""

from __future__ import annotations

import html
import re
from dataclasses import dataclass

from .rules import Context

__all__ = [
    "GoldenCase",
    "LISTING_CASES",
    "Plant",
    "PlantStmt",
    "golden_cases",
    "labeled_corpus",
    "mini_dump_xml",
    "mini_comments",
    "plants",
    "synthetic_app_sources",
]


@dataclass(frozen=True)
class GoldenCase:
    rule_id: str
    expected: str  # secure | insecure
    code: str
    context: Context | None = None  # None: default by TLS adjacency
    category: str = ""


_EMPTY_TM = """TrustManager tm = new X509TrustManager() {
    public void checkClientTrusted(X509Certificate[] chain, String authType) throws CertificateException { }
    public void checkServerTrusted(X509Certificate[] chain, String authType) throws CertificateException { }
    public X509Certificate[] getAcceptedIssuers() { return null; }
};"""

_STATIC_KEY_IV = """byte[] rawSecretKey = {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00};
String iv = "00000000";
byte[] iv = new byte[] { 0x0, 0x1, 0x2, 0x3, 0x4, 0x5, 0x6, 0x7, 0x8, 0x9, 0xA, 0xB, 0xC, 0xD, 0xE, 0xF };"""

_STRING_SEED = """byte[] keyStart = "this is a key".getBytes();
SecureRandom sr =
    SecureRandom.getInstance("SHA1PRNG");
sr.setSeed(keyStart);"""

_VERIFY_TRUE = """@Override
public boolean verify(String hostname, SSLSession session) {
    return true;
}"""

# The four appendix shapes: hostname verifier, static key/IV, string
# seed, empty trust manager: with their expected label and category.
LISTING_CASES: list[tuple[str, str, str, str]] = [
    ("listing-verify-true", _VERIFY_TRUE, "insecure", "TLS"),
    ("listing-static-key-iv", _STATIC_KEY_IV, "insecure", "SymmetricCrypto"),
    ("listing-string-seed", _STRING_SEED, "insecure", "SecureRandom"),
    ("listing-empty-trustmanager", _EMPTY_TM, "insecure", "TLS"),
]


def golden_cases() -> list[GoldenCase]:
    """One snippet per rule-catalog entry, labeled per its table column.
    The two scenario-dependent entries appear under explicit contexts."""
    CS, NCS = Context.CLIENT_SERVER, Context.NON_CLIENT_SERVER
    g: list[GoldenCase] = []

    def add(rule_id, expected, code, context=None, category=""):
        g.append(GoldenCase(rule_id, expected, code, context, category))

    # --- TLS ---------------------------------------------------------
    add("tls-hv-allow-all", "insecure", """HttpsURLConnection conn = (HttpsURLConnection) url.openConnection();
conn.setHostnameVerifier(new AllowAllHostnameVerifier());
conn.connect();""", category="TLS")
    add("tls-hv-browser-compat", "secure", """SSLSocketFactory factory = SSLSocketFactory.getSocketFactory();
factory.setHostnameVerifier(new BrowserCompatHostnameVerifier());""", category="TLS")
    add("tls-hv-strict", "secure", """SSLSocketFactory factory = SSLSocketFactory.getSocketFactory();
factory.setHostnameVerifier(new StrictHostnameVerifier());""", category="TLS")
    add("tls-tm-trust-all", "insecure", _EMPTY_TM, category="TLS")
    add("tls-tm-validity-only", "insecure", """TrustManager tm = new X509TrustManager() {
    public void checkClientTrusted(X509Certificate[] chain, String authType) throws CertificateException {
        chain[0].checkValidity();
    }
    public void checkServerTrusted(X509Certificate[] chain, String authType) throws CertificateException {
        for (X509Certificate cert : chain) {
            cert.checkValidity();
        }
    }
    public X509Certificate[] getAcceptedIssuers() { return new X509Certificate[0]; }
};""", category="TLS")
    add("tls-tm-bad-pinning", "insecure", """TrustManager tm = new X509TrustManager() {
    public void checkClientTrusted(X509Certificate[] chain, String authType) throws CertificateException {
        chain[0].checkValidity();
    }
    public void checkServerTrusted(X509Certificate[] chain, String authType) throws CertificateException {
        BigInteger serial = chain[0].getSerialNumber();
        if (!expectedSerial.equals(serial)) {
            throw new CertificateException("unexpected certificate serial");
        }
    }
    public X509Certificate[] getAcceptedIssuers() { return new X509Certificate[0]; }
};""", category="TLS")
    add("tls-tm-pinning", "secure", """TrustManager tm = new X509TrustManager() {
    public void checkClientTrusted(X509Certificate[] chain, String authType) throws CertificateException {
        throw new CertificateException("client certificates unsupported");
    }
    public void checkServerTrusted(X509Certificate[] chain, String authType) throws CertificateException {
        MessageDigest md = MessageDigest.getInstance("SHA-256");
        byte[] fingerprint = md.digest(chain[0].getEncoded());
        if (!MessageDigest.isEqual(fingerprint, expectedFingerprint)) {
            throw new CertificateException("certificate is not pinned");
        }
    }
    public X509Certificate[] getAcceptedIssuers() { return new X509Certificate[0]; }
};""", category="TLS")
    add("tls-tm-default", "secure", """TrustManagerFactory tmf = TrustManagerFactory.getInstance(TrustManagerFactory.getDefaultAlgorithm());
tmf.init((KeyStore) null);
SSLContext sslContext = SSLContext.getInstance("TLSv1.2");
sslContext.init(null, tmf.getTrustManagers(), null);""", category="TLS")
    add("tls-version-ge-1.1", "secure", """SSLContext ctx = SSLContext.getInstance("TLSv1.2");
ctx.init(null, null, new SecureRandom());
SSLSocketFactory factory = ctx.getSocketFactory();""", category="TLS")
    add("tls-version-lt-1.1", "insecure", """SSLContext ctx = SSLContext.getInstance("SSLv3");
ctx.init(null, null, null);
SSLSocketFactory factory = ctx.getSocketFactory();""", category="TLS")
    add("tls-cipher-suite-strong", "secure", """SSLSocket socket = (SSLSocket) factory.createSocket(host, 443);
socket.setEnabledProtocols(new String[] { "TLSv1.2" });
socket.setEnabledCipherSuites(new String[] { "TLS_ECDHE_RSA_WITH_AES_128_GCM_SHA256" });
socket.startHandshake();""", category="TLS")
    add("tls-cipher-suite-weak", "insecure", """SSLSocket socket = (SSLSocket) factory.createSocket(host, 443);
socket.setEnabledCipherSuites(new String[] { "SSL_RSA_WITH_RC4_128_MD5" });
socket.startHandshake();""", category="TLS")
    add("tls-osse-cancel", "secure", """@Override
public void onReceivedSslError(WebView view, SslErrorHandler handler, SslError error) {
    handler.cancel();
}""", category="TLS")
    add("tls-osse-proceed", "insecure", """@Override
public void onReceivedSslError(WebView view, SslErrorHandler handler, SslError error) {
    handler.proceed();
}""", category="TLS")

    # --- symmetric ciphers -------------------------------------------
    keygen = 'KeyGenerator kg = KeyGenerator.getInstance("AES");\nSecretKey key = kg.generateKey();\n'
    add("sym-cipher-aes-gcm", "secure",
        keygen + 'Cipher cipher = Cipher.getInstance("AES/GCM/NoPadding");\ncipher.init(Cipher.ENCRYPT_MODE, key);',
        category="SymmetricCrypto")
    add("sym-cipher-aes-cfb", "secure",
        keygen + 'Cipher cipher = Cipher.getInstance("AES/CFB/NoPadding");\ncipher.init(Cipher.ENCRYPT_MODE, key);',
        category="SymmetricCrypto")
    aes_cbc = keygen + 'Cipher cipher = Cipher.getInstance("AES/CBC/PKCS5Padding");\ncipher.init(Cipher.ENCRYPT_MODE, key);\nbyte[] iv = cipher.getIV();'
    add("sym-cipher-aes-cbc", "secure", aes_cbc, context=NCS, category="SymmetricCrypto")
    add("sym-cipher-aes-cbc-client-server", "insecure", aes_cbc, context=CS, category="SymmetricCrypto")
    add("sym-cipher-aes-ecb", "insecure",
        keygen + 'Cipher cipher = Cipher.getInstance("AES");\ncipher.init(Cipher.ENCRYPT_MODE, key);',
        category="SymmetricCrypto")
    add("sym-cipher-rc2", "insecure",
        'Cipher cipher = Cipher.getInstance("RC2");\ncipher.init(Cipher.ENCRYPT_MODE, key);',
        category="SymmetricCrypto")
    add("sym-cipher-rc4", "insecure",
        'Cipher cipher = Cipher.getInstance("RC4");\ncipher.init(Cipher.ENCRYPT_MODE, key);',
        category="SymmetricCrypto")
    add("sym-cipher-des", "insecure",
        'Cipher cipher = Cipher.getInstance("DES/CBC/PKCS5Padding");\ncipher.init(Cipher.ENCRYPT_MODE, key);',
        category="SymmetricCrypto")
    add("sym-cipher-3des", "insecure",
        'Cipher cipher = Cipher.getInstance("DESede/CBC/PKCS5Padding");\ncipher.init(Cipher.ENCRYPT_MODE, key);',
        category="SymmetricCrypto")
    add("sym-cipher-blowfish", "insecure",
        'Cipher cipher = Cipher.getInstance("Blowfish");\ncipher.init(Cipher.ENCRYPT_MODE, key);',
        category="SymmetricCrypto")

    # --- key material -------------------------------------------------
    add("sym-key-generated", "secure", """KeyGenerator keyGen = KeyGenerator.getInstance("AES");
keyGen.init(128);
SecretKey secretKey = keyGen.generateKey();
Cipher cipher = Cipher.getInstance("AES/GCM/NoPadding");
cipher.init(Cipher.ENCRYPT_MODE, secretKey);""", category="SymmetricCrypto")
    add("sym-key-provider", "secure", """KeyStore keyStore = KeyStore.getInstance("AndroidKeyStore");
keyStore.load(null);
Key key = keyStore.getKey("wrap", null);
Cipher cipher = Cipher.getInstance("AES/GCM/NoPadding");
cipher.init(Cipher.DECRYPT_MODE, key);""", category="SymmetricCrypto")
    add("sym-key-static", "insecure", """byte[] keyBytes = {0x21, 0x42, 0x13, 0x54, 0x26, 0x75, 0x18, 0x39, 0x21, 0x42, 0x13, 0x54, 0x26, 0x75, 0x18, 0x39};
SecretKeySpec keySpec = new SecretKeySpec(keyBytes, "AES");
Cipher cipher = Cipher.getInstance("AES/GCM/NoPadding");
cipher.init(Cipher.ENCRYPT_MODE, keySpec);""", category="SymmetricCrypto")
    add("sym-key-bad-derivation", "insecure", """byte[] raw = "ThisIsSecretEncryptionKey".getBytes();
SecretKeySpec keySpec = new SecretKeySpec(raw, "AES");
Cipher cipher = Cipher.getInstance("AES/CFB/NoPadding");
cipher.init(Cipher.ENCRYPT_MODE, keySpec);""", category="SymmetricCrypto")

    # --- initialization vectors ---------------------------------------
    add("sym-iv-generated", "secure", """byte[] ivBytes = new byte[16];
SecureRandom random = new SecureRandom();
random.nextBytes(ivBytes);
IvParameterSpec ivSpec = new IvParameterSpec(ivBytes);
KeyGenerator kg = KeyGenerator.getInstance("AES");
SecretKey key = kg.generateKey();
Cipher cipher = Cipher.getInstance("AES/CFB/NoPadding");
cipher.init(Cipher.ENCRYPT_MODE, key, ivSpec);""", category="SymmetricCrypto")
    add("sym-iv-provider", "secure", """KeyGenerator kg = KeyGenerator.getInstance("AES");
SecretKey key = kg.generateKey();
Cipher cipher = Cipher.getInstance("AES/CFB/NoPadding");
cipher.init(Cipher.ENCRYPT_MODE, key);
byte[] param = cipher.getIV();""", category="SymmetricCrypto")
    add("sym-iv-zeroed", "insecure", """byte[] iv = new byte[16];
IvParameterSpec ivSpec = new IvParameterSpec(iv);
Cipher cipher = Cipher.getInstance("AES/CFB/NoPadding");
cipher.init(Cipher.ENCRYPT_MODE, key, ivSpec);""", category="SymmetricCrypto")
    add("sym-iv-static", "insecure", """byte[] iv = new byte[] { 0x0, 0x1, 0x2, 0x3, 0x4, 0x5, 0x6, 0x7, 0x8, 0x9, 0xA, 0xB, 0xC, 0xD, 0xE, 0xF };
IvParameterSpec ivSpec = new IvParameterSpec(iv);
Cipher cipher = Cipher.getInstance("AES/CFB/NoPadding");
cipher.init(Cipher.ENCRYPT_MODE, key, ivSpec);""", category="SymmetricCrypto")
    add("sym-iv-bad-derivation", "insecure", """byte[] ivBytes = "0123456789abcdef".getBytes();
IvParameterSpec ivSpec = new IvParameterSpec(ivBytes);
Cipher cipher = Cipher.getInstance("AES/CFB/NoPadding");
cipher.init(Cipher.ENCRYPT_MODE, key, ivSpec);""", category="SymmetricCrypto")

    # --- password-based encryption -------------------------------------
    pbe_random_salt = """byte[] salt = new byte[{n}];
SecureRandom random = new SecureRandom();
random.nextBytes(salt);
PBEKeySpec spec = new PBEKeySpec(password, salt, {iters}, 256);
SecretKeyFactory factory = SecretKeyFactory.getInstance("PBKDF2WithHmacSHA256");
SecretKey key = factory.generateSecret(spec);"""
    add("sym-pbe-iterations-ok", "secure",
        pbe_random_salt.replace("{n}", "8").replace("{iters}", "1000"),
        category="SymmetricCrypto")
    add("sym-pbe-iterations-low", "insecure",
        pbe_random_salt.replace("{n}", "8").replace("{iters}", "100"),
        category="SymmetricCrypto")
    add("sym-pbe-salt-size-ok", "secure",
        pbe_random_salt.replace("{n}", "16").replace("{iters}", "4096"),
        category="SymmetricCrypto")
    add("sym-pbe-salt-size-low", "insecure",
        pbe_random_salt.replace("{n}", "4").replace("{iters}", "4096"),
        category="SymmetricCrypto")
    add("sym-pbe-salt-random", "secure",
        pbe_random_salt.replace("{n}", "8").replace("{iters}", "2048"),
        category="SymmetricCrypto")
    add("sym-pbe-salt-static", "insecure", """byte[] salt = { 0x1, 0x2, 0x3, 0x4, 0x5, 0x6, 0x7, 0x8 };
PBEKeySpec spec = new PBEKeySpec(password, salt, 2000, 256);
SecretKeyFactory factory = SecretKeyFactory.getInstance("PBKDF2WithHmacSHA1");
SecretKey key = factory.generateSecret(spec);""", category="SymmetricCrypto")

    # --- asymmetric -----------------------------------------------------
    add("asym-cipher-rsa", "secure", """KeyPairGenerator kpg = KeyPairGenerator.getInstance("RSA");
kpg.initialize(2048);
KeyPair pair = kpg.generateKeyPair();
Cipher cipher = Cipher.getInstance("RSA");
cipher.init(Cipher.ENCRYPT_MODE, pair.getPublic());""", category="AsymmetricCrypto")
    rsa_pkcs1 = """KeyPairGenerator kpg = KeyPairGenerator.getInstance("RSA");
kpg.initialize(2048);
KeyPair pair = kpg.generateKeyPair();
Cipher cipher = Cipher.getInstance("RSA/ECB/PKCS1Padding");
cipher.init(Cipher.ENCRYPT_MODE, pair.getPublic());"""
    add("asym-padding-pkcs1", "secure", rsa_pkcs1, context=NCS, category="AsymmetricCrypto")
    add("asym-padding-pkcs1-client-server", "insecure", rsa_pkcs1, context=CS, category="AsymmetricCrypto")
    add("asym-padding-oaep", "secure", """KeyPairGenerator kpg = KeyPairGenerator.getInstance("RSA");
kpg.initialize(2048);
KeyPair pair = kpg.generateKeyPair();
Cipher cipher = Cipher.getInstance("RSA/ECB/OAEPWithSHA-256AndMGF1Padding");
cipher.init(Cipher.ENCRYPT_MODE, pair.getPublic());""", category="AsymmetricCrypto")
    add("asym-padding-pkcs8", "secure", """PKCS8EncodedKeySpec keySpec = new PKCS8EncodedKeySpec(encodedKey);
KeyFactory factory = KeyFactory.getInstance("RSA");
PrivateKey privateKey = factory.generatePrivate(keySpec);
Signature signature = Signature.getInstance("SHA256withRSA");
signature.initSign(privateKey);""", category="AsymmetricCrypto")
    add("asym-key-rsa-ok", "secure", """KeyPairGenerator generator = KeyPairGenerator.getInstance("RSA");
generator.initialize(4096);
KeyPair keyPair = generator.genKeyPair();""", category="AsymmetricCrypto")
    add("asym-key-rsa-small", "insecure", """KeyPairGenerator generator = KeyPairGenerator.getInstance("RSA");
generator.initialize(1024);
KeyPair keyPair = generator.genKeyPair();""", category="AsymmetricCrypto")
    add("asym-key-ecc-ok", "secure", """KeyPairGenerator kpg = KeyPairGenerator.getInstance("EC");
kpg.initialize(new ECGenParameterSpec("secp256r1"));
KeyPair pair = kpg.generateKeyPair();""", category="AsymmetricCrypto")
    add("asym-key-ecc-small", "insecure", """KeyPairGenerator kpg = KeyPairGenerator.getInstance("EC");
kpg.initialize(new ECGenParameterSpec("secp192r1"));
KeyPair pair = kpg.generateKeyPair();""", category="AsymmetricCrypto")

    # --- hashes ----------------------------------------------------------
    add("hash-pbkdf-strong", "secure",
        pbe_random_salt.replace("{n}", "12").replace("{iters}", "10000"),
        category="Hash")
    add("hash-pbkdf-weak-md", "insecure", """byte[] salt = new byte[8];
SecureRandom random = new SecureRandom();
random.nextBytes(salt);
PBEKeySpec spec = new PBEKeySpec(password, salt, 2000, 128);
SecretKeyFactory factory = SecretKeyFactory.getInstance("PBKDF2WithHmacMD5");
SecretKey key = factory.generateSecret(spec);""", category="Hash")
    add("hash-signature-strong", "secure", """Signature signature = Signature.getInstance("SHA256withRSA");
signature.initVerify(publicKey);
signature.update(message);
boolean valid = signature.verify(signatureBytes);""", category="Hash")
    add("hash-signature-weak-md", "insecure", """Signature signature = Signature.getInstance("MD5withRSA");
signature.initVerify(publicKey);
signature.update(message);
boolean valid = signature.verify(signatureBytes);""", category="Hash")
    add("hash-credentials-strong", "secure", """String password = input;
MessageDigest digest = MessageDigest.getInstance("SHA-256");
byte[] hashed = digest.digest(password.getBytes());""", category="Hash")
    add("hash-credentials-weak-md", "insecure", """String password = input;
MessageDigest digest = MessageDigest.getInstance("MD5");
byte[] hashed = digest.digest(password.getBytes());""", category="Hash")

    # --- random number generation ----------------------------------------
    add("rng-type-securerandom", "secure", """SecureRandom random = new SecureRandom();
byte[] bytes = new byte[32];
random.nextBytes(bytes);""", category="SecureRandom")
    add("rng-type-random", "insecure", """Random rng = new Random();
byte[] keyBytes = new byte[16];
rng.nextBytes(keyBytes);
SecretKeySpec keySpec = new SecretKeySpec(keyBytes, "AES");""", category="SecureRandom")
    add("rng-seed-self-seeded", "secure", """SecureRandom secureRandom = SecureRandom.getInstance("SHA1PRNG");
byte[] buffer = new byte[20];
secureRandom.nextBytes(buffer);""", category="SecureRandom")
    add("rng-seed-nextbytes-then-setseed", "secure", """SecureRandom sr = new SecureRandom();
byte[] output = new byte[16];
sr.nextBytes(output);
sr.setSeed("supplemental entropy".getBytes());""", category="SecureRandom")
    add("rng-seed-setseed-then-nextbytes", "insecure", """SecureRandom sr = SecureRandom.getInstance("SHA1PRNG");
sr.setSeed(42);
byte[] output = new byte[16];
sr.nextBytes(output);""", category="SecureRandom")
    add("rng-seed-static", "insecure", _STRING_SEED, category="SecureRandom")

    return g


# --- clone plant templates ----------------------------------------------

@dataclass(frozen=True)
class PlantStmt:
    template: str
    defs: tuple[str, ...] = ()
    uses: tuple[str, ...] = ()
    security: bool = False


@dataclass(frozen=True)
class Plant:
    name: str
    stmts: tuple[PlantStmt, ...]
    mutable_const: tuple[str, str]
    insecure: bool
    tls: bool

    def var_names(self) -> list[str]:
        out: list[str] = []
        for s in self.stmts:
            for v in s.defs:
                if v not in out:
                    out.append(v)
        return out

    def render_stmts(self, rename: dict[str, str] | None = None) -> list[str]:
        mapping = rename or {}

        def sub(m: re.Match) -> str:
            name = m.group(1)
            return mapping.get(name, name)

        return [re.sub(r"\{(\w+)\}", sub, s.template) for s in self.stmts]

    def snippet_text(self) -> str:
        return "\n".join(self.render_stmts())

    def independent_adjacent_pair(self) -> int | None:
        """Index i such that stmts i and i+1 can swap without touching a
        def-use relation; None when the plant is a pure chain."""
        for i in range(len(self.stmts) - 1):
            a, b = self.stmts[i], self.stmts[i + 1]
            if (
                not (set(a.defs) & set(b.uses))
                and not (set(b.defs) & set(a.uses))
                and not (set(a.defs) & set(b.defs))
            ):
                return i
        return None


def _p(name: str, insecure: bool, tls: bool, mutable_const: tuple[str, str],
       *stmts: PlantStmt) -> Plant:
    return Plant(name=name, stmts=tuple(stmts), mutable_const=mutable_const,
                 insecure=insecure, tls=tls)


def plants() -> list[Plant]:
    """Twenty plantable snippets; each has a removable security call, a
    mutable constant, and at least three statements."""
    out: list[Plant] = []

    def hv_allow_all(tag: str, host: str) -> Plant:
        return _p(
            f"hv-allow-all-{tag}", True, True, (host, host + ".example"),
            PlantStmt('SSLSocketFactory {fac} = SSLSocketFactory.getSocketFactory();', defs=("fac",)),
            PlantStmt('{fac}.setHostnameVerifier(new AllowAllHostnameVerifier());', uses=("fac",), security=True),
            PlantStmt(f'Socket {{sock}} = {{fac}}.createSocket("{host}", 443);', defs=("sock",), uses=("fac",)),
        )

    def legacy_ctx(tag: str, proto: str) -> Plant:
        return _p(
            f"legacy-context-{tag}", True, True, (proto, "TLSv1.2"),
            PlantStmt(f'SSLContext {{ctx}} = SSLContext.getInstance("{proto}");', defs=("ctx",), security=True),
            PlantStmt('{ctx}.init(null, null, new SecureRandom());', uses=("ctx",)),
            PlantStmt('SSLSocketFactory {fac} = {ctx}.getSocketFactory();', defs=("fac",), uses=("ctx",)),
            PlantStmt('HttpsURLConnection.setDefaultSSLSocketFactory({fac});', uses=("fac",)),
        )

    def weak_suites(tag: str, suite: str) -> Plant:
        return _p(
            f"weak-suites-{tag}", True, True, (suite, "TLS_ECDHE_RSA_WITH_AES_128_GCM_SHA256"),
            PlantStmt('SSLSocketFactory {fac} = (SSLSocketFactory) SSLSocketFactory.getDefault();', defs=("fac",)),
            PlantStmt('SSLSocket {sock} = (SSLSocket) {fac}.createSocket("mail.host.example", 443);', defs=("sock",), uses=("fac",)),
            PlantStmt(f'String[] {{suites}} = new String[] {{ "{suite}" }};', defs=("suites",)),
            PlantStmt('{sock}.setEnabledCipherSuites({suites});', uses=("sock", "suites"), security=True),
            PlantStmt('{sock}.startHandshake();', uses=("sock",)),
        )

    def allow_all_field(tag: str, url: str) -> Plant:
        return _p(
            f"allow-all-field-{tag}", True, True, (url, url + "/v2"),
            PlantStmt('HostnameVerifier {hv} = SSLSocketFactory.ALLOW_ALL_HOSTNAME_VERIFIER;', defs=("hv",)),
            PlantStmt('HttpsURLConnection.setDefaultHostnameVerifier({hv});', uses=("hv",), security=True),
            PlantStmt(f'URL {{target}} = new URL("{url}");', defs=("target",)),
            PlantStmt('HttpsURLConnection {conn} = (HttpsURLConnection) {target}.openConnection();', defs=("conn",), uses=("target",)),
        )

    def aes_ecb(tag: str, key: str) -> Plant:
        return _p(
            f"aes-ecb-{tag}", True, False, (key, key[::-1]),
            PlantStmt(f'byte[] {{kb}} = "{key}".getBytes();', defs=("kb",)),
            PlantStmt('SecretKeySpec {ks} = new SecretKeySpec({kb}, "AES");', defs=("ks",), uses=("kb",)),
            PlantStmt('Cipher {cip} = Cipher.getInstance("AES");', defs=("cip",), security=True),
            PlantStmt('{cip}.init(Cipher.ENCRYPT_MODE, {ks});', uses=("cip", "ks")),
            PlantStmt('byte[] {ct} = {cip}.doFinal(plain);', defs=("ct",), uses=("cip",)),
        )

    def pbe(tag: str, iters: str) -> Plant:
        return _p(
            f"pbkdf-{tag}", False, False, (iters, "9999"),
            PlantStmt('byte[] {salt} = new byte[16];', defs=("salt",)),
            PlantStmt('SecureRandom {rnd} = new SecureRandom();', defs=("rnd",)),
            PlantStmt('{rnd}.nextBytes({salt});', uses=("rnd", "salt")),
            PlantStmt(f'PBEKeySpec {{spec}} = new PBEKeySpec(password, {{salt}}, {iters}, 256);', defs=("spec",), uses=("salt",)),
            PlantStmt('SecretKeyFactory {factory} = SecretKeyFactory.getInstance("PBKDF2WithHmacSHA256");', defs=("factory",), security=True),
            PlantStmt('byte[] {derived} = {factory}.generateSecret({spec}).getEncoded();', defs=("derived",), uses=("factory", "spec")),
        )

    def aes_gcm(tag: str, msg: str) -> Plant:
        return _p(
            f"aes-gcm-{tag}", False, False, (msg, msg + "!"),
            PlantStmt('KeyGenerator {kg} = KeyGenerator.getInstance("AES");', defs=("kg",), security=True),
            PlantStmt('{kg}.init(256);', uses=("kg",)),
            PlantStmt('SecretKey {key} = {kg}.generateKey();', defs=("key",), uses=("kg",)),
            PlantStmt('Cipher {cip} = Cipher.getInstance("AES/GCM/NoPadding");', defs=("cip",)),
            PlantStmt('{cip}.init(Cipher.ENCRYPT_MODE, {key});', uses=("cip", "key")),
            PlantStmt(f'byte[] {{ct}} = {{cip}}.doFinal("{msg}".getBytes());', defs=("ct",), uses=("cip",)),
        )

    def rsa_small(tag: str, bits: str) -> Plant:
        return _p(
            f"rsa-small-{tag}", True, False, (bits, "2048"),
            PlantStmt('KeyPairGenerator {gen} = KeyPairGenerator.getInstance("RSA");', defs=("gen",), security=True),
            PlantStmt(f'{{gen}}.initialize({bits});', uses=("gen",)),
            PlantStmt('KeyPair {pair} = {gen}.genKeyPair();', defs=("pair",), uses=("gen",)),
            PlantStmt('Cipher {cip} = Cipher.getInstance("RSA/ECB/PKCS1Padding");', defs=("cip",)),
            PlantStmt('{cip}.init(Cipher.ENCRYPT_MODE, {pair}.getPublic());', uses=("cip", "pair")),
        )

    def static_iv(tag: str, last: str) -> Plant:
        return _p(
            f"static-iv-{tag}", True, False, (last, "99"),
            PlantStmt(f'byte[] {{ivb}} = {{ 11, 12, 13, 14, 15, 16, 17, {last} }};', defs=("ivb",)),
            PlantStmt('IvParameterSpec {ivs} = new IvParameterSpec({ivb});', defs=("ivs",), uses=("ivb",)),
            PlantStmt('KeyGenerator {kgen} = KeyGenerator.getInstance("AES");', defs=("kgen",), security=True),
            PlantStmt('SecretKey {sk} = {kgen}.generateKey();', defs=("sk",), uses=("kgen",)),
            PlantStmt('Cipher {ciph} = Cipher.getInstance("AES/CBC/PKCS5Padding");', defs=("ciph",)),
            PlantStmt('{ciph}.init(Cipher.ENCRYPT_MODE, {sk}, {ivs});', uses=("ciph", "sk", "ivs")),
        )

    def seed_static(tag: str, seed: str) -> Plant:
        return _p(
            f"seed-static-{tag}", True, False, (seed, seed.upper()),
            PlantStmt(f'byte[] {{seedv}} = "{seed}".getBytes();', defs=("seedv",)),
            PlantStmt('SecureRandom {sr} = SecureRandom.getInstance("SHA1PRNG");', defs=("sr",), security=True),
            PlantStmt('{sr}.setSeed({seedv});', uses=("sr", "seedv")),
            PlantStmt('byte[] {buf} = new byte[16];', defs=("buf",)),
            PlantStmt('{sr}.nextBytes({buf});', uses=("sr", "buf")),
        )

    out.append(hv_allow_all("a", "login.service.example"))
    out.append(hv_allow_all("b", "api.shop.example"))
    out.append(legacy_ctx("a", "SSLv3"))
    out.append(legacy_ctx("b", "SSL"))
    out.append(weak_suites("a", "SSL_RSA_WITH_RC4_128_MD5"))
    out.append(weak_suites("b", "SSL_RSA_WITH_3DES_EDE_CBC_SHA"))
    out.append(allow_all_field("a", "https://sync.corp.example"))
    out.append(allow_all_field("b", "https://push.corp.example"))
    out.append(aes_ecb("a", "sixteenbytekey00"))
    out.append(aes_ecb("b", "anothersecretkey"))
    out.append(pbe("a", "4096"))
    out.append(pbe("b", "2048"))
    out.append(aes_gcm("a", "inventory sync payload"))
    out.append(aes_gcm("b", "profile backup payload"))
    out.append(rsa_small("a", "1024"))
    out.append(rsa_small("b", "512"))
    out.append(static_iv("a", "18"))
    out.append(static_iv("b", "28"))
    out.append(seed_static("a", "wifi sensor seed"))
    out.append(seed_static("b", "telemetry seed"))
    assert len(out) == 20
    return out


TRUSTMANAGER_PLANT_NAME = "empty-trustmanager"


def trustmanager_plant_text() -> str:
    return _EMPTY_TM


# Mutation helpers shared by the robustness tests. Each returns the
# statement list for the planted (app-side) copy.

NEUTRAL_STMTS = [
    "long tick = System.currentTimeMillis();",
    "int padCount = 42;",
    'String marker = "probe";',
]


def variant_renamed(plant: Plant, suffix: str = "Q") -> list[str]:
    return plant.render_stmts({v: v + suffix for v in plant.var_names()})


def variant_reordered(plant: Plant) -> list[str]:
    stmts = plant.render_stmts()
    i = plant.independent_adjacent_pair()
    if i is not None:
        stmts[i], stmts[i + 1] = stmts[i + 1], stmts[i]
    return stmts


def variant_with_insertions(plant: Plant) -> list[str]:
    stmts = plant.render_stmts()
    return [NEUTRAL_STMTS[0]] + stmts[:1] + [NEUTRAL_STMTS[1]] + stmts[1:] + [NEUTRAL_STMTS[2]]


def variant_constant_mutated(plant: Plant) -> list[str]:
    old, new = plant.mutable_const
    stmts = plant.render_stmts()
    quoted = f'"{old}"'
    for i, s in enumerate(stmts):
        if quoted in s:
            stmts[i] = s.replace(quoted, f'"{new}"', 1)
            return stmts
    for i, s in enumerate(stmts):
        if old in s:
            stmts[i] = s.replace(old, new, 1)
            return stmts
    raise ValueError(f"mutable constant {old!r} not found in {plant.name}")


def variant_security_removed(plant: Plant) -> list[str]:
    idx = next(i for i, s in enumerate(plant.stmts) if s.security)
    return [s for i, s in enumerate(plant.render_stmts()) if i != idx]


def variant_split(plant: Plant) -> list[list[str]]:
    stmts = plant.render_stmts()
    half = len(stmts) // 2
    return [stmts[:half], stmts[half:]]


# --- app corpus ------------------------------------------------------------

_FILLER_METHODS = """    int bump(int delta) {{
        counter = counter + delta;
        return counter;
    }}

    String describe(String prefix) {{
        String msg = prefix + ":" + counter;
        return msg;
    }}

    void refresh(int rounds) {{
        for (int i = 0; i < rounds; i++) {{
            counter = counter + i;
        }}
    }}
"""


def _host_class(class_name: str, bodies: list[list[str]]) -> str:
    methods = []
    for k, stmts in enumerate(bodies):
        inner = "\n".join(f"        {line}" for line in stmts)
        methods.append(f"    void task{k}() {{\n{inner}\n    }}")
    body = "\n\n".join(methods)
    return (
        f"public class {class_name} {{\n"
        f"    int counter = 0;\n\n"
        f"{body}\n\n"
        + _FILLER_METHODS.format()
        + "}\n"
    )


def _filler_class(class_name: str, seed: int) -> str:
    return (
        f"public class {class_name} {{\n"
        f"    int counter = {seed};\n\n"
        + _FILLER_METHODS.format()
        + "}\n"
    )


def synthetic_app_sources() -> dict[str, dict[str, str]]:
    """Twenty synthetic apps keyed by app id; each app maps file name to
    source text. Apps 0-5 carry one insecure TLS clone each; 6-8 carry
    secure clones; 9 an insecure symmetric clone; the rest are filler."""
    by_name = {p.name: p for p in plants()}
    plan = {
        "app00": ["hv-allow-all-a"],
        "app01": ["hv-allow-all-b"],
        "app02": ["legacy-context-a"],
        "app03": ["weak-suites-a"],
        "app04": ["allow-all-field-a"],
        "app05": ["legacy-context-b"],
        "app06": ["pbkdf-a"],
        "app07": ["aes-gcm-a"],
        "app08": ["pbkdf-b"],
        "app09": ["aes-ecb-a"],
    }
    apps: dict[str, dict[str, str]] = {}
    for i in range(20):
        app_id = f"app{i:02d}"
        files: dict[str, str] = {}
        planted = plan.get(app_id, [])
        if planted:
            bodies = []
            for name in planted:
                plant = by_name[name]
                rename = {v: f"{v}X{i}" for v in plant.var_names()}
                bodies.append(plant.render_stmts(rename))
            files["Worker.java"] = _host_class(f"Worker{i:02d}", bodies)
        files["Helper.java"] = _filler_class(f"Helper{i:02d}", seed=i * 3 + 1)
        files["Screen.java"] = _filler_class(f"Screen{i:02d}", seed=i * 7 + 2)
        apps[app_id] = files
    return apps


# --- mini post dump ----------------------------------------------------------

def _attr(value: str) -> str:
    # Newlines must ride as character references or attribute-value
    # normalization folds them into spaces.
    return html.escape(str(value), quote=True).replace("\n", "&#10;").replace("\r", "&#13;")


def _row(attrs: dict[str, str]) -> str:
    rendered = " ".join(f'{k}="{_attr(v)}"' for k, v in attrs.items())
    return f"  <row {rendered} />"


def _code_body(intro: str, code: str, outro: str = "") -> str:
    block = f"<pre><code>{html.escape(code)}</code></pre>"
    tail = f"<p>{outro}</p>" if outro else ""
    return f"<p>{intro}</p>{block}{tail}"


def mini_dump_xml() -> bytes:
    """A 50-row post dump: 10 android-tagged questions, 15 answers to
    them, and 25 rows that the tag filter must drop."""
    by_name = {p.name: p for p in plants()}

    def plant_code(name: str) -> str:
        return by_name[name].snippet_text()

    rows: list[str] = []
    q = [
        (100, "hv-allow-all-a", 12, 5200),
        (101, "hv-allow-all-b", 7, 3100),
        (102, "legacy-context-a", 9, 4800),
        (103, "weak-suites-a", 3, 900),
        (104, "allow-all-field-a", 6, 2600),
        (105, "legacy-context-b", 2, 700),
        (106, "pbkdf-a", 15, 6100),
        (108, "aes-ecb-a", 4, 1500),
    ]
    for qid, plant_name, score, views in q:
        rows.append(_row({
            "Id": qid, "PostTypeId": 1, "Score": score, "ViewCount": views,
            "Tags": "<android><security>",
            "Body": _code_body("Why does my TLS connection fail?", plant_code(plant_name)),
        }))
    rows.append(_row({
        "Id": 107, "PostTypeId": 1, "Score": 1, "ViewCount": 350,
        "Tags": "<android><layout>",
        "Body": _code_body(
            "Button stays disabled:",
            'Button submit = (Button) findViewById(R.id.submit);\nsubmit.setEnabled(true);\nsubmit.setText("Send");',
        ),
    }))
    rows.append(_row({
        "Id": 109, "PostTypeId": 1, "Score": 0, "ViewCount": 120,
        "Tags": "<android><encoding>",
        "Body": _code_body(
            "Is this the right decode call?",
            "byte[] data = Base64.decode(text, 0);\nString out = new String(data);",
        ),
    }))

    answers = [
        (200, 100, 21, "aes-gcm-a"),
        (201, 100, 2, None),
        (202, 101, 5, "pbkdf-b"),
        (203, 102, 8, "seed-static-a"),
        (204, 102, 1, None),
        (205, 103, 4, "rsa-small-a"),
        (206, 104, 11, "static-iv-a"),
        (207, 105, 3, "aes-gcm-b"),
        (208, 106, 17, "pbkdf-a"),
        (209, 106, 2, None),
        (210, 107, 6, None),
        (211, 108, 9, "aes-ecb-b"),
        (212, 108, 1, None),
        (213, 109, 2, None),
        (214, 101, 4, "weak-suites-b"),
    ]
    plain_bodies = {
        201: _code_body("Check the manifest first:", "&& true || false", "Entities like &amp;&amp; decode."),
        204: "<p>Use <code>getInstance</code> and read the docs.</p>",
        209: _code_body("Log it:", 'Log.d("pbe", "derived ok");\nSystem.out.println("done");'),
        210: _code_body("Enable it later:", "submit.setEnabled(false);\nsubmit.postInvalidate();"),
        212: _code_body(
            "Same fix, reformatted:",
            re.sub(r"\s+", "  ", plant_code("aes-ecb-a")),
        ),
        213: _code_body("Try the URL-safe flavor:", "byte[] data = Base64.decode(text, 8);\nString out = new String(data);"),
    }
    for aid, parent, score, plant_name in answers:
        if plant_name is not None:
            body = _code_body("This worked for me:", plant_code(plant_name))
        else:
            body = plain_bodies[aid]
        rows.append(_row({
            "Id": aid, "PostTypeId": 2, "ParentId": parent, "Score": score,
            "Body": body,
        }))

    # 25 rows outside the android tag: 13 questions, 12 answers
    for k in range(13):
        rows.append(_row({
            "Id": 400 + k, "PostTypeId": 1, "Score": k % 5, "ViewCount": 40 + k,
            "Tags": "<java><collections>" if k % 2 == 0 else "<python><pandas>",
            "Body": _code_body("How do I sort this?", f"int value{k} = {k};\nlist.add(value{k});"),
        }))
    for k in range(12):
        rows.append(_row({
            "Id": 500 + k, "PostTypeId": 2, "ParentId": 400 + k, "Score": 1,
            "Body": _code_body("Like so:", f"Collections.sort(list{k});"),
        }))

    assert len(rows) == 50
    doc = '<?xml version="1.0" encoding="utf-8"?>\n<posts>\n' + "\n".join(rows) + "\n</posts>\n"
    return doc.encode("utf-8")


def mini_comments() -> dict[str, list[str]]:
    """Comment fixture keyed by post id (string keys for JSON round
    trips). Two insecure threads carry explicit security warnings."""
    return {
        "100": [
            "This disables hostname verification - do not use it in production.",
            "Thanks, shipping it anyway.",
        ],
        "102": ["This is insecure: SSLv3 is broken and enables MITM attacks."],
        "104": ["Works great on my device!"],
        "106": ["Nice, standards-compliant derivation."],
        "108": ["Careful, this mode leaks patterns in the plaintext (vulnerable)."],
        "203": ["Seeding that way is unsafe."],
    }


# --- labeled corpus for the classifier ----------------------------------------

# Small fixed pool so filler tokens stay common (low idf) across the
# corpus instead of minting per-variant vocabulary.
_NEUTRAL_LINES = [
    "int attempt = 0;",
    'String label = "run";',
    'Log.d("trace", "step");',
    "long startedAt = System.currentTimeMillis();",
    "int retries = attempt + 1;",
    "boolean verbose = false;",
]


def labeled_corpus(variants_per_case: int = 9) -> list[tuple[str, str, str]]:
    """(snippet_id, code, label) triples: every golden case and listing
    plus label-preserving mutations (distinct subsets of neutral
    statements appended, which never touch a rule matcher).

    Labels use each snippet's default context; code that appears in the
    golden suite under two contexts enters the corpus once, so the
    corpus carries no contradictory duplicate documents.
    """
    from .rules import label_code

    out: list[tuple[str, str, str]] = []
    seen_codes: set[str] = set()
    bases: list[tuple[str, str]] = [
        (c.rule_id, c.code) for c in golden_cases()
    ] + [(name, code) for name, code, _, _ in LISTING_CASES]
    for base_id, code in bases:
        if code in seen_codes:
            continue
        seen_codes.add(code)
        out.append((f"{base_id}/base", code, label_code(code).label))
        for k in range(1, variants_per_case + 1):
            # bit pattern of k selects a distinct neutral-line subset
            extra = [
                line for j, line in enumerate(_NEUTRAL_LINES) if k & (1 << j)
            ]
            variant = code + "\n" + "\n".join(extra)
            out.append((f"{base_id}/v{k}", variant, label_code(variant).label))
    return out
