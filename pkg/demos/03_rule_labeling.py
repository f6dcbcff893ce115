"""
Parameter-table labeling rules
==============================

The rule catalog transcribes the secure/insecure parameter tables for
TLS, symmetric and asymmetric crypto, hashes, and RNG seeding. This
walks a few characteristic snippets through the engine, including the
two scenario-dependent entries that flip with the client/server
context.
"""

from snipscan.rules import Context, label_code, rule_catalog

catalog = rule_catalog()
insecure_rules = sum(r.severity.value == "InsecureIndicator" for r in catalog)
print(f"catalog: {len(catalog)} rules "
      f"({insecure_rules} insecure indicators, {len(catalog) - insecure_rules} secure)\n")

SNIPPETS = [
    ("bare AES transformation (ECB default)",
     'Cipher c = Cipher.getInstance("AES");\nc.init(Cipher.ENCRYPT_MODE, key);', None),
    ("hostname verifier that accepts everything",
     "public boolean verify(String hostname, SSLSession session) {\n    return true;\n}", None),
    ("static seed replaces RNG state",
     'byte[] keyStart = "this is a key".getBytes();\n'
     'SecureRandom sr = SecureRandom.getInstance("SHA1PRNG");\nsr.setSeed(keyStart);', None),
    ("well-parameterized key derivation",
     "byte[] salt = new byte[16];\nSecureRandom rnd = new SecureRandom();\n"
     "rnd.nextBytes(salt);\nPBEKeySpec spec = new PBEKeySpec(password, salt, 4096, 256);\n"
     'SecretKeyFactory f = SecretKeyFactory.getInstance("PBKDF2WithHmacSHA256");', None),
]

for title, code, ctx in SNIPPETS:
    verdict = label_code(code, ctx)
    print(f"-- {title}: {verdict.label.upper()}")
    print(f"   categories: {sorted(c.value for c in verdict.categories)}")
    print(f"   fired: {list(verdict.fired_rules)}")
    print(f"   why: {verdict.rationale}\n")

# The padding-oracle entries are exploitable only against a live peer.
dual = 'Cipher c = Cipher.getInstance("AES/CBC/PKCS5Padding");\nc.init(Cipher.ENCRYPT_MODE, key);'
for ctx in (Context.NON_CLIENT_SERVER, Context.CLIENT_SERVER):
    verdict = label_code(dual, ctx)
    print(f"AES/CBC under {ctx.value}: {verdict.label}")
