"""
The staged pipeline end to end
==============================

Materializes the bundled fixtures (50-post dump, comment threads, and a
20-app source corpus with planted clones), runs every stage through the
CLI entry point, and reads back the summary and feedback reports.
"""

import json
import tempfile
from pathlib import Path

from snipscan import synth
from snipscan.cli import main

root = Path(tempfile.mkdtemp(prefix="snipscan-demo-"))
(root / "dump.xml").write_bytes(synth.mini_dump_xml())
(root / "comments.json").write_text(json.dumps(synth.mini_comments()), encoding="utf-8")
corpus = root / "corpus"
for app_id, files in synth.synthetic_app_sources().items():
    app_dir = corpus / app_id
    app_dir.mkdir(parents=True)
    for name, text in files.items():
        (app_dir / name).write_text(text, encoding="utf-8")

config = {
    "dump_path": str(root / "dump.xml"),
    "corpus_root": str(corpus),
    "out_dir": str(root / "out"),
    "comments_path": str(root / "comments.json"),
    "tag_filter": ["android"],
    "seed": 7,
}
config_path = root / "config.json"
config_path.write_text(json.dumps(config, indent=2), encoding="utf-8")
print(f"workspace: {root}\n")

# Equivalent to: snipscan --config config.json run
exit_code = main(["--config", str(config_path), "run"])
print(f"\nexit code: {exit_code}")

# Re-running is a no-op: the manifest sees unchanged inputs.
main(["--config", str(config_path), "run"])

out = root / "out"
summary = json.loads((out / "summary.json").read_text())
print(f"\napps scanned: {summary['n_apps']}")
print(f"apps containing a snippet: {summary['apps_with_any_match']} "
      f"({summary['apps_with_any_match_pct']}%)")
print(f"apps with an insecure snippet: {summary['apps_with_insecure']} "
      f"({summary['apps_with_insecure_pct']}%)")
print("per category:")
for cat, row in summary["categories"].items():
    print(f"  {cat:<18} insecure in {row['insecure_apps']} apps, "
          f"secure in {row['secure_apps']}")

print("\ntop snippets by detection count:")
for row in summary["top_snippets"][:5]:
    print(f"  {row['snippet_id']:<10} {row['label']:<9} in {row['detection_count']} apps")

print("\nfeedback tiers (insecure snippets):")
print((out / "feedback_tiers.csv").read_text())
