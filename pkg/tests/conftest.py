import json
from pathlib import Path

import pytest

from snipscan import synth
from snipscan.registry import load_registry


@pytest.fixture(scope="session")
def registry():
    return load_registry()


@pytest.fixture(scope="session")
def mini_dump_bytes():
    return synth.mini_dump_xml()


def write_fixture_tree(root: Path) -> dict:
    """Materialize the bundled mini dump, comments and app corpus under
    ``root``; returns a pipeline config dict pointing at them."""
    root.mkdir(parents=True, exist_ok=True)
    (root / "dump.xml").write_bytes(synth.mini_dump_xml())
    (root / "comments.json").write_text(json.dumps(synth.mini_comments()), encoding="utf-8")
    corpus = root / "corpus"
    for app_id, files in synth.synthetic_app_sources().items():
        d = corpus / app_id
        d.mkdir(parents=True, exist_ok=True)
        for name, text in files.items():
            (d / name).write_text(text, encoding="utf-8")
    return {
        "dump_path": str(root / "dump.xml"),
        "corpus_root": str(corpus),
        "out_dir": str(root / "out"),
        "comments_path": str(root / "comments.json"),
        "tag_filter": ["android"],
        "seed": 7,
    }


@pytest.fixture()
def fixture_tree(tmp_path):
    return write_fixture_tree(tmp_path)
