import hashlib
import json
from pathlib import Path

import pytest

from snipscan.cli import main
from snipscan.pipeline import (
    ConfigError,
    Pipeline,
    PipelineConfig,
    StageDependencyError,
)


def config_from(fixture_tree) -> PipelineConfig:
    return PipelineConfig(**fixture_tree)


def artifact_digests(out_dir: Path) -> dict[str, str]:
    return {
        p.name: hashlib.sha256(p.read_bytes()).hexdigest()
        for p in sorted(out_dir.iterdir())
        if p.is_file() and p.name != "manifest.json"
    }


class TestConfig:
    def test_round_trip_lossless(self, fixture_tree):
        cfg = config_from(fixture_tree)
        again = PipelineConfig.from_json(cfg.to_json())
        assert again == cfg
        assert again.to_json() == cfg.to_json()

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError):
            PipelineConfig.from_json('{"no_such_option": 1}')

    def test_missing_dump_rejected(self, tmp_path):
        cfg = PipelineConfig(dump_path=str(tmp_path / "nope.xml"), out_dir=str(tmp_path / "o"))
        with pytest.raises(ConfigError):
            Pipeline(cfg).run_stage("ingest")

    def test_bad_threshold_rejected(self, fixture_tree):
        cfg = config_from(fixture_tree)
        cfg.similarity_threshold = 1.5
        with pytest.raises(ConfigError):
            Pipeline(cfg).run_stage("ingest")


class TestStages:
    def test_full_run_produces_all_artifacts(self, fixture_tree):
        pipeline = Pipeline(config_from(fixture_tree))
        statuses = pipeline.run()
        assert all(s == "ran" for s in statuses.values())
        out = Path(fixture_tree["out_dir"])
        for names in Pipeline._OUTPUTS.values():
            for name in names:
                assert (out / name).is_file(), name

    def test_rerun_is_noop_and_artifacts_stable(self, fixture_tree):
        pipeline = Pipeline(config_from(fixture_tree))
        pipeline.run()
        out = Path(fixture_tree["out_dir"])
        before = artifact_digests(out)
        statuses = Pipeline(config_from(fixture_tree)).run()
        assert all(s == "skipped" for s in statuses.values())
        assert artifact_digests(out) == before

    def test_missing_upstream_names_stage(self, fixture_tree):
        pipeline = Pipeline(config_from(fixture_tree))
        with pytest.raises(StageDependencyError) as err:
            pipeline.run_stage("detect")
        assert err.value.stage == "compile"

    def test_stale_upstream_refused(self, fixture_tree):
        pipeline = Pipeline(config_from(fixture_tree))
        pipeline.run()
        related = Path(fixture_tree["out_dir"]) / "related.jsonl"
        related.write_text(related.read_text() + "\n", encoding="utf-8")
        with pytest.raises(StageDependencyError) as err:
            Pipeline(config_from(fixture_tree)).run_stage("detect")
        assert err.value.stage == "compile"
        assert "stale" in str(err.value)

    def test_artifacts_self_describing(self, fixture_tree):
        pipeline = Pipeline(config_from(fixture_tree))
        pipeline.run(["ingest", "filter"])
        header = json.loads(
            (Path(fixture_tree["out_dir"]) / "related.jsonl").read_text().splitlines()[0]
        )
        assert header == {"artifact": "related", "stage": "filter", "format": 1}

    def test_detected_matches_are_planted_clones(self, fixture_tree):
        pipeline = Pipeline(config_from(fixture_tree))
        pipeline.run()
        rows = [
            json.loads(line)
            for line in (Path(fixture_tree["out_dir"]) / "matches.jsonl").read_text().splitlines()[1:]
        ]
        matched_apps = {r["app_id"] for r in rows}
        assert {f"app{i:02d}" for i in range(10)} == matched_apps

    def test_summary_reports_tls_insecure_30_percent(self, fixture_tree):
        pipeline = Pipeline(config_from(fixture_tree))
        pipeline.run()
        summary = json.loads((Path(fixture_tree["out_dir"]) / "summary.json").read_text())
        assert summary["n_apps"] == 20
        assert summary["categories"]["TLS"]["insecure_apps"] == 6
        assert summary["categories"]["TLS"]["insecure_pct"] == 30.0


class TestDeterminism:
    def test_two_fresh_runs_byte_identical(self, tmp_path):
        from conftest import write_fixture_tree

        cfg1 = write_fixture_tree(tmp_path / "one")
        cfg2 = write_fixture_tree(tmp_path / "two")
        Pipeline(PipelineConfig(**cfg1)).run()
        Pipeline(PipelineConfig(**cfg2)).run()
        d1 = artifact_digests(Path(cfg1["out_dir"]))
        d2 = artifact_digests(Path(cfg2["out_dir"]))
        assert d1 == d2

    def test_jobs_parallelism_is_order_stable(self, fixture_tree):
        cfg = config_from(fixture_tree)
        Pipeline(cfg).run()
        serial = artifact_digests(Path(fixture_tree["out_dir"]))
        cfg_par = config_from(fixture_tree)
        cfg_par.jobs = 4
        Pipeline(cfg_par).run(["compile", "detect"], force=True)
        assert artifact_digests(Path(fixture_tree["out_dir"])) == serial


class TestCli:
    def test_run_range(self, fixture_tree, tmp_path, capsys):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(fixture_tree), encoding="utf-8")
        rc = main(["--config", str(cfg_path), "run", "--from", "ingest", "--to", "filter"])
        assert rc == 0
        out = capsys.readouterr().out
        assert "ingest: ran" in out and "filter: ran" in out

    def test_exit_code_config_error(self, tmp_path, capsys):
        rc = main(["--config", str(tmp_path / "missing.json"), "ingest"])
        assert rc == 2

    def test_exit_code_upstream_error(self, fixture_tree, tmp_path, capsys):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(fixture_tree), encoding="utf-8")
        rc = main(["--config", str(cfg_path), "detect"])
        assert rc == 3

    def test_exit_code_data_error(self, fixture_tree, tmp_path, capsys):
        Path(fixture_tree["dump_path"]).write_bytes(b"<posts>\n<row Id=oops />\n</posts>")
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(fixture_tree), encoding="utf-8")
        rc = main(["--config", str(cfg_path), "ingest"])
        assert rc == 4

    def test_detect_flags(self, fixture_tree, tmp_path, capsys):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(fixture_tree), encoding="utf-8")
        assert main(["--config", str(cfg_path), "run", "--to", "compile"]) == 0
        rc = main(["--config", str(cfg_path), "detect", "--threshold", "0.95", "--no-class-filter"])
        assert rc == 0

    def test_cv_subcommand(self, fixture_tree, tmp_path, capsys):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(fixture_tree), encoding="utf-8")
        assert main(["--config", str(cfg_path), "run", "--to", "label"]) == 0
        capsys.readouterr()
        rc = main(["--config", str(cfg_path), "cv", "--folds", "4"])
        assert rc == 0
        payload = json.loads(capsys.readouterr().out)
        assert "mean_accuracy" in payload and len(payload["folds"]) == 4
