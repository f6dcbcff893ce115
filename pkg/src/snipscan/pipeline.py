"""Staged batch pipeline with re-runnable, manifest-tracked artifacts.

Stages: ingest -> filter -> label -> train -> classify -> compile ->
detect -> report. Every stage reads the previous stage's JSON-lines
artifact and writes its own; a manifest records the input hashes of
each stage so unchanged stages are skipped and stale upstream artifacts
are refused by name. All outputs are byte-deterministic for fixed
inputs and seeds.
"""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Iterable

from . import classifier as clf
from .clones import CompiledCode, MatchConfig, match_snippet
from .diagnostics import Diagnostics
from .frontend import try_compile, wrap_partial
from .ingest import IngestError, PostKind, SnippetRecord, dedupe, extract_snippets, parse_dump
from .ir import method_from_json_dict
from .pdg import build_pdg
from .registry import ApiRegistry, RegistryError, load_registry
from .report import (
    DEFAULT_WARNING_LEXICON,
    FeedbackRecord,
    feedback_correlation,
    feedback_tables_csv,
    summarize,
)
from .resolver import is_security_related
from .rules import Context, catalog_to_json, label_code

__all__ = [
    "ConfigError",
    "DataError",
    "Pipeline",
    "PipelineConfig",
    "STAGES",
    "StageDependencyError",
    "run",
]

FORMAT_VERSION = 1

STAGES = ["ingest", "filter", "label", "train", "classify", "compile", "detect", "report"]


class ConfigError(ValueError):
    """Invalid or incomplete pipeline configuration (exit code 2)."""


class StageDependencyError(RuntimeError):
    """Missing or stale upstream artifact (exit code 3)."""

    def __init__(self, stage: str, message: str):
        super().__init__(message)
        self.stage = stage


class DataError(ValueError):
    """Malformed input data (exit code 4)."""


@dataclass
class PipelineConfig:
    dump_path: str = ""
    corpus_root: str = ""
    out_dir: str = "out"
    registry_path: str | None = None
    comments_path: str | None = None
    tag_filter: list[str] = field(default_factory=lambda: ["android"])
    penalty_c: float = clf.DEFAULT_PENALTY_C
    epochs: int = 30
    folds: int = 5
    seed: int = 0
    similarity_threshold: float = 0.91
    candidate_class_filter: bool = True
    context: str = "auto"  # auto | client-server | non-client-server
    jobs: int = 1
    warning_lexicon: list[str] = field(default_factory=lambda: list(DEFAULT_WARNING_LEXICON))

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "PipelineConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def load(cls, path: str | Path) -> "PipelineConfig":
        p = Path(path)
        if not p.is_file():
            raise ConfigError(f"config file not found: {p}")
        return cls.from_json(p.read_text("utf-8"))

    def validate_for(self, stage: str) -> None:
        if stage == "ingest" and not Path(self.dump_path).is_file():
            raise ConfigError(f"dump file not found: {self.dump_path!r}")
        if stage == "compile" and not Path(self.corpus_root).is_dir():
            raise ConfigError(f"corpus root not found: {self.corpus_root!r}")
        if self.context not in ("auto", "client-server", "non-client-server"):
            raise ConfigError(f"bad context {self.context!r}")
        if not (0.0 < self.similarity_threshold <= 1.0):
            raise ConfigError("similarity threshold must be in (0, 1]")
        if self.penalty_c <= 0:
            raise ConfigError("penalty C must be positive")


def _sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with path.open("rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _sha256_tree(root: Path) -> str:
    h = hashlib.sha256()
    for p in sorted(root.rglob("*")):
        if p.is_file():
            h.update(str(p.relative_to(root)).encode())
            h.update(p.read_bytes())
    return h.hexdigest()


class _Artifact:
    """JSON-lines file with a self-describing header line."""

    def __init__(self, path: Path, stage: str, name: str):
        self.path = path
        self.header = {"artifact": name, "stage": stage, "format": FORMAT_VERSION}

    def write(self, rows: Iterable[dict]) -> None:
        with self.path.open("w", encoding="utf-8") as fh:
            fh.write(json.dumps(self.header, sort_keys=True) + "\n")
            for row in rows:
                fh.write(json.dumps(row, sort_keys=True) + "\n")

    @staticmethod
    def read(path: Path) -> list[dict]:
        rows = []
        with path.open("r", encoding="utf-8") as fh:
            header = json.loads(fh.readline())
            if "artifact" not in header:
                raise DataError(f"{path} is missing its artifact header")
            for line in fh:
                if line.strip():
                    rows.append(json.loads(line))
        return rows


class Pipeline:
    def __init__(self, config: PipelineConfig):
        self.config = config
        self.out = Path(config.out_dir)
        self.out.mkdir(parents=True, exist_ok=True)
        try:
            self.registry: ApiRegistry = load_registry(config.registry_path)
        except (RegistryError, FileNotFoundError) as exc:
            raise ConfigError(f"cannot load registry: {exc}") from exc
        self.manifest_path = self.out / "manifest.json"
        self.manifest: dict = {}
        if self.manifest_path.is_file():
            self.manifest = json.loads(self.manifest_path.read_text("utf-8"))

    # -- artifact paths ---------------------------------------------------

    def path(self, name: str) -> Path:
        return self.out / name

    _OUTPUTS = {
        "ingest": ["snippets.jsonl", "posts.jsonl"],
        "filter": ["related.jsonl"],
        "label": ["verdicts.jsonl", "rules_catalog.json"],
        "train": ["model.json"],
        "classify": ["predictions.jsonl"],
        "compile": ["ir_snippets.jsonl", "ir_apps.jsonl"],
        "detect": ["matches.jsonl"],
        "report": ["summary.json", "feedback.json", "feedback_tiers.csv", "feedback_warnings.csv"],
    }

    _UPSTREAM = {
        "ingest": [],
        "filter": ["ingest"],
        "label": ["ingest", "filter"],
        "train": ["ingest", "filter", "label"],
        "classify": ["ingest", "filter", "train"],
        "compile": ["ingest", "filter"],
        "detect": ["compile"],
        "report": ["ingest", "label", "detect"],
    }

    # -- manifest handling --------------------------------------------------

    def _stage_inputs(self, stage: str) -> dict[str, str]:
        cfg = self.config
        inputs: dict[str, str] = {}
        if stage == "ingest":
            inputs["dump"] = _sha256_file(Path(cfg.dump_path))
            inputs["config"] = _sha256_text(json.dumps(sorted(cfg.tag_filter)))
        elif stage == "filter":
            inputs["snippets.jsonl"] = _sha256_file(self.path("snippets.jsonl"))
            inputs["registry"] = (
                _sha256_file(Path(cfg.registry_path)) if cfg.registry_path else "bundled"
            )
        elif stage == "label":
            inputs["snippets.jsonl"] = _sha256_file(self.path("snippets.jsonl"))
            inputs["related.jsonl"] = _sha256_file(self.path("related.jsonl"))
            inputs["config"] = _sha256_text(cfg.context)
        elif stage == "train":
            inputs["snippets.jsonl"] = _sha256_file(self.path("snippets.jsonl"))
            inputs["verdicts.jsonl"] = _sha256_file(self.path("verdicts.jsonl"))
            inputs["config"] = _sha256_text(f"{cfg.penalty_c}:{cfg.epochs}:{cfg.seed}")
        elif stage == "classify":
            inputs["snippets.jsonl"] = _sha256_file(self.path("snippets.jsonl"))
            inputs["related.jsonl"] = _sha256_file(self.path("related.jsonl"))
            inputs["model.json"] = _sha256_file(self.path("model.json"))
        elif stage == "compile":
            inputs["snippets.jsonl"] = _sha256_file(self.path("snippets.jsonl"))
            inputs["related.jsonl"] = _sha256_file(self.path("related.jsonl"))
            inputs["corpus"] = _sha256_tree(Path(cfg.corpus_root))
        elif stage == "detect":
            inputs["ir_snippets.jsonl"] = _sha256_file(self.path("ir_snippets.jsonl"))
            inputs["ir_apps.jsonl"] = _sha256_file(self.path("ir_apps.jsonl"))
            inputs["config"] = _sha256_text(
                f"{cfg.similarity_threshold}:{cfg.candidate_class_filter}"
            )
        elif stage == "report":
            for name in ("matches.jsonl", "verdicts.jsonl", "snippets.jsonl", "posts.jsonl"):
                inputs[name] = _sha256_file(self.path(name))
            inputs["comments"] = (
                _sha256_file(Path(cfg.comments_path)) if cfg.comments_path else "none"
            )
            inputs["config"] = _sha256_text(json.dumps(sorted(cfg.warning_lexicon)))
        return inputs

    def _check_upstream(self, stage: str) -> None:
        for up in self._UPSTREAM[stage]:
            missing = [n for n in self._OUTPUTS[up] if not self.path(n).is_file()]
            if missing:
                raise StageDependencyError(
                    up, f"stage {stage!r} needs artifacts from stage {up!r}; run {up!r} first"
                )
            recorded = self.manifest.get(up, {}).get("inputs")
            if recorded != self._stage_inputs(up):
                raise StageDependencyError(
                    up, f"artifacts of stage {up!r} are stale; re-run {up!r} first"
                )

    def _record(self, stage: str, inputs: dict[str, str]) -> None:
        self.manifest[stage] = {"inputs": inputs, "outputs": self._OUTPUTS[stage]}
        self.manifest_path.write_text(
            json.dumps(self.manifest, indent=2, sort_keys=True), encoding="utf-8"
        )

    def run_stage(self, stage: str, force: bool = False) -> str:
        """Run one stage; returns 'ran' or 'skipped'."""
        if stage not in STAGES:
            raise ConfigError(f"unknown stage {stage!r}")
        self.config.validate_for(stage)
        self._check_upstream(stage)
        inputs = self._stage_inputs(stage)
        outputs_exist = all(self.path(n).is_file() for n in self._OUTPUTS[stage])
        if not force and outputs_exist and self.manifest.get(stage, {}).get("inputs") == inputs:
            return "skipped"
        getattr(self, f"_stage_{stage}")()
        self._record(stage, inputs)
        return "ran"

    def run(self, stages: list[str] | None = None, force: bool = False) -> dict[str, str]:
        """Run a contiguous stage range in order; returns stage statuses."""
        todo = stages or STAGES
        bad = [s for s in todo if s not in STAGES]
        if bad:
            raise ConfigError(f"unknown stages: {bad}")
        return {stage: self.run_stage(stage, force=force) for stage in todo}

    # -- the stages -----------------------------------------------------------

    def _stage_ingest(self) -> None:
        diag = Diagnostics()
        snippets: list[SnippetRecord] = []
        posts: list[dict] = []
        try:
            with Path(self.config.dump_path).open("rb") as fh:
                for post in parse_dump(fh, set(self.config.tag_filter), diag):
                    posts.append({
                        "post_id": post.post_id,
                        "kind": post.kind.value,
                        "parent_id": post.parent_id,
                        "score": post.score,
                        "view_count": post.view_count,
                    })
                    snippets.extend(extract_snippets(post, diag))
        except IngestError as exc:
            raise DataError(str(exc)) from exc
        snippets = dedupe(snippets)
        _Artifact(self.path("snippets.jsonl"), "ingest", "snippets").write(
            s.to_json_dict() for s in snippets
        )
        _Artifact(self.path("posts.jsonl"), "ingest", "posts").write(posts)
        (self.out / "ingest_diagnostics.json").write_text(
            json.dumps(diag.counters, indent=2, sort_keys=True), encoding="utf-8"
        )

    def _read_snippets(self) -> list[SnippetRecord]:
        return [
            SnippetRecord.from_json_dict(d)
            for d in _Artifact.read(self.path("snippets.jsonl"))
        ]

    def _stage_filter(self) -> None:
        rows = []
        for snip in self._read_snippets():
            screen = is_security_related(snip, self.registry)
            rows.append({
                "snippet_id": snip.snippet_id,
                "related": screen.related,
                "resolved": [
                    {"fqn": e.resolved_fqn, "methods": sorted(e.observed_methods)}
                    for e in screen.resolved
                ],
            })
        _Artifact(self.path("related.jsonl"), "filter", "related").write(rows)

    def _related_ids(self) -> set[str]:
        return {
            r["snippet_id"]
            for r in _Artifact.read(self.path("related.jsonl"))
            if r["related"]
        }

    def _context_override(self) -> Context | None:
        if self.config.context == "client-server":
            return Context.CLIENT_SERVER
        if self.config.context == "non-client-server":
            return Context.NON_CLIENT_SERVER
        return None

    def _stage_label(self) -> None:
        related = self._related_ids()
        ctx = self._context_override()
        rows = []
        for snip in self._read_snippets():
            if snip.snippet_id not in related:
                continue
            verdict = label_code(snip.code_text, ctx)
            rows.append({"snippet_id": snip.snippet_id, **verdict.to_json_dict()})
        _Artifact(self.path("verdicts.jsonl"), "label", "verdicts").write(rows)
        self.path("rules_catalog.json").write_text(catalog_to_json() + "\n", encoding="utf-8")

    def _labeled_training_data(self) -> tuple[list[clf.TokenDocument], list[int]]:
        verdicts = {
            r["snippet_id"]: r["label"]
            for r in _Artifact.read(self.path("verdicts.jsonl"))
        }
        docs, ys = [], []
        for snip in self._read_snippets():
            label = verdicts.get(snip.snippet_id)
            if label is None:
                continue
            docs.append(clf.tokenize(snip.code_text, snip.snippet_id))
            ys.append(1 if label == "insecure" else -1)
        return docs, ys

    def _stage_train(self) -> None:
        docs, ys = self._labeled_training_data()
        if len(docs) < 2 or len(set(ys)) < 2:
            raise DataError("training needs labeled snippets of both classes")
        vocab = clf.fit_vocabulary(docs)
        samples = [clf.vectorize(d, vocab) for d in docs]
        ts = clf.TrainingSet(samples=samples, labels=ys)
        model = clf.train(
            ts, C=self.config.penalty_c, epochs=self.config.epochs,
            seed=self.config.seed, vocabulary=vocab,
        )
        model.save(self.path("model.json"))

    def cross_validate(self) -> dict:
        """k-fold metrics over the labeled artifact (CLI 'cv')."""
        docs, ys = self._labeled_training_data()
        if len(docs) < 2 or len(set(ys)) < 2:
            raise DataError("cross-validation needs labeled snippets of both classes")
        vocab = clf.fit_vocabulary(docs)
        ts = clf.TrainingSet(samples=[clf.vectorize(d, vocab) for d in docs], labels=ys)
        try:
            return clf.cross_validate(
                ts, k=self.config.folds, C=self.config.penalty_c,
                seed=self.config.seed, epochs=self.config.epochs,
            )
        except ValueError as exc:
            raise DataError(str(exc)) from exc

    def _stage_classify(self) -> None:
        model = clf.SvmModel.load(self.path("model.json"))
        related = self._related_ids()
        rows = []
        for snip in self._read_snippets():
            if snip.snippet_id not in related:
                continue
            fv = clf.vectorize(clf.tokenize(snip.code_text, snip.snippet_id), model.vocabulary)
            pred = clf.predict(model, fv)
            rows.append({
                "snippet_id": snip.snippet_id,
                "label": "insecure" if pred.label > 0 else "secure",
                "margin": round(pred.margin, 12),
            })
        _Artifact(self.path("predictions.jsonl"), "classify", "predictions").write(rows)

    def _compile_one_app(self, app_dir: Path) -> dict:
        methods = []
        rejections = []
        for src in sorted(app_dir.rglob("*.java")):
            ms, reason = try_compile(src.read_text("utf-8"), self.registry)
            if ms is None:
                rejections.append({"file": src.name, "reason": reason})
                continue
            methods.extend(build_pdg(m).to_json_dict() for m in ms)
        return {"app_id": app_dir.name, "methods": methods, "rejections": rejections}

    def _stage_compile(self) -> None:
        related = self._related_ids()
        snippet_rows = []
        for snip in self._read_snippets():
            if snip.snippet_id not in related:
                continue
            ms, reason = try_compile(wrap_partial(snip.code_text), self.registry)
            if ms is None:
                snippet_rows.append({"snippet_id": snip.snippet_id, "rejected": reason})
            else:
                snippet_rows.append({
                    "snippet_id": snip.snippet_id,
                    "methods": [build_pdg(m).to_json_dict() for m in ms],
                })
        _Artifact(self.path("ir_snippets.jsonl"), "compile", "ir-snippets").write(snippet_rows)

        app_dirs = sorted(p for p in Path(self.config.corpus_root).iterdir() if p.is_dir())
        app_rows = self._map(self._compile_one_app, app_dirs)
        _Artifact(self.path("ir_apps.jsonl"), "compile", "ir-apps").write(app_rows)

    def _map(self, fn: Callable, items: list) -> list:
        if self.config.jobs <= 1 or len(items) <= 1:
            return [fn(x) for x in items]
        with ThreadPoolExecutor(max_workers=self.config.jobs) as pool:
            return list(pool.map(fn, items))

    @staticmethod
    def _decode_unit(row: dict, id_key: str) -> CompiledCode | None:
        if "methods" not in row:
            return None
        methods = [method_from_json_dict(m) for m in row["methods"]]
        return CompiledCode.from_methods(row[id_key], methods)

    def _stage_detect(self) -> None:
        cfg = MatchConfig(
            similarity_threshold=self.config.similarity_threshold,
            candidate_class_filter=self.config.candidate_class_filter,
        )
        snippet_units = [
            u for u in (
                self._decode_unit(row, "snippet_id")
                for row in _Artifact.read(self.path("ir_snippets.jsonl"))
            ) if u is not None and u.pdgs
        ]
        app_units = [
            u for u in (
                self._decode_unit(row, "app_id")
                for row in _Artifact.read(self.path("ir_apps.jsonl"))
            ) if u is not None
        ]

        def detect_app(app: CompiledCode) -> list[dict]:
            found = []
            for snip in snippet_units:
                m = match_snippet(snip, app, cfg, self.registry)
                if m is not None:
                    found.append(m.to_json_dict())
            return found

        rows = [m for per_app in self._map(detect_app, app_units) for m in per_app]
        rows.sort(key=lambda r: (r["snippet_id"], r["app_id"]))
        _Artifact(self.path("matches.jsonl"), "detect", "matches").write(rows)

    def _stage_report(self) -> None:
        matches = _Artifact.read(self.path("matches.jsonl"))
        verdicts = {
            r["snippet_id"]: r for r in _Artifact.read(self.path("verdicts.jsonl"))
        }
        n_apps = sum(1 for p in Path(self.config.corpus_root).iterdir() if p.is_dir())
        summary = summarize(matches, verdicts, n_apps)
        (self.out / "summary.json").write_text(
            json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )

        posts = {r["post_id"]: r for r in _Artifact.read(self.path("posts.jsonl"))}
        comments: dict[str, list[str]] = {}
        if self.config.comments_path:
            comments = json.loads(Path(self.config.comments_path).read_text("utf-8"))
        lexicon = [w.lower() for w in self.config.warning_lexicon]

        def has_warning(post_id: int) -> bool:
            texts = comments.get(str(post_id), [])
            return any(any(w in t.lower() for w in lexicon) for t in texts)

        detection_counts: dict[str, set[str]] = {}
        for m in matches:
            detection_counts.setdefault(m["snippet_id"], set()).add(m["app_id"])

        records = []
        for snip in self._read_snippets():
            v = verdicts.get(snip.snippet_id)
            if v is None or v["label"] != "insecure":
                continue
            view_count = snip.view_count
            if snip.kind is PostKind.ANSWER:
                parent = posts.get(snip.post_id, {}).get("parent_id")
                if parent is not None and parent in posts:
                    view_count = posts[parent]["view_count"]
            records.append(FeedbackRecord(
                snippet_id=snip.snippet_id,
                kind=snip.kind.value,
                score=snip.score,
                view_count=view_count,
                has_warning_comment=has_warning(snip.post_id),
                detection_count=len(detection_counts.get(snip.snippet_id, ())),
            ))
        feedback = (
            feedback_correlation(records) if len(records) >= 4
            else {"tiers": {}, "warnings": {}, "note": "fewer than 4 insecure snippets"}
        )
        (self.out / "feedback.json").write_text(
            json.dumps(feedback, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        tiers_csv, warnings_csv = feedback_tables_csv(feedback)
        (self.out / "feedback_tiers.csv").write_text(tiers_csv, encoding="utf-8")
        (self.out / "feedback_warnings.csv").write_text(warnings_csv, encoding="utf-8")


def run(stages: list[str] | None, config: PipelineConfig, force: bool = False) -> dict[str, str]:
    """Module-level convenience wrapper around :class:`Pipeline`."""
    return Pipeline(config).run(stages, force=force)
