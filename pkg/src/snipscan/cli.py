"""Command-line entry point for the staged pipeline.

Subcommands map one-to-one onto pipeline stages (ingest, filter, label,
train, classify, compile, detect, report) plus ``cv`` for k-fold model
evaluation and ``run`` for a stage range. Exit codes: 0 success,
2 configuration error, 3 missing/stale upstream artifact, 4 data error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .ingest import IngestError
from .pipeline import (
    STAGES,
    ConfigError,
    DataError,
    Pipeline,
    PipelineConfig,
    StageDependencyError,
)
from .registry import RegistryError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_UPSTREAM = 3
EXIT_DATA = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="snipscan",
        description="Security triage and clone detection for forum code snippets.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", metavar="FILE", help="pipeline config JSON")
    parser.add_argument("--jobs", type=int, default=None, metavar="N",
                        help="worker pool size for compile/detect")
    parser.add_argument("--seed", type=int, default=None, metavar="N",
                        help="training shuffle seed")
    sub = parser.add_subparsers(dest="command", required=True)

    for stage in STAGES:
        p = sub.add_parser(stage, help=f"run the {stage} stage")
        p.add_argument("--force", action="store_true", help="re-run even if up to date")
        if stage == "label":
            p.add_argument("--context",
                           choices=["auto", "client-server", "non-client-server"],
                           default=None)
        if stage == "train":
            p.add_argument("--c", type=float, default=None, dest="penalty_c")
            p.add_argument("--epochs", type=int, default=None)
        if stage == "detect":
            p.add_argument("--threshold", type=float, default=None)
            p.add_argument("--no-class-filter", action="store_true")

    p = sub.add_parser("cv", help="k-fold cross-validation over labeled snippets")
    p.add_argument("--c", type=float, default=None, dest="penalty_c")
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--folds", type=int, default=None)

    p = sub.add_parser("predict", help="alias of classify")
    p.add_argument("--force", action="store_true")

    p = sub.add_parser("run", help="run a stage range in order")
    p.add_argument("--from", dest="from_stage", choices=STAGES, default=STAGES[0])
    p.add_argument("--to", dest="to_stage", choices=STAGES, default=STAGES[-1])
    p.add_argument("--force", action="store_true")
    return parser


def _apply_overrides(config: PipelineConfig, args: argparse.Namespace) -> None:
    if args.jobs is not None:
        config.jobs = args.jobs
    if args.seed is not None:
        config.seed = args.seed
    if getattr(args, "context", None) is not None:
        config.context = args.context
    if getattr(args, "penalty_c", None) is not None:
        config.penalty_c = args.penalty_c
    if getattr(args, "epochs", None) is not None:
        config.epochs = args.epochs
    if getattr(args, "folds", None) is not None:
        config.folds = args.folds
    if getattr(args, "threshold", None) is not None:
        config.similarity_threshold = args.threshold
    if getattr(args, "no_class_filter", False):
        config.candidate_class_filter = False


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if not args.config:
            raise ConfigError("a --config file is required")
        config = PipelineConfig.load(args.config)
        _apply_overrides(config, args)
        pipeline = Pipeline(config)

        if args.command == "cv":
            result = pipeline.cross_validate()
            print(json.dumps({
                "folds": [vars(f) for f in result["folds"]],
                "mean_accuracy": result["mean_accuracy"],
                "mean_precision": result["mean_precision"],
                "mean_recall": result["mean_recall"],
            }, indent=2, sort_keys=True))
            return EXIT_OK

        if args.command == "run":
            lo, hi = STAGES.index(args.from_stage), STAGES.index(args.to_stage)
            if lo > hi:
                raise ConfigError(f"--from {args.from_stage} is after --to {args.to_stage}")
            statuses = pipeline.run(STAGES[lo:hi + 1], force=args.force)
            for stage, status in statuses.items():
                print(f"{stage}: {status}")
            return EXIT_OK

        stage = "classify" if args.command == "predict" else args.command
        status = pipeline.run_stage(stage, force=getattr(args, "force", False))
        print(f"{stage}: {status}")
        return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except StageDependencyError as exc:
        print(f"upstream error: {exc}", file=sys.stderr)
        return EXIT_UPSTREAM
    except (DataError, IngestError, RegistryError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
