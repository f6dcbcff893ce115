"""Corpus summary and community-feedback correlation tables.

The summary counts affected corpus units per security category and
label; the feedback analysis orders snippets by how many units contain
them and compares score/view-count means between the most- and
least-copied quartiles, split by question/answer, plus a
with/without-warning comparison for insecure snippets.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

__all__ = [
    "FeedbackRecord",
    "feedback_correlation",
    "feedback_tables_csv",
    "report_category",
    "summarize",
]

DEFAULT_WARNING_LEXICON = ("insecure", "vulnerable", "mitm", "do not use", "unsafe")


@dataclass(frozen=True)
class FeedbackRecord:
    snippet_id: str
    kind: str  # question | answer
    score: int
    view_count: int
    has_warning_comment: bool
    detection_count: int


def report_category(categories: Sequence[str], fired_rules: Sequence[str]) -> list[str]:
    """Report buckets for one verdict; signature-rule hits split out of
    the hash bucket, and rule-less verdicts count as not security
    relevant."""
    cats = set(categories)
    if any(r.startswith("hash-signature") for r in fired_rules):
        cats.discard("Hash")
        cats.add("Signatures")
    if not cats:
        cats.add("NotSecurityRelated")
    return sorted(cats)


def summarize(
    matches: Iterable[Mapping],
    verdicts: Mapping[str, Mapping],
    n_apps: int,
) -> dict:
    """Per-category and per-label app counts plus top offenders.

    ``matches`` are clone-match dicts ({snippet_id, app_id, ...});
    ``verdicts`` maps snippet_id to its verdict dict ({label,
    categories, fired_rules}).
    """
    apps_by_snippet: dict[str, set[str]] = {}
    snippets_by_app: dict[str, set[str]] = {}
    for m in matches:
        sid, app = m["snippet_id"], m["app_id"]
        apps_by_snippet.setdefault(sid, set()).add(app)
        snippets_by_app.setdefault(app, set()).add(sid)

    def verdict_of(sid: str) -> Mapping:
        return verdicts.get(sid, {"label": "secure", "categories": [], "fired_rules": []})

    category_apps: dict[str, dict[str, set[str]]] = {}
    secure_apps: set[str] = set()
    insecure_apps: set[str] = set()
    for app, sids in snippets_by_app.items():
        for sid in sids:
            v = verdict_of(sid)
            label = v["label"]
            (insecure_apps if label == "insecure" else secure_apps).add(app)
            for cat in report_category(v.get("categories", []), v.get("fired_rules", [])):
                category_apps.setdefault(cat, {"secure": set(), "insecure": set()})[label].add(app)

    def pct(n: int) -> float:
        return round(100.0 * n / n_apps, 2) if n_apps else 0.0

    top = sorted(
        ((sid, len(apps)) for sid, apps in apps_by_snippet.items()),
        key=lambda kv: (-kv[1], kv[0]),
    )
    return {
        "n_apps": n_apps,
        "apps_with_any_match": len(snippets_by_app),
        "apps_with_any_match_pct": pct(len(snippets_by_app)),
        "apps_with_insecure": len(insecure_apps),
        "apps_with_insecure_pct": pct(len(insecure_apps)),
        "apps_with_secure": len(secure_apps),
        "apps_with_secure_pct": pct(len(secure_apps)),
        "categories": {
            cat: {
                "secure_apps": len(buckets["secure"]),
                "secure_pct": pct(len(buckets["secure"])),
                "insecure_apps": len(buckets["insecure"]),
                "insecure_pct": pct(len(buckets["insecure"])),
            }
            for cat, buckets in sorted(category_apps.items())
        },
        "top_snippets": [
            {
                "snippet_id": sid,
                "detection_count": count,
                "label": verdict_of(sid)["label"],
            }
            for sid, count in top[:10]
        ],
    }


def _mean(values: list[float]) -> float:
    return sum(values) / len(values) if values else 0.0


def feedback_correlation(records: Sequence[FeedbackRecord]) -> dict:
    """Quartile-tier and warning-split feedback statistics.

    Snippets are ordered by detection count (ties by snippet id); the
    top and bottom 25% form the tiers, separately per question/answer
    kind. Fewer than four records leave the tiers undefined.
    """
    if len(records) < 4:
        raise ValueError("tier analysis needs at least 4 records")
    tiers: dict[str, dict] = {}
    for kind in ("question", "answer"):
        group = sorted(
            (r for r in records if r.kind == kind),
            key=lambda r: (-r.detection_count, r.snippet_id),
        )
        if not group:
            continue
        k = max(1, len(group) // 4)
        top, bottom = group[:k], group[-k:]
        tiers[kind] = {
            "n": len(group),
            "tier_size": k,
            "top_mean_score": _mean([r.score for r in top]),
            "bottom_mean_score": _mean([r.score for r in bottom]),
            "top_mean_views": _mean([r.view_count for r in top]),
            "bottom_mean_views": _mean([r.view_count for r in bottom]),
        }
    warnings: dict[str, dict] = {}
    for kind in ("question", "answer"):
        group = [r for r in records if r.kind == kind]
        if not group:
            continue
        warned = [r for r in group if r.has_warning_comment]
        unwarned = [r for r in group if not r.has_warning_comment]
        warnings[kind] = {
            "with_warning_n": len(warned),
            "with_warning_mean_score": _mean([r.score for r in warned]),
            "with_warning_mean_views": _mean([r.view_count for r in warned]),
            "without_warning_n": len(unwarned),
            "without_warning_mean_score": _mean([r.score for r in unwarned]),
            "without_warning_mean_views": _mean([r.view_count for r in unwarned]),
        }
    return {"tiers": tiers, "warnings": warnings}


def feedback_tables_csv(correlation: dict) -> tuple[str, str]:
    """CSV renderings of the tier and warning tables."""
    tiers_buf = io.StringIO()
    w = csv.writer(tiers_buf, lineterminator="\n")
    w.writerow(["kind", "n", "tier_size", "top_mean_score", "bottom_mean_score",
                "top_mean_views", "bottom_mean_views"])
    for kind, row in sorted(correlation["tiers"].items()):
        w.writerow([kind, row["n"], row["tier_size"], row["top_mean_score"],
                    row["bottom_mean_score"], row["top_mean_views"], row["bottom_mean_views"]])
    warn_buf = io.StringIO()
    w = csv.writer(warn_buf, lineterminator="\n")
    w.writerow(["kind", "with_warning_n", "with_warning_mean_score", "with_warning_mean_views",
                "without_warning_n", "without_warning_mean_score", "without_warning_mean_views"])
    for kind, row in sorted(correlation["warnings"].items()):
        w.writerow([kind, row["with_warning_n"], row["with_warning_mean_score"],
                    row["with_warning_mean_views"], row["without_warning_n"],
                    row["without_warning_mean_score"], row["without_warning_mean_views"]])
    return tiers_buf.getvalue(), warn_buf.getvalue()
