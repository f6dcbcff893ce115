"""Post-dump ingestion: row parsing, code-block extraction, dedupe.

The input format is the Stack Exchange ``Posts.xml`` row layout: one
``<row .../>`` element per post with attributes Id, PostTypeId, ParentId,
Tags, Score, ViewCount and Body. Parsing is a single streaming pass;
memory stays bounded by the set of matched question ids, which is what
lets a full dump run on one machine.
"""

from __future__ import annotations

import hashlib
import html
import re
import xml.parsers.expat
from dataclasses import dataclass
from enum import Enum
from typing import IO, Iterable, Iterator

from .diagnostics import Diagnostics

__all__ = [
    "Diagnostics",
    "IngestError",
    "PostKind",
    "PostRecord",
    "SnippetRecord",
    "dedupe",
    "extract_snippets",
    "normalized_hash",
    "parse_dump",
]


class IngestError(ValueError):
    """Fatal dump-level failure (malformed XML), with the byte offset."""

    def __init__(self, message: str, byte_offset: int):
        super().__init__(f"{message} at byte {byte_offset}")
        self.byte_offset = byte_offset


class PostKind(str, Enum):
    QUESTION = "question"
    ANSWER = "answer"


@dataclass(frozen=True)
class PostRecord:
    post_id: int
    kind: PostKind
    body_html: str
    score: int = 0
    view_count: int = 0
    parent_id: int | None = None
    tags: frozenset[str] = frozenset()


@dataclass(frozen=True)
class SnippetRecord:
    snippet_id: str
    post_id: int
    kind: PostKind
    score: int
    view_count: int
    code_text: str
    hash: int

    def to_json_dict(self) -> dict:
        return {
            "snippet_id": self.snippet_id,
            "post_id": self.post_id,
            "kind": self.kind.value,
            "score": self.score,
            "view_count": self.view_count,
            "code_text": self.code_text,
            "hash": f"{self.hash:016x}",
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "SnippetRecord":
        return cls(
            snippet_id=d["snippet_id"],
            post_id=d["post_id"],
            kind=PostKind(d["kind"]),
            score=d["score"],
            view_count=d["view_count"],
            code_text=d["code_text"],
            hash=int(d["hash"], 16),
        )


# SE dumps carry tags either as "<android><java>" or "|android|java|".
_TAG_RE = re.compile(r"<([^<>]+)>|\|([^|]+)(?=\|)")


def _parse_tags(raw: str) -> frozenset[str]:
    tags = set()
    for m in _TAG_RE.finditer(raw):
        tags.add((m.group(1) or m.group(2)).strip().lower())
    return frozenset(t for t in tags if t)


def normalized_hash(code_text: str) -> int:
    """64-bit content digest over whitespace-normalized text.

    Runs of whitespace (including newlines) collapse to single spaces so
    formatting-only variants hash identically.
    """
    normalized = " ".join(code_text.split())
    digest = hashlib.blake2b(normalized.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big")


def parse_dump(
    dump_stream: IO[bytes],
    tag_filter: set[str],
    diagnostics: Diagnostics | None = None,
) -> Iterator[PostRecord]:
    """Stream question posts whose tags intersect ``tag_filter`` plus all
    answers whose parent question matched.

    Answers are assumed to appear after their question, which holds for
    id-ordered dumps; an orphan answer is counted and skipped. Rows
    missing required attributes are skipped and tallied. Malformed XML
    raises :class:`IngestError` with the byte offset.
    """
    diag = diagnostics if diagnostics is not None else Diagnostics()
    wanted = {t.lower() for t in tag_filter}
    matched_questions: set[int] = set()
    rows: list[dict[str, str]] = []

    parser = xml.parsers.expat.ParserCreate()

    def start_element(name: str, attrs: dict[str, str]) -> None:
        if name == "row":
            rows.append(attrs)

    parser.StartElementHandler = start_element

    def records() -> Iterator[PostRecord]:
        buf_size = 64 * 1024
        while True:
            chunk = dump_stream.read(buf_size)
            try:
                parser.Parse(chunk, not chunk)
            except xml.parsers.expat.ExpatError as exc:
                raise IngestError(
                    xml.parsers.expat.errors.messages[exc.code],
                    parser.ErrorByteIndex,
                ) from exc
            while rows:
                rec = _row_to_record(rows.pop(0), diag)
                if rec is None:
                    continue
                if rec.kind is PostKind.QUESTION:
                    if rec.tags & wanted:
                        matched_questions.add(rec.post_id)
                        yield rec
                else:
                    if rec.parent_id in matched_questions:
                        yield rec
            if not chunk:
                break

    return records()


def _row_to_record(attrs: dict[str, str], diag: Diagnostics) -> PostRecord | None:
    try:
        post_id = int(attrs["Id"])
        post_type = int(attrs["PostTypeId"])
    except (KeyError, ValueError):
        diag.bump("rows_missing_required")
        return None
    if post_type not in (1, 2):
        diag.bump("rows_other_type")
        return None
    if "Body" not in attrs:
        diag.bump("rows_missing_required")
        return None
    score = int(attrs.get("Score", 0))
    if post_type == 1:
        return PostRecord(
            post_id=post_id,
            kind=PostKind.QUESTION,
            body_html=attrs["Body"],
            score=score,
            view_count=int(attrs.get("ViewCount", 0)),
            tags=_parse_tags(attrs.get("Tags", "")),
        )
    if "ParentId" not in attrs:
        diag.bump("rows_missing_required")
        return None
    return PostRecord(
        post_id=post_id,
        kind=PostKind.ANSWER,
        body_html=attrs["Body"],
        score=score,
        parent_id=int(attrs["ParentId"]),
    )


_CODE_OPEN_RE = re.compile(r"(<pre[^>]*>\s*)?<code[^>]*>", re.IGNORECASE)
_CODE_CLOSE_RE = re.compile(r"</code>", re.IGNORECASE)

# Inline <code> spans below this many whitespace-separated chunks carry no
# analyzable structure (single identifiers, flag names) and are dropped.
_MIN_INLINE_TOKENS = 2


def extract_snippets(
    post: PostRecord,
    diagnostics: Diagnostics | None = None,
) -> list[SnippetRecord]:
    """One record per ``<code>`` region of the post body, document order.

    HTML entities are decoded. ``<pre><code>`` blocks are always kept;
    bare inline spans must have at least two tokens. An unclosed
    ``<code>`` swallows the rest of the body as one block and is flagged.
    """
    diag = diagnostics if diagnostics is not None else Diagnostics()
    body = post.body_html
    out: list[SnippetRecord] = []
    ordinal = 0
    pos = 0
    while True:
        m = _CODE_OPEN_RE.search(body, pos)
        if m is None:
            break
        is_block = m.group(1) is not None
        close = _CODE_CLOSE_RE.search(body, m.end())
        if close is None:
            raw = body[m.end():]
            pos = len(body)
            diag.bump("unbalanced_code_tags")
        else:
            raw = body[m.end():close.start()]
            pos = close.end()
        code_text = html.unescape(raw)
        if not code_text.strip():
            diag.bump("empty_code_blocks")
            continue
        if not is_block and len(code_text.split()) < _MIN_INLINE_TOKENS:
            diag.bump("short_inline_spans")
            continue
        out.append(
            SnippetRecord(
                snippet_id=f"{post.post_id}#{ordinal}",
                post_id=post.post_id,
                kind=post.kind,
                score=post.score,
                view_count=post.view_count,
                code_text=code_text,
                hash=normalized_hash(code_text),
            )
        )
        ordinal += 1
    return out


def dedupe(snippets: Iterable[SnippetRecord]) -> list[SnippetRecord]:
    """Keep the first occurrence per normalized content hash."""
    seen: set[int] = set()
    out = []
    for s in snippets:
        if s.hash in seen:
            continue
        seen.add(s.hash)
        out.append(s)
    return out
