"""
Dump ingestion: posts, code blocks, and content dedupe
======================================================

Walks the bundled 50-row post dump through the first pipeline stage:
tag-filtered streaming parse, code-block extraction with entity
decoding, and content-hash dedupe.
"""

import io
from collections import Counter

from snipscan.diagnostics import Diagnostics
from snipscan.ingest import PostKind, dedupe, extract_snippets, parse_dump
from snipscan.synth import mini_dump_xml

# The dump is ordinary Posts.xml row format; the parser streams it and
# keeps only android-tagged questions plus their answers.
diag = Diagnostics()
posts = list(parse_dump(io.BytesIO(mini_dump_xml()), {"android"}, diag))
kinds = Counter(p.kind for p in posts)
print(f"matched posts: {len(posts)} "
      f"({kinds[PostKind.QUESTION]} questions, {kinds[PostKind.ANSWER]} answers)")

# One SnippetRecord per <code> region, in document order.
snippets = []
for post in posts:
    snippets.extend(extract_snippets(post, diag))
print(f"extracted code blocks: {len(snippets)}")

# Distinctness is whitespace-insensitive content hashing: the dump
# contains one answer that re-posts a question's snippet reformatted.
unique = dedupe(snippets)
print(f"distinct snippets: {len(unique)}")
print(f"diagnostics: {diag.counters}")

print("\nfirst snippet:")
first = unique[0]
print(f"  id={first.snippet_id} kind={first.kind.value} "
      f"score={first.score} views={first.view_count}")
for line in first.code_text.splitlines():
    print("  |", line)
