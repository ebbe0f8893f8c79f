"""Directed content similarity via token fingerprints.

Pipeline: normalize a document into a token stream, hash its k-grams with a
fixed 64-bit polynomial rolling hash, winnow the hashes (minimum of every
window of w, rightmost on ties), then score a directed pair as the share of
one document's distinct fingerprint hashes found in the other. Zero-overlap
pairs produce no record at all.
"""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .corpus import Project

PROFILES = ("generic-code", "plain-text")

# (k, w) defaults per tokenizer profile.
DEFAULT_PARAMS = {"generic-code": (5, 4), "plain-text": (3, 4)}

IDENT = "IDENT"
NUM = "NUM"
STR = "STR"

# Pragmatic multi-language keyword set: keywords survive normalization,
# identifiers do not.
_KEYWORDS = frozenset(
    """
    abstract and as assert async await bool boolean break byte case catch char
    class const continue def default del delete do double elif else enum except
    export extends extern final finally float for from fn function global goto
    if impl implements import in instanceof int interface is lambda let long
    match mod module mut namespace new none not null or pass print private
    protected public raise return self short signed sizeof static struct super
    switch template this throw throws trait true try type typedef typeof union
    unsigned use using var void volatile while with yield false
    """.split()
)

_MULTI_OPS = (
    "<<=", ">>=", "===", "!==", "...", "**=", "//=",
    "<=", ">=", "==", "!=", "&&", "||", "++", "--", "+=", "-=", "*=", "/=",
    "%=", "&=", "|=", "^=", "->", "=>", "::", "<<", ">>", "**",
)

_WORD_RE = re.compile(r"[0-9a-z]+")


class ReportImportError(ValueError):
    """A similarity report file failed validation; message names the line."""


@dataclass(frozen=True)
class TokenStream:
    """Normalized token codes plus per-token byte spans into the source."""

    tokens: tuple[str, ...]
    origin_spans: tuple[tuple[int, int], ...]

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class FingerprintSet:
    """Winnowed (hash, k-gram position) pairs for one token stream."""

    prints: frozenset[tuple[int, int]]
    k: int
    w: int

    def hashes(self) -> frozenset[int]:
        return frozenset(h for h, _ in self.prints)


@dataclass(frozen=True)
class SimilarityRecord:
    """Directed similarity: share of doc_i's fingerprints found in doc_j."""

    doc_i: str
    doc_j: str
    s: float
    matched_spans: tuple[tuple[tuple[int, int], tuple[int, int]], ...] = ()

    def __post_init__(self) -> None:
        if self.doc_i == self.doc_j:
            raise ValueError("similarity record must relate two distinct documents")
        if not 0.0 < self.s <= 1.0:
            raise ValueError(f"similarity must be in (0, 1], got {self.s}")


def tokenize(content: bytes, profile: str) -> TokenStream:
    """Normalize document bytes into a token stream.

    generic-code strips comments and whitespace, collapses identifiers to a
    single IDENT code and literals to their class codes; plain-text lowercases
    and keeps one code per word.
    """
    if profile == "generic-code":
        text = content.decode("utf-8", errors="replace")
        return _tokenize_code(text)
    if profile == "plain-text":
        try:
            text = content.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ValueError(f"plain-text content is not valid UTF-8: {exc}") from exc
        return _tokenize_text(text)
    raise ValueError(f"unknown tokenizer profile: {profile!r}")


def _byte_offsets(text: str) -> list[int]:
    # offsets[i] = byte offset of character i in the UTF-8 encoding
    offsets = [0]
    total = 0
    for ch in text:
        total += len(ch.encode("utf-8"))
        offsets.append(total)
    return offsets


def _tokenize_text(text: str) -> TokenStream:
    lowered = text.lower()
    offsets = _byte_offsets(text)
    tokens: list[str] = []
    spans: list[tuple[int, int]] = []
    for m in _WORD_RE.finditer(lowered):
        tokens.append(m.group())
        spans.append((offsets[m.start()], offsets[m.end()]))
    return TokenStream(tuple(tokens), tuple(spans))


def _tokenize_code(text: str) -> TokenStream:
    offsets = _byte_offsets(text)
    tokens: list[str] = []
    spans: list[tuple[int, int]] = []
    i, n = 0, len(text)

    def emit(code: str, start: int, end: int) -> None:
        tokens.append(code)
        spans.append((offsets[start], offsets[end]))

    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c == "#" or text.startswith("//", i):
            j = text.find("\n", i)
            i = n if j < 0 else j + 1
            continue
        if text.startswith("/*", i):
            j = text.find("*/", i + 2)
            i = n if j < 0 else j + 2
            continue
        if c in "\"'":
            j = i + 1
            while j < n and text[j] != c:
                j += 2 if text[j] == "\\" else 1
            j = min(j + 1, n)
            emit(STR, i, j)
            i = j
            continue
        if c.isdigit():
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] in "._"):
                j += 1
            emit(NUM, i, j)
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            emit(word if word in _KEYWORDS else IDENT, i, j)
            i = j
            continue
        for op in _MULTI_OPS:
            if text.startswith(op, i):
                emit(op, i, i + len(op))
                i += len(op)
                break
        else:
            emit(c, i, i + 1)
            i += 1
    return TokenStream(tuple(tokens), tuple(spans))


# 64-bit FNV-1a for token codes, then a polynomial rolling hash over token
# hashes; both fixed so fingerprints are stable across runs and platforms.
_MASK64 = (1 << 64) - 1
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_BASE = 0x100000001B3


def _token_hash(token: str) -> int:
    h = _FNV_OFFSET
    for b in token.encode("utf-8"):
        h = ((h ^ b) * _FNV_PRIME) & _MASK64
    return h


def kgram_hashes(tokens: Sequence[str], k: int) -> list[int]:
    """Rolling 64-bit hashes of every k-gram of token codes."""
    if k < 1:
        raise ValueError("k must be >= 1")
    vals = [_token_hash(t) for t in tokens]
    n = len(vals)
    if n < k:
        return []
    top = pow(_BASE, k - 1, 1 << 64)
    h = 0
    for v in vals[:k]:
        h = (h * _BASE + v) & _MASK64
    out = [h]
    for i in range(1, n - k + 1):
        h = ((h - vals[i - 1] * top) * _BASE + vals[i + k - 1]) & _MASK64
        out.append(h)
    return out


def winnow(hashes: Sequence[int], w: int) -> set[tuple[int, int]]:
    """Select (hash, position) of the minimum in every window of w hashes.

    Ties go to the rightmost occurrence. Fewer than w hashes are treated as
    a single truncated window so short inputs still yield a selection.
    """
    if w < 1:
        raise ValueError("w must be >= 1")
    m = len(hashes)
    if m == 0:
        return set()
    selected: set[tuple[int, int]] = set()
    for start in range(max(1, m - w + 1)):
        window = hashes[start : start + w]
        best = min(window)
        # rightmost occurrence of the window minimum
        pos = start + len(window) - 1 - window[::-1].index(best)
        selected.add((best, pos))
    return selected


def fingerprint(stream: TokenStream | Sequence[str], k: int, w: int) -> FingerprintSet:
    """Winnow a token stream: minimum hash per window, rightmost on ties.

    Streams shorter than k tokens yield an empty set.
    """
    if k < 1 or w < 1:
        raise ValueError("k and w must be >= 1")
    tokens = stream.tokens if isinstance(stream, TokenStream) else tuple(stream)
    return FingerprintSet(frozenset(winnow(kgram_hashes(tokens, k), w)), k, w)


def pairwise_similarity(
    a: FingerprintSet,
    b: FingerprintSet,
    doc_i: str,
    doc_j: str,
    spans_i: Sequence[tuple[int, int]] | None = None,
    spans_j: Sequence[tuple[int, int]] | None = None,
) -> Optional[SimilarityRecord]:
    """Directed similarity of doc_i against doc_j, or None when disjoint.

    `s = |hashes(a) ∩ hashes(b)| / |hashes(a)|`. Matched spans are byte spans
    when the original token spans are supplied, else k-gram token index spans.
    """
    if (a.k, a.w) != (b.k, b.w):
        raise ValueError(f"fingerprint parameter mismatch: {(a.k, a.w)} vs {(b.k, b.w)}")
    ha, hb = a.hashes(), b.hashes()
    if not ha:
        return None
    shared = ha & hb
    if not shared:
        return None
    first_in_b: dict[int, int] = {}
    for h, pos in sorted(b.prints, key=lambda p: p[1]):
        first_in_b.setdefault(h, pos)
    matched = []
    for h, pos in sorted(a.prints, key=lambda p: (p[1], p[0])):
        if h not in shared:
            continue
        matched.append(
            (
                _gram_span(pos, a.k, spans_i),
                _gram_span(first_in_b[h], b.k, spans_j),
            )
        )
    return SimilarityRecord(
        doc_i=doc_i,
        doc_j=doc_j,
        s=len(shared) / len(ha),
        matched_spans=tuple(matched),
    )


def _gram_span(
    pos: int, k: int, spans: Sequence[tuple[int, int]] | None
) -> tuple[int, int]:
    if spans is None:
        return (pos, pos + k)
    return (spans[pos][0], spans[pos + k - 1][1])


def all_pairs_similarity(
    project: Project,
    assignment_id: str,
    k: int | None = None,
    w: int | None = None,
) -> list[SimilarityRecord]:
    """Both directions of every document pair with distinct authors.

    Output is sorted by (doc_i, doc_j) so results do not depend on document
    insertion order.
    """
    assignment = project.assignments.get(assignment_id)
    if assignment is None:
        raise KeyError(f"unknown assignment id: {assignment_id}")
    profile = assignment.language_profile
    dk, dw = DEFAULT_PARAMS.get(profile, DEFAULT_PARAMS["generic-code"])
    k = dk if k is None else k
    w = dw if w is None else w

    docs = sorted(project.documents_for_assignment(assignment_id), key=lambda d: d.id)
    streams = {d.id: tokenize(d.content, profile) for d in docs}
    fps = {d.id: fingerprint(streams[d.id], k, w) for d in docs}
    records = []
    for di in docs:
        for dj in docs:
            if di.id == dj.id or di.author == dj.author:
                continue
            rec = pairwise_similarity(
                fps[di.id],
                fps[dj.id],
                di.id,
                dj.id,
                spans_i=streams[di.id].origin_spans,
                spans_j=streams[dj.id].origin_spans,
            )
            if rec is not None:
                records.append(rec)
    return records


def import_similarity_report(path: Path | str, project: Project) -> list[SimilarityRecord]:
    """Load an external tool's CSV report (header: doc_i,doc_j,s_ij)."""
    text = Path(path).read_text(encoding="utf-8")
    return parse_similarity_csv(text, project)


def parse_similarity_csv(text: str, project: Project) -> list[SimilarityRecord]:
    reader = csv.reader(io.StringIO(text))
    rows = list(reader)
    if not rows or [c.strip() for c in rows[0]] != ["doc_i", "doc_j", "s_ij"]:
        raise ReportImportError("line 1: expected header 'doc_i,doc_j,s_ij'")
    records = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 3:
            raise ReportImportError(f"line {lineno}: expected 3 fields, got {len(row)}")
        doc_i, doc_j, raw = (c.strip() for c in row)
        for d in (doc_i, doc_j):
            if d not in project.documents:
                raise ReportImportError(f"line {lineno}: unknown document id {d!r}")
        try:
            s = float(raw)
        except ValueError as exc:
            raise ReportImportError(f"line {lineno}: bad similarity value {raw!r}") from exc
        if not 0.0 < s <= 1.0:
            raise ReportImportError(f"line {lineno}: similarity {s} outside (0, 1]")
        if doc_i == doc_j:
            raise ReportImportError(f"line {lineno}: document paired with itself")
        if project.documents[doc_i].author == project.documents[doc_j].author:
            raise ReportImportError(f"line {lineno}: both documents share an author")
        records.append(SimilarityRecord(doc_i=doc_i, doc_j=doc_j, s=s))
    return records


def similarity_csv(records: Iterable[SimilarityRecord]) -> str:
    """Export records in the same CSV format the importer accepts."""
    lines = ["doc_i,doc_j,s_ij"]
    for r in sorted(records, key=lambda r: (r.doc_i, r.doc_j)):
        lines.append(f"{r.doc_i},{r.doc_j},{r.s:.6f}")
    return "\n".join(lines) + "\n"
