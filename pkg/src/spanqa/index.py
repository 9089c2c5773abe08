"""In-process inverted index with BM25 ranking.

Title and body are indexed into a single field (title tokens prepended);
document length for score normalization is the body token count. The
scoring variant is the Lucene-style one:

    idf(t) = ln(1 + (N - df + 0.5) / (df + 0.5))
    score(q, d) = sum over unique q terms of
        idf(t) * tf * (k1 + 1) / (tf + k1 * (1 - b + b * len_d / avg_len))

Terms are summed in sorted order so rankings are reproducible bit for bit
across runs and across save/load round trips. An index is immutable once
built; rebuild to update.
"""

from __future__ import annotations

import json
import zlib
from bisect import bisect_left
from dataclasses import dataclass, replace
from math import log
from pathlib import Path
from typing import Iterable, Iterator, Mapping

from .analysis import Analyzer
from .errors import (
    CorpusInvalid,
    DuplicateDocId,
    EmptyCorpus,
    FormatVersionMismatch,
    IoFailure,
)

_MAGIC = b"SQIX"
_VERSION = 1

DEFAULT_K1 = 1.2
DEFAULT_B = 0.75


@dataclass(frozen=True)
class Document:
    """One corpus unit. ``token_count`` is filled in at ingest time."""

    doc_id: str
    title: str
    body: str
    token_count: int = 0


@dataclass(frozen=True)
class PostingList:
    term: str
    postings: tuple[tuple[int, int], ...]  # (doc_ordinal, term_frequency)

    @property
    def doc_frequency(self) -> int:
        return len(self.postings)


@dataclass(frozen=True)
class IndexStats:
    doc_count: int
    avg_doc_len: float
    k1: float
    b: float


@dataclass(frozen=True)
class RetrievedHit:
    doc_id: str
    score: float
    rank: int


class Index:
    """Immutable inverted index. Build with :func:`ingest` or :meth:`load`."""

    def __init__(
        self,
        docs: list[Document],
        postings: dict[str, list[tuple[int, int]]],
        k1: float,
        b: float,
        analyzer: Analyzer | None = None,
    ):
        self._docs = docs
        self._postings = postings
        self._ordinals = {d.doc_id: i for i, d in enumerate(docs)}
        self.k1 = k1
        self.b = b
        self.analyzer = analyzer or Analyzer()
        total = sum(d.token_count for d in docs)
        self._avg_doc_len = total / len(docs) if docs else 0.0

    def __len__(self) -> int:
        return len(self._docs)

    @property
    def documents(self) -> tuple[Document, ...]:
        return tuple(self._docs)

    @property
    def stats(self) -> IndexStats:
        return IndexStats(len(self._docs), self._avg_doc_len, self.k1, self.b)

    def get(self, doc_id: str) -> Document:
        return self._docs[self._ordinals[doc_id]]

    def __contains__(self, doc_id: str) -> bool:
        return doc_id in self._ordinals

    def posting_list(self, term: str) -> PostingList | None:
        postings = self._postings.get(term)
        if not postings:
            return None
        return PostingList(term=term, postings=tuple(postings))

    def doc_frequency(self, term: str) -> int:
        return len(self._postings.get(term, ()))

    def idf(self, term: str) -> float:
        df = self.doc_frequency(term)
        if df == 0:
            return 0.0
        n = len(self._docs)
        return log(1 + (n - df + 0.5) / (df + 0.5))

    def _term_frequency(self, term: str, ordinal: int) -> int:
        postings = self._postings.get(term, [])
        i = bisect_left(postings, (ordinal,))
        if i < len(postings) and postings[i][0] == ordinal:
            return postings[i][1]
        return 0

    def bm25_score(self, query_terms: Iterable[str], ordinal: int) -> float:
        """Score one document against a query term multiset.

        Duplicate query terms do not double count; terms absent from the
        document contribute zero.
        """
        score = 0.0
        doc_len = self._docs[ordinal].token_count
        for term in sorted(set(query_terms)):
            tf = self._term_frequency(term, ordinal)
            if tf == 0:
                continue
            norm = self.k1 * (1 - self.b + self.b * doc_len / self._avg_doc_len)
            score += self.idf(term) * tf * (self.k1 + 1) / (tf + norm)
        return score

    def search(
        self,
        query_terms: Iterable[str],
        k: int,
        weights: Mapping[str, float] | None = None,
    ) -> list[RetrievedHit]:
        """Top-k documents by BM25, ties broken by doc_id ascending.

        ``weights`` optionally scales the contribution of individual terms
        (used for query-expansion term weighting); unlisted terms weigh 1.0.
        """
        if k < 1:
            raise ValueError("k must be >= 1")
        scores: dict[int, float] = {}
        for term in sorted(set(query_terms)):
            postings = self._postings.get(term)
            if not postings:
                continue
            idf = self.idf(term)
            weight = weights.get(term, 1.0) if weights else 1.0
            for ordinal, tf in postings:
                doc_len = self._docs[ordinal].token_count
                norm = self.k1 * (1 - self.b + self.b * doc_len / self._avg_doc_len)
                contribution = weight * idf * tf * (self.k1 + 1) / (tf + norm)
                scores[ordinal] = scores.get(ordinal, 0.0) + contribution
        ranked = sorted(
            scores.items(), key=lambda item: (-item[1], self._docs[item[0]].doc_id)
        )
        return [
            RetrievedHit(doc_id=self._docs[ordinal].doc_id, score=score, rank=rank)
            for rank, (ordinal, score) in enumerate(ranked[:k])
        ]

    def save(self, path: str | Path) -> None:
        """Write the index as a single binary file (layout in README)."""
        payload = {
            "k1": self.k1,
            "b": self.b,
            "docs": [
                [d.doc_id, d.title, d.body, d.token_count] for d in self._docs
            ],
            "postings": {t: p for t, p in sorted(self._postings.items())},
        }
        blob = zlib.compress(
            json.dumps(payload, ensure_ascii=False).encode("utf-8"), level=6
        )
        data = _MAGIC + bytes([_VERSION]) + len(blob).to_bytes(8, "big") + blob
        try:
            Path(path).write_bytes(data)
        except OSError as exc:
            raise IoFailure(f"cannot write index to {path}: {exc}") from exc

    @classmethod
    def load(
        cls,
        path: str | Path,
        analyzer: Analyzer | None = None,
        k1: float | None = None,
        b: float | None = None,
    ) -> "Index":
        """Load a persisted index. ``k1``/``b`` override the stored scoring
        parameters (the serving configuration wins over ingest defaults)."""
        try:
            data = Path(path).read_bytes()
        except OSError as exc:
            raise IoFailure(f"cannot read index from {path}: {exc}") from exc
        if len(data) < 13:
            raise FormatVersionMismatch(f"{path}: truncated header")
        if data[:4] != _MAGIC:
            raise FormatVersionMismatch(f"{path}: not an index file (bad magic)")
        if data[4] != _VERSION:
            raise FormatVersionMismatch(
                f"{path}: unsupported index version {data[4]}"
            )
        length = int.from_bytes(data[5:13], "big")
        blob = data[13:]
        if len(blob) != length:
            raise FormatVersionMismatch(
                f"{path}: payload truncated ({len(blob)} of {length} bytes)"
            )
        try:
            payload = json.loads(zlib.decompress(blob).decode("utf-8"))
            docs = [
                Document(doc_id=i, title=t, body=b, token_count=n)
                for i, t, b, n in payload["docs"]
            ]
            postings = {
                term: [(int(o), int(tf)) for o, tf in plist]
                for term, plist in payload["postings"].items()
            }
            return cls(
                docs,
                postings,
                payload["k1"] if k1 is None else k1,
                payload["b"] if b is None else b,
                analyzer,
            )
        except (zlib.error, ValueError, KeyError, TypeError) as exc:
            raise FormatVersionMismatch(f"{path}: corrupt payload: {exc}") from exc


def ingest(
    corpus: Iterable[Document],
    analyzer: Analyzer | None = None,
    k1: float = DEFAULT_K1,
    b: float = DEFAULT_B,
) -> Index:
    """Build an immutable index over ``corpus``.

    Raises DuplicateDocId on a repeated doc_id and EmptyCorpus when the
    corpus yields no documents. Empty bodies are allowed.
    """
    analyzer = analyzer or Analyzer()
    docs: list[Document] = []
    seen: set[str] = set()
    postings: dict[str, list[tuple[int, int]]] = {}
    for doc in corpus:
        if doc.doc_id in seen:
            raise DuplicateDocId(f"duplicate doc_id {doc.doc_id!r}")
        seen.add(doc.doc_id)
        ordinal = len(docs)
        body_tokens = analyzer.tokenize(doc.body)
        indexed_terms = [t.text for t in analyzer.tokenize(doc.title)] + [
            t.text for t in body_tokens
        ]
        docs.append(replace(doc, token_count=len(body_tokens)))
        counts: dict[str, int] = {}
        for term in indexed_terms:
            counts[term] = counts.get(term, 0) + 1
        for term, tf in counts.items():
            postings.setdefault(term, []).append((ordinal, tf))
    if not docs:
        raise EmptyCorpus("corpus contains no documents")
    return Index(docs, postings, k1, b, analyzer)


def read_corpus(path: str | Path) -> Iterator[Document]:
    """Read a JSON-lines corpus: one {"id", "title", "body"} object per line."""
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise IoFailure(f"cannot read corpus {path}: {exc}") from exc
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusInvalid(f"{path}:{lineno}: invalid JSON: {exc}") from exc
        if not isinstance(record, dict) or "id" not in record or "body" not in record:
            raise CorpusInvalid(f"{path}:{lineno}: object must have id and body")
        yield Document(
            doc_id=str(record["id"]),
            title=str(record.get("title", "")),
            body=str(record["body"]),
        )
