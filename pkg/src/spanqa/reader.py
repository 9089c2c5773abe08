"""Answer span extraction over candidate passages.

Passages longer than a backend's token limit are split into overlapping
chunks with a configurable stride; the backend proposes scored spans per
chunk; spans are mapped back to passage offsets, deduplicated (identical
offsets keep the best score), sorted, and truncated to top_k.

Backends are pluggable. The lexical baseline ships in-process and makes
the whole pipeline runnable without any model hosting: it slides token
windows over the chunk and scores them by how much of the question's
IDF mass they cover. A remote backend speaks a small JSON protocol to a
model server and passes through whatever attributions it supplies.
"""

from __future__ import annotations

import threading
from abc import ABC, abstractmethod
from dataclasses import dataclass
from math import log

import httpx

from .analysis import Analyzer, PosTag, Token
from .errors import BackendUnavailable, InvalidStride
from .index import Index

DEFAULT_MAX_TOKENS = 512
DEFAULT_STRIDE = 384


@dataclass(frozen=True)
class Chunk:
    doc_id: str
    chunk_index: int
    token_start: int
    token_end: int
    text: str
    char_start: int  # passage char offset where this chunk's text begins


@dataclass(frozen=True)
class TokenAttribution:
    token: str
    weight: float  # in [0, 1]; the top token of a span is exactly 1.0


@dataclass(frozen=True)
class SpanPrediction:
    """Backend output for one chunk; offsets are chunk-local chars."""

    text: str
    start: int
    end: int
    score: float
    attributions: tuple[TokenAttribution, ...] = ()


@dataclass(frozen=True)
class AnswerSpan:
    text: str
    score: float
    doc_id: str
    chunk_index: int
    passage_char_start: int
    passage_char_end: int
    attributions: tuple[TokenAttribution, ...] = ()


class ReaderBackend(ABC):
    """Span predictor with a declared input size limit."""

    max_tokens: int = DEFAULT_MAX_TOKENS

    @abstractmethod
    def read(self, question: str, chunk_text: str) -> list[SpanPrediction]:
        raise NotImplementedError


def chunk_tokens(
    tokens: list[Token],
    max_tokens: int,
    stride: int,
    doc_id: str = "",
    passage: str = "",
) -> list[Chunk]:
    """Window ``tokens`` at offsets 0, stride, 2*stride, ... stopping once a
    window reaches the end. Consecutive chunks overlap max_tokens - stride
    tokens; every token lands in at least one chunk.
    """
    if stride < 1 or stride > max_tokens:
        raise InvalidStride(f"stride {stride} not in 1..{max_tokens}")
    if not tokens:
        return []
    chunks = []
    start = 0
    while True:
        end = min(start + max_tokens, len(tokens))
        window = tokens[start:end]
        chunks.append(
            Chunk(
                doc_id=doc_id,
                chunk_index=len(chunks),
                token_start=start,
                token_end=end,
                text=passage[window[0].char_start : window[-1].char_end],
                char_start=window[0].char_start,
            )
        )
        if end >= len(tokens):
            return chunks
        start += stride


def num_chunks(n_tokens: int, max_tokens: int, stride: int) -> int:
    """Chunk count produced by :func:`chunk_tokens` for a token count."""
    if stride < 1 or stride > max_tokens:
        raise InvalidStride(f"stride {stride} not in 1..{max_tokens}")
    if n_tokens == 0:
        return 0
    count = 1
    end = max_tokens
    while end < n_tokens:
        count += 1
        end += stride
    return count


def read_passage(
    question: str,
    passage: str,
    backend: ReaderBackend,
    top_k: int,
    stride: int = DEFAULT_STRIDE,
    doc_id: str = "",
    analyzer: Analyzer | None = None,
) -> list[AnswerSpan]:
    """Run ``backend`` over every chunk of ``passage`` and merge the spans.

    Chunk-local offsets are mapped to passage offsets and the span text is
    taken from the passage at those offsets, so AnswerSpan.text always
    equals the recorded substring. Overlapping chunks reporting the same
    passage offsets collapse to the highest-scoring instance. The merged
    list is sorted by score descending, ties by earlier offset, then by
    lower chunk index.
    """
    analyzer = analyzer or Analyzer()
    tokens = analyzer.tokenize(passage)
    chunks = chunk_tokens(tokens, backend.max_tokens, stride, doc_id, passage)
    best: dict[tuple[int, int], AnswerSpan] = {}
    for chunk in chunks:
        for pred in backend.read(question, chunk.text):
            start = chunk.char_start + pred.start
            end = chunk.char_start + pred.end
            span = AnswerSpan(
                text=passage[start:end],
                score=pred.score,
                doc_id=doc_id,
                chunk_index=chunk.chunk_index,
                passage_char_start=start,
                passage_char_end=end,
                attributions=pred.attributions,
            )
            existing = best.get((start, end))
            if existing is None or span.score > existing.score:
                best[(start, end)] = span
    merged = sorted(
        best.values(),
        key=lambda s: (-s.score, s.passage_char_start, s.chunk_index),
    )
    return merged[:top_k]


class LexicalReaderBackend(ReaderBackend):
    """Deterministic IDF-overlap span scorer; no model required.

    Candidate spans are token windows of at most ``max_span_tokens`` that
    start and end on a question term. A window's score is the summed IDF
    of the distinct question content terms it covers, divided by the
    question's total IDF mass, so it lives in [0, 1] and hits 1.0 exactly
    when the window covers every content term. Spans scoring below
    ``score_floor`` are dropped. IDF comes from the attached index when
    given (unseen terms get the df=0 value), else uniform 1.0.

    Attributions are per-token IDF contributions, max-normalized.
    """

    def __init__(
        self,
        index: Index | None = None,
        max_tokens: int = DEFAULT_MAX_TOKENS,
        max_span_tokens: int = 15,
        score_floor: float = 0.05,
        max_spans_per_chunk: int = 5,
        analyzer: Analyzer | None = None,
    ):
        self.index = index
        self.max_tokens = max_tokens
        self.max_span_tokens = max_span_tokens
        self.score_floor = score_floor
        self.max_spans_per_chunk = max_spans_per_chunk
        self.analyzer = analyzer or Analyzer()

    def _idf(self, term: str) -> float:
        if self.index is None:
            return 1.0
        stats = self.index.stats
        df = self.index.doc_frequency(term)
        return log(1 + (stats.doc_count - df + 0.5) / (df + 0.5))

    def _question_weights(self, question: str) -> dict[str, float]:
        weights = {}
        for tok in self.analyzer.tokenize(question):
            if tok.pos is PosTag.PUNCT or tok.text in self.analyzer.stopwords:
                continue
            weights.setdefault(tok.text, self._idf(tok.text))
        return weights

    def read(self, question: str, chunk_text: str) -> list[SpanPrediction]:
        weights = self._question_weights(question)
        total = sum(weights.values())
        if total <= 0:
            return []
        tokens = self.analyzer.tokenize(chunk_text)
        matched = [i for i, t in enumerate(tokens) if t.text in weights]
        if not matched:
            return []

        candidates = []
        for a, i in enumerate(matched):
            for j in matched[a:]:
                if j - i + 1 > self.max_span_tokens:
                    break
                covered = {
                    tokens[p].text
                    for p in range(i, j + 1)
                    if tokens[p].text in weights
                }
                score = sum(weights[t] for t in covered) / total
                if score >= self.score_floor:
                    candidates.append((score, i, j))
        # best first; ties prefer earlier, then tighter, windows
        candidates.sort(key=lambda c: (-c[0], c[1], c[2] - c[1]))

        spans: list[SpanPrediction] = []
        taken: list[tuple[int, int]] = []
        for score, i, j in candidates:
            if len(spans) >= self.max_spans_per_chunk:
                break
            if any(i <= tj and ti <= j for ti, tj in taken):
                continue
            taken.append((i, j))
            span_tokens = tokens[i : j + 1]
            contributions = [weights.get(t.text, 0.0) for t in span_tokens]
            top = max(contributions)
            attributions = tuple(
                TokenAttribution(token=t.raw, weight=c / top if top > 0 else 0.0)
                for t, c in zip(span_tokens, contributions)
            )
            spans.append(
                SpanPrediction(
                    text=chunk_text[span_tokens[0].char_start : span_tokens[-1].char_end],
                    start=span_tokens[0].char_start,
                    end=span_tokens[-1].char_end,
                    score=score,
                    attributions=attributions,
                )
            )
        return spans


class RemoteReaderBackend(ReaderBackend):
    """Client for a remote span-prediction HTTP endpoint.

    Wire protocol: POST {"question": str, "context": str, "top_k": int}
    returning {"answers": [{"text", "start", "end", "score",
    "attributions": [{"token", "weight"}]?}, ...]}. Missing attributions
    become empty; scores are clamped into [0, 1]. Network and protocol
    failures raise BackendUnavailable.
    """

    def __init__(
        self,
        endpoint: str,
        timeout_ms: int = 4000,
        max_tokens: int = DEFAULT_MAX_TOKENS,
        request_top_k: int = 5,
        max_in_flight: int = 4,
    ):
        self.endpoint = endpoint
        self.max_tokens = max_tokens
        self.request_top_k = request_top_k
        self._limiter = threading.BoundedSemaphore(max_in_flight)
        self._client = httpx.Client(timeout=timeout_ms / 1000.0)

    def read(self, question: str, chunk_text: str) -> list[SpanPrediction]:
        try:
            with self._limiter:
                response = self._client.post(
                    self.endpoint,
                    json={
                        "question": question,
                        "context": chunk_text,
                        "top_k": self.request_top_k,
                    },
                )
            response.raise_for_status()
            answers = response.json()["answers"]
            spans = []
            for item in answers:
                start = int(item["start"])
                end = int(item["end"])
                if not (0 <= start <= end <= len(chunk_text)):
                    raise ValueError(f"span offsets {start}..{end} out of bounds")
                attributions = tuple(
                    TokenAttribution(
                        token=str(a["token"]),
                        weight=min(1.0, max(0.0, float(a["weight"]))),
                    )
                    for a in item.get("attributions") or ()
                )
                spans.append(
                    SpanPrediction(
                        text=str(item.get("text", chunk_text[start:end])),
                        start=start,
                        end=end,
                        score=min(1.0, max(0.0, float(item["score"]))),
                        attributions=attributions,
                    )
                )
            return spans
        except (httpx.HTTPError, KeyError, TypeError, ValueError) as exc:
            raise BackendUnavailable(f"{self.endpoint}: {exc}") from exc

    def close(self) -> None:
        self._client.close()
