"""Query expansion via masked-token prediction.

Noun and adjective query tokens are masked one at a time; a mask-fill
provider proposes contextually likely replacements with confidences; and
the survivors of a confidence threshold plus cleanup (no stopwords, no
punctuation, no duplicates, nothing already in the query) are appended to
the query as extra retrieval terms. The original query tokens are never
touched, so expansion can only widen recall, not rewrite intent.

Two providers ship: a corpus-trained co-occurrence model that needs no
external services, and a client for a remote fill-mask HTTP endpoint.
Provider failures degrade to an unexpanded query with a warning; a search
service must keep answering when the expansion sidecar is down.
"""

from __future__ import annotations

import logging
import threading
from abc import ABC, abstractmethod
from collections import Counter
from dataclasses import dataclass
from math import log
from typing import Iterable, Sequence

import httpx

from .analysis import Analyzer, PosTag, Token, is_expansion_candidate, normalize
from .errors import ProviderUnavailable, UntrainedProvider
from .index import Document

logger = logging.getLogger(__name__)

MASK_TOKEN = "[MASK]"


@dataclass(frozen=True)
class ExpanderParams:
    k_thresh: float = 0.5  # minimum prediction confidence
    top_n: int = 5  # predictions requested per masked token
    enabled: bool = True


@dataclass(frozen=True)
class ExpansionTerm:
    token: str
    source_token: str  # the query token that was masked
    confidence: float


@dataclass(frozen=True)
class ExpandedQuery:
    original_tokens: tuple[Token, ...]
    candidates: tuple[Token, ...]
    terms: tuple[ExpansionTerm, ...]
    warnings: tuple[str, ...] = ()

    @property
    def effective_terms(self) -> list[str]:
        """Original term multiset plus accepted expansion tokens."""
        return [t.text for t in self.original_tokens] + [t.token for t in self.terms]


class MaskFillProvider(ABC):
    """Predicts fillers for one masked position of a token sequence.

    Implementations return at most ``top_n`` (token, confidence) pairs,
    sorted by confidence descending, confidences within [0, 1].
    """

    @abstractmethod
    def fill(
        self, tokens: Sequence[str], mask_index: int, top_n: int
    ) -> list[tuple[str, float]]:
        raise NotImplementedError


def select_candidates(query_tokens: Sequence[Token]) -> list[Token]:
    """Tokens eligible for masking: nouns and adjectives, in query order."""
    return [t for t in query_tokens if is_expansion_candidate(t)]


def expand_query(
    query: str,
    provider: MaskFillProvider | None,
    params: ExpanderParams,
    analyzer: Analyzer | None = None,
) -> ExpandedQuery:
    """Mask each candidate token of ``query`` once and collect predictions.

    Predictions below ``params.k_thresh`` are dropped; the rest are
    normalized and cleaned (first occurrence wins on duplicates). Every
    mask uses the original query, not a progressively expanded one. When
    the provider is unavailable the result carries a warning and no terms.
    """
    analyzer = analyzer or Analyzer()
    tokens = tuple(analyzer.tokenize(query))
    candidates = tuple(select_candidates(tokens))
    if not params.enabled or provider is None or not candidates:
        return ExpandedQuery(tokens, candidates, terms=())

    token_texts = [t.text for t in tokens]
    original = set(token_texts)
    accepted: dict[str, ExpansionTerm] = {}
    try:
        for candidate in candidates:
            mask_index = next(
                i for i, t in enumerate(tokens) if t is candidate
            )
            for predicted, confidence in provider.fill(
                token_texts, mask_index, params.top_n
            ):
                if confidence < params.k_thresh:
                    continue
                term = normalize(predicted).strip()
                if not any(ch.isalnum() for ch in term):
                    continue  # punctuation or empty
                if term in analyzer.stopwords:
                    continue
                if term in original or term in accepted:
                    continue
                accepted[term] = ExpansionTerm(
                    token=term, source_token=candidate.text, confidence=confidence
                )
    except ProviderUnavailable as exc:
        return ExpandedQuery(
            tokens, candidates, terms=(), warnings=(f"expander unavailable: {exc}",)
        )
    return ExpandedQuery(tokens, candidates, terms=tuple(accepted.values()))


class CooccurrenceProvider(MaskFillProvider):
    """Mask filler backed by windowed co-occurrence counts over a corpus.

    A desk-scale stand-in for a corpus-tuned masked language model: terms
    that habitually appear near the unmasked context tokens rank first.
    Scores are evidence-weighted PMI,
    sum over context tokens t of count(c,t) * log(1 + count(c,t) * T / (n(c) * n(t))),
    so a partner seen alongside the context in every document outranks a
    one-off neighbor with the same lift. Confidences are min-max normalized
    to [0, 1] within the returned list (a degenerate all-equal list
    normalizes to 1.0). Deterministic for a fixed corpus; ties break
    alphabetically.
    """

    def __init__(self, window: int = 5, analyzer: Analyzer | None = None):
        self.window = window
        self.analyzer = analyzer or Analyzer()
        self._occurrences: Counter[str] | None = None
        self._neighbors: dict[str, Counter[str]] | None = None
        self._total = 0

    def train(self, corpus: Iterable[Document]) -> "CooccurrenceProvider":
        """Count windowed co-occurrences over content tokens (stopwords and
        punctuation excluded) of every document's title and body."""
        occurrences: Counter[str] = Counter()
        neighbors: dict[str, Counter[str]] = {}
        for doc in corpus:
            stream = [
                t.text
                for field in (doc.title, doc.body)
                for t in self.analyzer.tokenize(field)
                if t.pos is not PosTag.PUNCT and t.text not in self.analyzer.stopwords
            ]
            occurrences.update(stream)
            for i, left in enumerate(stream):
                for j in range(i + 1, min(i + 1 + self.window, len(stream))):
                    right = stream[j]
                    if left != right:
                        neighbors.setdefault(left, Counter())[right] += 1
                        neighbors.setdefault(right, Counter())[left] += 1
        self._occurrences = occurrences
        self._neighbors = neighbors
        self._total = sum(occurrences.values())
        return self

    def fill(
        self, tokens: Sequence[str], mask_index: int, top_n: int
    ) -> list[tuple[str, float]]:
        if self._occurrences is None or self._neighbors is None:
            raise UntrainedProvider("call train() before fill()")
        context = [
            normalize(t)
            for i, t in enumerate(tokens)
            if i != mask_index
            and any(ch.isalnum() for ch in t)
            and normalize(t) not in self.analyzer.stopwords
        ]
        context = list(dict.fromkeys(c for c in context if c in self._occurrences))
        if not context:
            return []
        scores: dict[str, float] = {}
        for ctx in context:
            n_ctx = self._occurrences[ctx]
            for partner, count in self._neighbors.get(ctx, {}).items():
                if partner in context:
                    continue  # already in the query's context
                lift = count * self._total / (self._occurrences[partner] * n_ctx)
                scores[partner] = scores.get(partner, 0.0) + count * log(1 + lift)
        ranked = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))[:top_n]
        if not ranked:
            return []
        high = ranked[0][1]
        low = ranked[-1][1]
        if high == low:
            return [(term, 1.0) for term, _ in ranked]
        return [(term, (s - low) / (high - low)) for term, s in ranked]


class RemoteMaskFillProvider(MaskFillProvider):
    """Client for a fill-mask HTTP endpoint.

    Wire protocol: POST {"text": "... [MASK] ...", "top_n": int} returning
    {"predictions": [{"token": str, "score": number}, ...]}. Out-of-range
    scores are clamped to [0, 1] with a logged warning. In-flight requests
    are bounded so the provider can be shared across concurrent queries.
    """

    def __init__(
        self,
        endpoint: str,
        timeout_ms: int = 2000,
        max_in_flight: int = 4,
        mask_token: str = MASK_TOKEN,
    ):
        self.endpoint = endpoint
        self.mask_token = mask_token
        self._limiter = threading.BoundedSemaphore(max_in_flight)
        self._client = httpx.Client(timeout=timeout_ms / 1000.0)

    def fill(
        self, tokens: Sequence[str], mask_index: int, top_n: int
    ) -> list[tuple[str, float]]:
        masked = " ".join(
            self.mask_token if i == mask_index else t for i, t in enumerate(tokens)
        )
        try:
            with self._limiter:
                response = self._client.post(
                    self.endpoint, json={"text": masked, "top_n": top_n}
                )
            response.raise_for_status()
            predictions = response.json()["predictions"]
            out = []
            for item in predictions:
                token = str(item["token"])
                score = float(item["score"])
                if score < 0.0 or score > 1.0:
                    logger.warning(
                        "fill-mask score %s for %r out of range, clamping", score, token
                    )
                    score = min(1.0, max(0.0, score))
                out.append((token, score))
        except (httpx.HTTPError, KeyError, TypeError, ValueError) as exc:
            raise ProviderUnavailable(f"{self.endpoint}: {exc}") from exc
        out.sort(key=lambda pair: -pair[1])
        return out[:top_n]

    def close(self) -> None:
        self._client.close()
