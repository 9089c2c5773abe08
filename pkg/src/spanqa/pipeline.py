"""End-to-end query pipeline: expand, retrieve, condense, read.

QaPipeline owns the wiring between the index, the mask-fill provider, and
the reader backend, resolves per-request overrides without ever mutating
the server configuration, and reports per-stage timings. Remote provider
or backend failures degrade to warnings; retrieval results always come
back when an index is loaded.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .analysis import Analyzer
from .config import PipelineConfig
from .errors import BackendUnavailable
from .expander import (
    CooccurrenceProvider,
    ExpandedQuery,
    ExpanderParams,
    MaskFillProvider,
    RemoteMaskFillProvider,
    expand_query,
)
from .index import Index
from .reader import (
    AnswerSpan,
    LexicalReaderBackend,
    ReaderBackend,
    RemoteReaderBackend,
    num_chunks,
    read_passage,
)
from .relsnip import RelSnipParams, condense, fragment, match_offsets, score_fragments

CONTEXT_DOC_ID = "context"


@dataclass(frozen=True)
class RequestOverrides:
    """Per-request parameter overrides; None means "use the config value"."""

    max_documents: int | None = None
    relsnip_enabled: bool | None = None
    k_frag: int | None = None
    n: int | None = None
    expansion_enabled: bool | None = None
    k_thresh: float | None = None
    top_n: int | None = None
    stride: int | None = None
    top_k: int | None = None


@dataclass(frozen=True)
class HighlightFragment:
    text: str
    char_start: int
    char_end: int
    score: float
    matches: tuple[tuple[int, int], ...]  # char offsets within text


@dataclass(frozen=True)
class DocumentResult:
    doc_id: str
    title: str
    score: float
    rank: int
    highlights: tuple[HighlightFragment, ...]


@dataclass(frozen=True)
class RankedAnswer:
    answer: AnswerSpan
    retrieval_rank: int | None  # None in closed-domain mode


@dataclass
class QueryResult:
    answers: list[RankedAnswer] = field(default_factory=list)
    documents: list[DocumentResult] = field(default_factory=list)
    expansion: ExpandedQuery | None = None
    timings: dict[str, float] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)
    chunks_read: int = 0


class QaPipeline:
    """Configured pipeline over an optional index.

    The index, provider, and backend are immutable while serving; request
    overrides are resolved into fresh parameter objects per call.
    """

    def __init__(
        self,
        config: PipelineConfig,
        index: Index | None = None,
        analyzer: Analyzer | None = None,
        provider: MaskFillProvider | None = None,
        backend: ReaderBackend | None = None,
    ):
        self.config = config
        self.index = index
        self.analyzer = analyzer or (index.analyzer if index else Analyzer())
        self.provider = provider if provider is not None else self._build_provider()
        self.backend = backend if backend is not None else self._build_backend()

    def _build_provider(self) -> MaskFillProvider | None:
        provider_config = self.config.expander.provider
        if provider_config.kind == "remote":
            return RemoteMaskFillProvider(
                endpoint=provider_config.endpoint or "",
                timeout_ms=provider_config.timeout_ms,
            )
        if self.index is None:
            return None
        return CooccurrenceProvider(analyzer=self.analyzer).train(
            self.index.documents
        )

    def _build_backend(self) -> ReaderBackend:
        backend_config = self.config.reader.backend
        if backend_config.kind == "remote":
            return RemoteReaderBackend(
                endpoint=backend_config.endpoint or "",
                timeout_ms=backend_config.timeout_ms,
                max_tokens=self.config.reader.max_tokens,
                request_top_k=self.config.reader.top_k,
            )
        return LexicalReaderBackend(
            index=self.index,
            max_tokens=self.config.reader.max_tokens,
            analyzer=self.analyzer,
        )

    def expand(
        self, question: str, overrides: RequestOverrides | None = None
    ) -> ExpandedQuery:
        """Run only the expansion stage with resolved parameters."""
        ov = overrides or RequestOverrides()
        params = ExpanderParams(
            k_thresh=(
                ov.k_thresh if ov.k_thresh is not None else self.config.expander.k_thresh
            ),
            top_n=ov.top_n if ov.top_n is not None else self.config.expander.top_n,
            enabled=(
                ov.expansion_enabled
                if ov.expansion_enabled is not None
                else self.config.expander.enabled
            ),
        )
        return expand_query(question, self.provider, params, self.analyzer)

    def answer(
        self,
        question: str,
        context: str | None = None,
        overrides: RequestOverrides | None = None,
        read: bool = True,
    ) -> QueryResult:
        """Run the full pipeline for one question.

        With ``context`` given, retrieval and condensation are skipped and
        the reader runs directly on the provided passage (closed-domain
        mode). Otherwise the question is expanded (when enabled), the top
        documents retrieved, each one condensed (when enabled), and every
        passage read for answer spans. ``read=False`` stops after the
        condense stage (used by the documents endpoint).
        """
        ov = overrides or RequestOverrides()
        cfg = self.config
        relsnip_params = RelSnipParams(
            k_frag=ov.k_frag if ov.k_frag is not None else cfg.retriever.relsnip.k_frag,
            n=ov.n if ov.n is not None else cfg.retriever.relsnip.n,
            enabled=(
                ov.relsnip_enabled
                if ov.relsnip_enabled is not None
                else cfg.retriever.relsnip.enabled
            ),
        )
        expander_params = ExpanderParams(
            k_thresh=ov.k_thresh if ov.k_thresh is not None else cfg.expander.k_thresh,
            top_n=ov.top_n if ov.top_n is not None else cfg.expander.top_n,
            enabled=(
                ov.expansion_enabled
                if ov.expansion_enabled is not None
                else cfg.expander.enabled
            ),
        )
        max_documents = (
            ov.max_documents
            if ov.max_documents is not None
            else cfg.retriever.max_documents
        )
        stride = ov.stride if ov.stride is not None else cfg.reader.stride
        top_k = ov.top_k if ov.top_k is not None else cfg.reader.top_k

        result = QueryResult()
        started = time.perf_counter()

        # expand
        t0 = time.perf_counter()
        if expander_params.enabled and self.provider is None:
            result.warnings.append(
                "expander unavailable: no index loaded for the native provider"
            )
        expansion = expand_query(
            question, self.provider, expander_params, self.analyzer
        )
        result.expansion = expansion
        result.warnings.extend(expansion.warnings)
        result.timings["expand_ms"] = (time.perf_counter() - t0) * 1000

        effective_terms = expansion.effective_terms
        term_weights = None
        if cfg.expander.term_weight != 1.0 and expansion.terms:
            term_weights = {
                t.token: cfg.expander.term_weight for t in expansion.terms
            }

        if context is not None:
            result.timings["retrieve_ms"] = 0.0
            result.timings["condense_ms"] = 0.0
            if read:
                self._read_into(
                    result, question, context, CONTEXT_DOC_ID, None, stride, top_k
                )
            result.timings["total_ms"] = (time.perf_counter() - started) * 1000
            return result

        if self.index is None:
            result.warnings.append("no index loaded and no context provided")
            result.timings["retrieve_ms"] = 0.0
            result.timings["condense_ms"] = 0.0
            result.timings["read_ms"] = 0.0
            result.timings["total_ms"] = (time.perf_counter() - started) * 1000
            return result

        # retrieve
        t0 = time.perf_counter()
        hits = self.index.search(effective_terms, k=max_documents, weights=term_weights)
        result.timings["retrieve_ms"] = (time.perf_counter() - t0) * 1000

        # condense (also produces the per-document highlight fragments)
        t0 = time.perf_counter()
        highlight_terms = {
            t for t in effective_terms if t not in self.analyzer.stopwords
        }
        passages: list[tuple[str, str, int]] = []  # (doc_id, text, rank)
        for hit in hits:
            doc = self.index.get(hit.doc_id)
            if relsnip_params.enabled:
                condensed = condense(
                    doc,
                    effective_terms,
                    relsnip_params,
                    self.analyzer,
                    k1=cfg.retriever.k1,
                    b=cfg.retriever.b,
                )
                passage_text = condensed.text
                top_fragments = condensed.fragments_used
            else:
                passage_text = doc.body
                scored = score_fragments(
                    effective_terms,
                    fragment(doc, relsnip_params.k_frag, self.analyzer),
                    k1=cfg.retriever.k1,
                    b=cfg.retriever.b,
                )
                by_score = sorted(scored, key=lambda f: (-f.score, f.frag_index))
                top_fragments = tuple(
                    sorted(by_score[: relsnip_params.n], key=lambda f: f.frag_index)
                )
            highlights = tuple(
                HighlightFragment(
                    text=f.text,
                    char_start=f.char_start,
                    char_end=f.char_end,
                    score=f.score,
                    matches=tuple(match_offsets(f, highlight_terms, self.analyzer)),
                )
                for f in top_fragments
            )
            result.documents.append(
                DocumentResult(
                    doc_id=doc.doc_id,
                    title=doc.title,
                    score=hit.score,
                    rank=hit.rank,
                    highlights=highlights,
                )
            )
            passages.append((doc.doc_id, passage_text, hit.rank))
        result.timings["condense_ms"] = (time.perf_counter() - t0) * 1000

        # read
        if not read:
            result.timings["read_ms"] = 0.0
            result.timings["total_ms"] = (time.perf_counter() - started) * 1000
            return result
        for doc_id, passage_text, rank in passages:
            if not self._read_into(
                result, question, passage_text, doc_id, rank, stride, top_k
            ):
                break  # backend down; one warning is enough
        result.answers.sort(
            key=lambda r: (
                -r.answer.score,
                r.retrieval_rank if r.retrieval_rank is not None else 0,
                r.answer.passage_char_start,
                r.answer.chunk_index,
            )
        )
        del result.answers[top_k:]
        result.timings["total_ms"] = (time.perf_counter() - started) * 1000
        return result

    def _read_into(
        self,
        result: QueryResult,
        question: str,
        passage: str,
        doc_id: str,
        rank: int | None,
        stride: int,
        top_k: int,
    ) -> bool:
        """Read one passage, appending answers and timing. Returns False
        when the backend is unavailable."""
        t0 = time.perf_counter()
        try:
            spans = read_passage(
                question,
                passage,
                self.backend,
                top_k=top_k,
                stride=stride,
                doc_id=doc_id,
                analyzer=self.analyzer,
            )
            result.chunks_read += num_chunks(
                len(self.analyzer.tokenize(passage)), self.backend.max_tokens, stride
            )
            result.answers.extend(
                RankedAnswer(answer=span, retrieval_rank=rank) for span in spans
            )
            return True
        except BackendUnavailable as exc:
            result.warnings.append(f"reader unavailable: {exc}")
            return False
        finally:
            result.timings["read_ms"] = (
                result.timings.get("read_ms", 0.0) + (time.perf_counter() - t0) * 1000
            )
