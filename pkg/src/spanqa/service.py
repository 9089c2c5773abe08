"""REST service exposing the pipeline.

Endpoints (JSON over HTTP, documented in the README):

    POST /api/answers    full pipeline: expand, retrieve, condense, read
    POST /api/documents  retrieval plus highlight fragments only
    POST /api/expand     expansion stage only
    POST /api/explain    attributions for a (question, passage) pair
    GET  /api/config     the loaded configuration, read only

Remote provider or backend outages surface as warnings in otherwise
successful responses, never as 500s. Per-request overrides are resolved
into fresh parameter objects, so the served configuration is immutable.
"""

from __future__ import annotations

import logging
from pathlib import Path

import httpx
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import FileResponse, JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, ConfigDict, Field

from .config import PipelineConfig
from .errors import BackendUnavailable
from .expander import ExpandedQuery
from .index import Index
from .pipeline import QaPipeline, QueryResult, RankedAnswer, RequestOverrides
from .reader import read_passage

logger = logging.getLogger(__name__)


class RelSnipOverride(BaseModel):
    model_config = ConfigDict(extra="forbid")
    enabled: bool | None = None
    k_frag: int | None = Field(default=None, ge=1)
    n: int | None = Field(default=None, ge=1)


class ExpansionOverride(BaseModel):
    model_config = ConfigDict(extra="forbid")
    enabled: bool | None = None
    k_thresh: float | None = Field(default=None, ge=0.0, le=1.0)
    top_n: int | None = Field(default=None, ge=1)


class ReaderOverride(BaseModel):
    model_config = ConfigDict(extra="forbid")
    stride: int | None = Field(default=None, ge=1)
    top_k: int | None = Field(default=None, ge=1)


class QueryRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    question: str
    context: str | None = None
    max_documents: int | None = Field(default=None, ge=1)
    relsnip: RelSnipOverride | None = None
    expansion: ExpansionOverride | None = None
    reader: ReaderOverride | None = None

    def to_overrides(self) -> RequestOverrides:
        return RequestOverrides(
            max_documents=self.max_documents,
            relsnip_enabled=self.relsnip.enabled if self.relsnip else None,
            k_frag=self.relsnip.k_frag if self.relsnip else None,
            n=self.relsnip.n if self.relsnip else None,
            expansion_enabled=self.expansion.enabled if self.expansion else None,
            k_thresh=self.expansion.k_thresh if self.expansion else None,
            top_n=self.expansion.top_n if self.expansion else None,
            stride=self.reader.stride if self.reader else None,
            top_k=self.reader.top_k if self.reader else None,
        )


class ExplainRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    question: str
    passage: str
    span_text: str | None = None


def _answer_payload(ranked: RankedAnswer) -> dict:
    span = ranked.answer
    return {
        "text": span.text,
        "score": span.score,
        "doc_id": span.doc_id,
        "chunk_index": span.chunk_index,
        "passage_char_start": span.passage_char_start,
        "passage_char_end": span.passage_char_end,
        "retrieval_rank": ranked.retrieval_rank,
        "attributions": [
            {"token": a.token, "weight": a.weight} for a in span.attributions
        ],
    }


def _expansion_payload(expansion: ExpandedQuery | None, enabled: bool) -> dict:
    if expansion is None:
        return {"enabled": enabled, "candidates": [], "terms": [], "effective_terms": []}
    return {
        "enabled": enabled,
        "candidates": [t.text for t in expansion.candidates],
        "terms": [
            {
                "token": t.token,
                "source_token": t.source_token,
                "confidence": t.confidence,
            }
            for t in expansion.terms
        ],
        "effective_terms": expansion.effective_terms,
    }


def _result_payload(result: QueryResult, expansion_enabled: bool) -> dict:
    return {
        "answers": [_answer_payload(r) for r in result.answers],
        "documents": [
            {
                "doc_id": d.doc_id,
                "title": d.title,
                "score": d.score,
                "rank": d.rank,
                "highlights": [
                    {
                        "text": h.text,
                        "char_start": h.char_start,
                        "char_end": h.char_end,
                        "score": h.score,
                        "matches": [list(m) for m in h.matches],
                    }
                    for h in d.highlights
                ],
            }
            for d in result.documents
        ],
        "expansion": _expansion_payload(result.expansion, expansion_enabled),
        "timings": result.timings,
        "warnings": result.warnings,
    }


def probe_remote_endpoints(config: PipelineConfig) -> list[str]:
    """Check configured remote endpoints once at startup; failures are
    reported (and logged), not fatal."""
    warnings = []
    targets = []
    if config.expander.provider.kind == "remote":
        targets.append(("expander provider", config.expander.provider.endpoint))
    if config.reader.backend.kind == "remote":
        targets.append(("reader backend", config.reader.backend.endpoint))
    for label, endpoint in targets:
        try:
            httpx.get(endpoint, timeout=2.0)
        except httpx.HTTPError as exc:
            message = f"{label} endpoint {endpoint} unreachable at startup: {exc}"
            logger.warning(message)
            warnings.append(message)
    return warnings


def create_app(
    config: PipelineConfig,
    index: Index | None = None,
    ui_dir: str | Path | None = None,
    probe: bool = False,
) -> FastAPI:
    """Assemble the service around a loaded index (or none, for
    closed-domain-only use)."""
    pipeline = QaPipeline(config, index=index)
    app = FastAPI(title=config.ui.title, description=config.ui.description)
    app.state.pipeline = pipeline
    app.state.config = config
    if probe:
        app.state.startup_warnings = probe_remote_endpoints(config)

    @app.exception_handler(RequestValidationError)
    async def malformed_request(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": exc.errors()})

    @app.post("/api/answers")
    def answers(request: QueryRequest):
        if pipeline.index is None and request.context is None:
            return JSONResponse(
                status_code=503,
                content={
                    "warnings": ["no index loaded and no context provided"],
                    "detail": "nothing to search: load an index or pass a context",
                },
            )
        result = pipeline.answer(
            request.question,
            context=request.context,
            overrides=request.to_overrides(),
        )
        enabled = (
            request.expansion.enabled
            if request.expansion and request.expansion.enabled is not None
            else config.expander.enabled
        )
        return _result_payload(result, enabled)

    @app.post("/api/documents")
    def documents(request: QueryRequest):
        if pipeline.index is None:
            return JSONResponse(
                status_code=503,
                content={"warnings": ["no index loaded"], "detail": "no index loaded"},
            )
        result = pipeline.answer(
            request.question, overrides=request.to_overrides(), read=False
        )
        enabled = (
            request.expansion.enabled
            if request.expansion and request.expansion.enabled is not None
            else config.expander.enabled
        )
        payload = _result_payload(result, enabled)
        del payload["answers"]
        return payload

    @app.post("/api/expand")
    def expand(request: QueryRequest):
        expansion = pipeline.expand(request.question, request.to_overrides())
        enabled = (
            request.expansion.enabled
            if request.expansion and request.expansion.enabled is not None
            else config.expander.enabled
        )
        return {
            "expansion": _expansion_payload(expansion, enabled),
            "warnings": list(expansion.warnings),
        }

    @app.post("/api/explain")
    def explain(request: ExplainRequest):
        try:
            spans = read_passage(
                request.question,
                request.passage,
                pipeline.backend,
                top_k=10,
                stride=config.reader.stride,
                analyzer=pipeline.analyzer,
            )
        except BackendUnavailable as exc:
            return {"span": None, "warnings": [f"reader unavailable: {exc}"]}
        if request.span_text:
            spans = [s for s in spans if s.text == request.span_text] or spans
        if not spans:
            return {"span": None, "warnings": []}
        top = spans[0]
        return {
            "span": {
                "text": top.text,
                "score": top.score,
                "passage_char_start": top.passage_char_start,
                "passage_char_end": top.passage_char_end,
                "attributions": [
                    {"token": a.token, "weight": a.weight} for a in top.attributions
                ],
            },
            "warnings": [],
        }

    @app.get("/api/config")
    def get_config():
        return config.to_dict()

    ui_path = _resolve_ui_dir(ui_dir)
    if ui_path is not None:
        static = ui_path / "static"
        dist = ui_path / "dist"
        if dist.is_dir():
            app.mount("/dist", StaticFiles(directory=dist), name="dist")
        if static.is_dir():

            @app.get("/", include_in_schema=False)
            def ui_index():
                return FileResponse(static / "index.html")

            app.mount("/", StaticFiles(directory=static), name="static")
    else:

        @app.get("/", include_in_schema=False)
        def root():
            return {
                "service": config.ui.title,
                "endpoints": [
                    "/api/answers",
                    "/api/documents",
                    "/api/expand",
                    "/api/explain",
                    "/api/config",
                ],
            }

    return app


def _resolve_ui_dir(ui_dir: str | Path | None) -> Path | None:
    if ui_dir is not None:
        path = Path(ui_dir)
        return path if path.is_dir() else None
    for candidate in (Path.cwd() / "frontend", Path(__file__).parent / "frontend"):
        if (candidate / "static").is_dir():
            return candidate
    return None
