"""Extractive question answering over a document corpus.

BM25 retrieval, relevance-snippet condensation, masked-token query
expansion, chunked span reading, a REST service, and an eval harness.
"""

from .analysis import Analyzer, PosTag, Token, is_expansion_candidate
from .config import PipelineConfig, load_config, load_or_create_config
from .expander import (
    CooccurrenceProvider,
    ExpandedQuery,
    ExpanderParams,
    ExpansionTerm,
    MaskFillProvider,
    RemoteMaskFillProvider,
    expand_query,
    select_candidates,
)
from .index import Document, Index, IndexStats, RetrievedHit, ingest, read_corpus
from .pipeline import QaPipeline, QueryResult, RequestOverrides
from .reader import (
    AnswerSpan,
    Chunk,
    LexicalReaderBackend,
    ReaderBackend,
    RemoteReaderBackend,
    TokenAttribution,
    chunk_tokens,
    num_chunks,
    read_passage,
)
from .relsnip import (
    CondensedPassage,
    Fragment,
    RelSnipParams,
    condense,
    fragment,
    score_fragments,
)
from .service import create_app

__version__ = "0.1.0"

__all__ = [
    "Analyzer",
    "AnswerSpan",
    "Chunk",
    "CondensedPassage",
    "CooccurrenceProvider",
    "Document",
    "ExpandedQuery",
    "ExpanderParams",
    "ExpansionTerm",
    "Fragment",
    "Index",
    "IndexStats",
    "LexicalReaderBackend",
    "MaskFillProvider",
    "PipelineConfig",
    "PosTag",
    "QaPipeline",
    "QueryResult",
    "ReaderBackend",
    "RelSnipParams",
    "RemoteMaskFillProvider",
    "RemoteReaderBackend",
    "RequestOverrides",
    "RetrievedHit",
    "Token",
    "TokenAttribution",
    "chunk_tokens",
    "condense",
    "create_app",
    "expand_query",
    "fragment",
    "ingest",
    "is_expansion_candidate",
    "load_config",
    "load_or_create_config",
    "num_chunks",
    "read_corpus",
    "read_passage",
    "score_fragments",
    "select_candidates",
    "__version__",
]
