"""YAML-backed pipeline configuration.

One file configures every stage. Unknown keys are rejected by name,
omitted keys take the documented defaults, and out-of-range values raise
ConfigInvalid naming the offending field. When no file is found, the
documented default file is written to the current directory so users can
start from a working template.
"""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import yaml

from .errors import ConfigInvalid, IoFailure

CONFIG_ENV_VAR = "QA_CONFIG"
DEFAULT_CONFIG_FILENAME = "config.yaml"
CONFIG_VERSION = 1

KNOWN_VIEWS = ("documents", "answers", "expansion", "explanations")

DEFAULT_CONFIG_YAML = """\
# Pipeline configuration. Every key is optional; the values below are the
# documented defaults. Unknown keys are rejected.
version: 1

ui:
  title: Corpus Question Answering
  description: Ask questions over an indexed document corpus.
  views_visible: [documents, answers, expansion, explanations]

retriever:
  index_path: index.bin      # built with `spanqa index`
  k1: 1.2                    # BM25 term-frequency saturation, >= 0
  b: 0.75                    # BM25 length normalization, in [0, 1]
  max_documents: 5           # hits retrieved per query
  relsnip:
    enabled: true            # condense long documents before reading
    k_frag: 100              # tokens per fragment
    n: 4                     # fragments kept

expander:
  enabled: false             # query expansion off by default
  k_thresh: 0.5              # minimum prediction confidence, in [0, 1]
  top_n: 5                   # predictions requested per masked token
  term_weight: 1.0           # BM25 weight multiplier for expansion terms
  provider:
    kind: native             # native (corpus co-occurrence) or remote
    endpoint: null           # required when kind is remote
    timeout_ms: 2000

reader:
  backend:
    kind: lexical            # lexical (in-process baseline) or remote
    endpoint: null           # required when kind is remote
    timeout_ms: 4000
  max_tokens: 512            # backend input limit, tokens
  stride: 384                # chunk step, 1..max_tokens
  top_k: 5                   # answers returned
"""


@dataclass(frozen=True)
class UiConfig:
    title: str = "Corpus Question Answering"
    description: str = "Ask questions over an indexed document corpus."
    views_visible: tuple[str, ...] = KNOWN_VIEWS


@dataclass(frozen=True)
class RelSnipConfig:
    enabled: bool = True
    k_frag: int = 100
    n: int = 4


@dataclass(frozen=True)
class RetrieverConfig:
    index_path: str = "index.bin"
    k1: float = 1.2
    b: float = 0.75
    max_documents: int = 5
    relsnip: RelSnipConfig = field(default_factory=RelSnipConfig)


@dataclass(frozen=True)
class ProviderConfig:
    kind: str = "native"
    endpoint: str | None = None
    timeout_ms: int = 2000


@dataclass(frozen=True)
class ExpanderConfig:
    enabled: bool = False
    k_thresh: float = 0.5
    top_n: int = 5
    term_weight: float = 1.0
    provider: ProviderConfig = field(default_factory=ProviderConfig)


@dataclass(frozen=True)
class BackendConfig:
    kind: str = "lexical"
    endpoint: str | None = None
    timeout_ms: int = 4000


@dataclass(frozen=True)
class ReaderConfig:
    backend: BackendConfig = field(default_factory=BackendConfig)
    max_tokens: int = 512
    stride: int = 384
    top_k: int = 5


@dataclass(frozen=True)
class PipelineConfig:
    version: int = CONFIG_VERSION
    ui: UiConfig = field(default_factory=UiConfig)
    retriever: RetrieverConfig = field(default_factory=RetrieverConfig)
    expander: ExpanderConfig = field(default_factory=ExpanderConfig)
    reader: ReaderConfig = field(default_factory=ReaderConfig)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def _require(condition: bool, fieldname: str, reason: str) -> None:
    if not condition:
        raise ConfigInvalid(fieldname, reason)


def _section(data: dict[str, Any], name: str, keys: set[str]) -> dict[str, Any]:
    raw = data.get(name) or {}
    _require(isinstance(raw, dict), name, "must be a mapping")
    for key in raw:
        _require(key in keys, f"{name}.{key}", "unknown key")
    return raw


def _number(raw: dict, section: str, key: str, default, kind=float):
    value = raw.get(key, default)
    _require(
        isinstance(value, (int, float)) and not isinstance(value, bool),
        f"{section}.{key}",
        "must be a number",
    )
    if kind is int:
        _require(float(value).is_integer(), f"{section}.{key}", "must be an integer")
        return int(value)
    return float(value)


def _boolean(raw: dict, section: str, key: str, default: bool) -> bool:
    value = raw.get(key, default)
    _require(isinstance(value, bool), f"{section}.{key}", "must be true or false")
    return value


def parse_config(data: dict[str, Any]) -> PipelineConfig:
    """Validate a parsed YAML mapping into a PipelineConfig."""
    _require(isinstance(data, dict), "config", "top level must be a mapping")
    for key in data:
        _require(
            key in {"version", "ui", "retriever", "expander", "reader"},
            key,
            "unknown key",
        )
    version = data.get("version", CONFIG_VERSION)
    _require(version == CONFIG_VERSION, "version", f"must be {CONFIG_VERSION}")

    ui_raw = _section(data, "ui", {"title", "description", "views_visible"})
    views = ui_raw.get("views_visible", list(KNOWN_VIEWS))
    _require(isinstance(views, list), "ui.views_visible", "must be a list")
    for view in views:
        _require(
            view in KNOWN_VIEWS,
            "ui.views_visible",
            f"unknown view {view!r} (known: {', '.join(KNOWN_VIEWS)})",
        )
    ui = UiConfig(
        title=str(ui_raw.get("title", UiConfig.title)),
        description=str(ui_raw.get("description", UiConfig.description)),
        views_visible=tuple(views),
    )

    ret_raw = _section(
        data, "retriever", {"index_path", "k1", "b", "max_documents", "relsnip"}
    )
    rs_raw = _section(ret_raw, "relsnip", {"enabled", "k_frag", "n"})
    k_frag = _number(rs_raw, "retriever.relsnip", "k_frag", 100, int)
    _require(k_frag >= 1, "retriever.relsnip.k_frag", "must be >= 1")
    n_keep = _number(rs_raw, "retriever.relsnip", "n", 4, int)
    _require(n_keep >= 1, "retriever.relsnip.n", "must be >= 1")
    k1 = _number(ret_raw, "retriever", "k1", 1.2)
    _require(k1 >= 0, "retriever.k1", "must be >= 0")
    b = _number(ret_raw, "retriever", "b", 0.75)
    _require(0.0 <= b <= 1.0, "retriever.b", "must be within [0, 1]")
    max_documents = _number(ret_raw, "retriever", "max_documents", 5, int)
    _require(max_documents >= 1, "retriever.max_documents", "must be >= 1")
    retriever = RetrieverConfig(
        index_path=str(ret_raw.get("index_path", "index.bin")),
        k1=k1,
        b=b,
        max_documents=max_documents,
        relsnip=RelSnipConfig(
            enabled=_boolean(rs_raw, "retriever.relsnip", "enabled", True),
            k_frag=k_frag,
            n=n_keep,
        ),
    )

    exp_raw = _section(
        data, "expander", {"enabled", "k_thresh", "top_n", "term_weight", "provider"}
    )
    prov_raw = _section(exp_raw, "provider", {"kind", "endpoint", "timeout_ms"})
    prov_kind = str(prov_raw.get("kind", "native"))
    _require(
        prov_kind in ("native", "remote"),
        "expander.provider.kind",
        "must be native or remote",
    )
    prov_timeout = _number(prov_raw, "expander.provider", "timeout_ms", 2000, int)
    _require(prov_timeout >= 1, "expander.provider.timeout_ms", "must be >= 1")
    endpoint = prov_raw.get("endpoint")
    _require(
        endpoint is None or isinstance(endpoint, str),
        "expander.provider.endpoint",
        "must be a string or null",
    )
    if prov_kind == "remote":
        _require(
            bool(endpoint), "expander.provider.endpoint", "required for remote provider"
        )
    k_thresh = _number(exp_raw, "expander", "k_thresh", 0.5)
    _require(0.0 <= k_thresh <= 1.0, "expander.k_thresh", "must be within [0, 1]")
    top_n = _number(exp_raw, "expander", "top_n", 5, int)
    _require(top_n >= 1, "expander.top_n", "must be >= 1")
    term_weight = _number(exp_raw, "expander", "term_weight", 1.0)
    _require(term_weight >= 0.0, "expander.term_weight", "must be >= 0")
    expander = ExpanderConfig(
        enabled=_boolean(exp_raw, "expander", "enabled", False),
        k_thresh=k_thresh,
        top_n=top_n,
        term_weight=term_weight,
        provider=ProviderConfig(
            kind=prov_kind, endpoint=endpoint, timeout_ms=prov_timeout
        ),
    )

    rd_raw = _section(data, "reader", {"backend", "max_tokens", "stride", "top_k"})
    be_raw = _section(rd_raw, "backend", {"kind", "endpoint", "timeout_ms"})
    be_kind = str(be_raw.get("kind", "lexical"))
    _require(
        be_kind in ("lexical", "remote"),
        "reader.backend.kind",
        "must be lexical or remote",
    )
    be_timeout = _number(be_raw, "reader.backend", "timeout_ms", 4000, int)
    _require(be_timeout >= 1, "reader.backend.timeout_ms", "must be >= 1")
    be_endpoint = be_raw.get("endpoint")
    _require(
        be_endpoint is None or isinstance(be_endpoint, str),
        "reader.backend.endpoint",
        "must be a string or null",
    )
    if be_kind == "remote":
        _require(
            bool(be_endpoint), "reader.backend.endpoint", "required for remote backend"
        )
    max_tokens = _number(rd_raw, "reader", "max_tokens", 512, int)
    _require(max_tokens >= 1, "reader.max_tokens", "must be >= 1")
    stride = _number(rd_raw, "reader", "stride", 384, int)
    _require(
        1 <= stride <= max_tokens,
        "reader.stride",
        f"must be within 1..max_tokens ({max_tokens})",
    )
    top_k = _number(rd_raw, "reader", "top_k", 5, int)
    _require(top_k >= 1, "reader.top_k", "must be >= 1")
    reader = ReaderConfig(
        backend=BackendConfig(
            kind=be_kind, endpoint=be_endpoint, timeout_ms=be_timeout
        ),
        max_tokens=max_tokens,
        stride=stride,
        top_k=top_k,
    )

    return PipelineConfig(
        version=version, ui=ui, retriever=retriever, expander=expander, reader=reader
    )


def load_config(path: str | Path) -> PipelineConfig:
    """Parse and validate the YAML config at ``path``."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot read config {path}: {exc}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigInvalid("config", f"invalid YAML in {path}: {exc}") from exc
    return parse_config(data or {})


def write_default_config(path: str | Path) -> None:
    try:
        Path(path).write_text(DEFAULT_CONFIG_YAML, encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write default config {path}: {exc}") from exc


def load_or_create_config(path: str | Path | None = None) -> tuple[PipelineConfig, Path]:
    """Resolve, load, and validate a config; create the default if absent.

    Resolution order: explicit ``path`` argument, then the QA_CONFIG
    environment variable, then ./config.yaml. If none of those files
    exist, the documented default file is written to the current directory
    and loaded. Returns the config together with the path it came from.
    """
    candidates = []
    if path:
        candidates.append(Path(path))
    env_path = os.environ.get(CONFIG_ENV_VAR)
    if env_path:
        candidates.append(Path(env_path))
    candidates.append(Path.cwd() / DEFAULT_CONFIG_FILENAME)
    for candidate in candidates:
        if candidate.is_file():
            return load_config(candidate), candidate
    created = Path.cwd() / DEFAULT_CONFIG_FILENAME
    write_default_config(created)
    return load_config(created), created
