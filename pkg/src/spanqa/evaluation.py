"""Evaluation harness: compare pipeline configurations on a labeled dataset.

Datasets are JSON-lines files of {"question", "answer", "doc_id"} records.
For every configuration (an expansion strategy crossed with the condenser
on or off) the harness runs the full pipeline per example and reports
recall@k over the gold document, exact-match and token-F1 over the top
answer, per-stage latencies, and the total number of reader chunks
processed (one chunk equals one backend call).
"""

from __future__ import annotations

import csv
import io
import json
import re
import statistics
from collections import Counter
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

from .config import PipelineConfig
from .errors import DatasetInvalid, IoFailure
from .expander import CooccurrenceProvider, MaskFillProvider
from .index import Index
from .pipeline import QaPipeline, RequestOverrides

RECALL_KS = (1, 5, 10)

# Strategy slots; None marks a comparison slot that is defined but not
# shipped (requesting it fails loudly instead of silently falling back).
EXPANSION_STRATEGIES: dict[str, str | None] = {
    "off": "no expansion (plain BM25)",
    "native": "corpus co-occurrence provider",
    "remote": "remote fill-mask provider",
    "word2vec": None,
    "rm3": None,
}


@dataclass(frozen=True)
class EvalExample:
    question: str
    gold_answer: str
    gold_doc_id: str


@dataclass(frozen=True)
class EvalConfiguration:
    label: str
    expansion: str = "off"  # key into EXPANSION_STRATEGIES
    relsnip_enabled: bool = True


@dataclass
class EvalRow:
    config_label: str
    examples: int
    skipped: int
    recall_at_1: float
    recall_at_5: float
    recall_at_10: float
    answer_em: float
    answer_f1: float
    mean_expand_ms: float
    median_expand_ms: float
    mean_retrieve_ms: float
    median_retrieve_ms: float
    mean_condense_ms: float
    median_condense_ms: float
    mean_read_ms: float
    median_read_ms: float
    mean_total_ms: float
    median_total_ms: float
    reader_chunks_total: int


@dataclass
class EvalReport:
    rows: list[EvalRow] = field(default_factory=list)
    missing_gold_docs: list[str] = field(default_factory=list)


CSV_COLUMNS = [
    "config_label",
    "examples",
    "skipped",
    "recall_at_1",
    "recall_at_5",
    "recall_at_10",
    "answer_em",
    "answer_f1",
    "mean_expand_ms",
    "median_expand_ms",
    "mean_retrieve_ms",
    "median_retrieve_ms",
    "mean_condense_ms",
    "median_condense_ms",
    "mean_read_ms",
    "median_read_ms",
    "mean_total_ms",
    "median_total_ms",
    "reader_chunks_total",
]

_ARTICLES = {"a", "an", "the"}


def normalize_answer(text: str) -> list[str]:
    """Lowercase, strip punctuation and articles, split on whitespace."""
    tokens = re.findall(r"[^\W_]+", text.lower(), flags=re.UNICODE)
    return [t for t in tokens if t not in _ARTICLES]


def exact_match(prediction: str, gold: str) -> float:
    return float(normalize_answer(prediction) == normalize_answer(gold))


def token_f1(prediction: str, gold: str) -> float:
    pred = normalize_answer(prediction)
    gold_tokens = normalize_answer(gold)
    if not pred or not gold_tokens:
        return float(pred == gold_tokens)
    common = sum((Counter(pred) & Counter(gold_tokens)).values())
    if common == 0:
        return 0.0
    precision = common / len(pred)
    recall = common / len(gold_tokens)
    return 2 * precision * recall / (precision + recall)


def load_dataset(path: str | Path) -> list[EvalExample]:
    """Read a JSON-lines dataset of {"question", "answer", "doc_id"}."""
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise IoFailure(f"cannot read dataset {path}: {exc}") from exc
    examples = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DatasetInvalid(f"{path}:{lineno}: invalid JSON: {exc}") from exc
        if not isinstance(record, dict) or not {
            "question",
            "answer",
            "doc_id",
        } <= set(record):
            raise DatasetInvalid(
                f"{path}:{lineno}: object must have question, answer, doc_id"
            )
        examples.append(
            EvalExample(
                question=str(record["question"]),
                gold_answer=str(record["answer"]),
                gold_doc_id=str(record["doc_id"]),
            )
        )
    if not examples:
        raise DatasetInvalid(f"{path}: dataset is empty")
    return examples


def default_configurations(include_remote: bool = False) -> list[EvalConfiguration]:
    """Cartesian product of shipped expansion strategies and condenser on/off."""
    strategies = ["off", "native"] + (["remote"] if include_remote else [])
    configurations = []
    for strategy in strategies:
        for relsnip_enabled in (False, True):
            name = "baseline" if strategy == "off" else f"{strategy}-expansion"
            label = f"{name}+relsnip" if relsnip_enabled else name
            configurations.append(
                EvalConfiguration(
                    label=label, expansion=strategy, relsnip_enabled=relsnip_enabled
                )
            )
    return configurations


def _config_for(base: PipelineConfig, configuration: EvalConfiguration) -> PipelineConfig:
    if configuration.expansion not in EXPANSION_STRATEGIES:
        raise DatasetInvalid(
            f"unknown expansion strategy {configuration.expansion!r}"
        )
    if EXPANSION_STRATEGIES[configuration.expansion] is None:
        raise DatasetInvalid(
            f"expansion strategy {configuration.expansion!r} is not shipped"
        )
    expander = replace(
        base.expander,
        enabled=configuration.expansion != "off",
        provider=replace(
            base.expander.provider,
            kind="remote" if configuration.expansion == "remote" else "native",
        ),
    )
    retriever = replace(
        base.retriever,
        relsnip=replace(base.retriever.relsnip, enabled=configuration.relsnip_enabled),
    )
    return replace(base, expander=expander, retriever=retriever)


def run_eval(
    index: Index,
    dataset: Sequence[EvalExample],
    configurations: Sequence[EvalConfiguration] | None = None,
    base_config: PipelineConfig | None = None,
    provider: MaskFillProvider | None = None,
) -> EvalReport:
    """Evaluate every configuration over the dataset.

    Examples whose gold document is missing from the index are skipped and
    listed once in the report. Retrieval depth is forced to max(RECALL_KS)
    so recall@10 is computable regardless of the configured depth.
    """
    if not dataset:
        raise DatasetInvalid("dataset is empty")
    configurations = list(configurations or default_configurations())
    base_config = base_config or PipelineConfig()

    usable = [ex for ex in dataset if ex.gold_doc_id in index]
    missing = sorted({ex.gold_doc_id for ex in dataset if ex.gold_doc_id not in index})
    report = EvalReport(missing_gold_docs=missing)
    if not usable:
        raise DatasetInvalid("no dataset example has its gold document indexed")

    needs_native = any(c.expansion == "native" for c in configurations)
    if provider is None and needs_native:
        provider = CooccurrenceProvider(analyzer=index.analyzer).train(index.documents)

    depth = max(RECALL_KS)
    for configuration in configurations:
        config = _config_for(base_config, configuration)
        pipeline = QaPipeline(config, index=index, provider=provider)
        hits_at = {k: 0 for k in RECALL_KS}
        em_total = 0.0
        f1_total = 0.0
        chunks_total = 0
        stage_samples: dict[str, list[float]] = {
            "expand_ms": [],
            "retrieve_ms": [],
            "condense_ms": [],
            "read_ms": [],
            "total_ms": [],
        }
        for example in usable:
            result = pipeline.answer(
                example.question,
                overrides=RequestOverrides(max_documents=depth),
            )
            ranked_ids = [d.doc_id for d in result.documents]
            for k in RECALL_KS:
                if example.gold_doc_id in ranked_ids[:k]:
                    hits_at[k] += 1
            top_answer = result.answers[0].answer.text if result.answers else ""
            em = exact_match(top_answer, example.gold_answer)
            f1 = token_f1(top_answer, example.gold_answer)
            assert em <= f1 + 1e-12
            em_total += em
            f1_total += f1
            chunks_total += result.chunks_read
            for stage in stage_samples:
                stage_samples[stage].append(result.timings.get(stage, 0.0))
        n = len(usable)
        recalls = {k: hits_at[k] / n for k in RECALL_KS}
        assert recalls[1] <= recalls[5] <= recalls[10]
        report.rows.append(
            EvalRow(
                config_label=configuration.label,
                examples=n,
                skipped=len(dataset) - n,
                recall_at_1=recalls[1],
                recall_at_5=recalls[5],
                recall_at_10=recalls[10],
                answer_em=em_total / n,
                answer_f1=f1_total / n,
                mean_expand_ms=statistics.fmean(stage_samples["expand_ms"]),
                median_expand_ms=statistics.median(stage_samples["expand_ms"]),
                mean_retrieve_ms=statistics.fmean(stage_samples["retrieve_ms"]),
                median_retrieve_ms=statistics.median(stage_samples["retrieve_ms"]),
                mean_condense_ms=statistics.fmean(stage_samples["condense_ms"]),
                median_condense_ms=statistics.median(stage_samples["condense_ms"]),
                mean_read_ms=statistics.fmean(stage_samples["read_ms"]),
                median_read_ms=statistics.median(stage_samples["read_ms"]),
                mean_total_ms=statistics.fmean(stage_samples["total_ms"]),
                median_total_ms=statistics.median(stage_samples["total_ms"]),
                reader_chunks_total=chunks_total,
            )
        )
    return report


def report_to_csv(report: EvalReport) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in report.rows:
        record = {c: getattr(row, c) for c in CSV_COLUMNS}
        for key, value in record.items():
            if isinstance(value, float):
                record[key] = f"{value:.6f}"
        writer.writerow(record)
    return buffer.getvalue()


def format_table(report: EvalReport) -> str:
    """Compact human-readable summary of the main metrics."""
    headers = [
        "configuration",
        "r@1",
        "r@5",
        "r@10",
        "em",
        "f1",
        "total ms",
        "chunks",
    ]
    rows = [
        [
            r.config_label,
            f"{r.recall_at_1:.3f}",
            f"{r.recall_at_5:.3f}",
            f"{r.recall_at_10:.3f}",
            f"{r.answer_em:.3f}",
            f"{r.answer_f1:.3f}",
            f"{r.mean_total_ms:.1f}",
            str(r.reader_chunks_total),
        ]
        for r in report.rows
    ]
    widths = [
        max(len(h), *(len(row[i]) for row in rows)) if rows else len(h)
        for i, h in enumerate(headers)
    ]
    lines = [
        "  ".join(h.ljust(widths[i]) for i, h in enumerate(headers)),
        "  ".join("-" * w for w in widths),
    ]
    lines += ["  ".join(c.ljust(widths[i]) for i, c in enumerate(row)) for row in rows]
    if report.missing_gold_docs:
        lines.append(
            f"skipped examples with missing gold docs: {', '.join(report.missing_gold_docs)}"
        )
    return "\n".join(lines)


def emit_report(report: EvalReport, path: str | Path) -> None:
    """Write the CSV report to ``path``."""
    try:
        Path(path).write_text(report_to_csv(report), encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write report {path}: {exc}") from exc
