from __future__ import annotations

import json
import random

import pytest

from helpers import build_synonym_corpus
from spanqa.config import PipelineConfig
from spanqa.errors import DatasetInvalid
from spanqa.evaluation import (
    CSV_COLUMNS,
    EvalConfiguration,
    EvalExample,
    EvalReport,
    default_configurations,
    emit_report,
    exact_match,
    format_table,
    load_dataset,
    normalize_answer,
    report_to_csv,
    run_eval,
    token_f1,
)
from spanqa.index import Document, ingest


def as_examples(records) -> list[EvalExample]:
    return [
        EvalExample(
            question=r["question"], gold_answer=r["answer"], gold_doc_id=r["doc_id"]
        )
        for r in records
    ]


def test_normalize_answer_strips_articles_and_punct():
    assert normalize_answer("The Apple Macintosh!") == ["apple", "macintosh"]
    assert normalize_answer("an answer, a day") == ["answer", "day"]


def test_exact_match_and_f1_bounds():
    assert exact_match("the mac", "Mac") == 1.0
    assert token_f1("the mac", "Mac") == 1.0
    assert exact_match("a mac computer", "mac") == 0.0
    assert 0.0 < token_f1("a mac computer", "mac") < 1.0
    assert token_f1("unrelated words", "mac") == 0.0


def test_em_never_exceeds_f1():
    pairs = [
        ("mac", "mac"),
        ("the mac", "a mac"),
        ("macintosh computer", "computer"),
        ("", "gold"),
        ("pred", ""),
    ]
    for pred, gold in pairs:
        assert exact_match(pred, gold) <= token_f1(pred, gold) + 1e-12


def test_load_dataset(tmp_path):
    path = tmp_path / "data.jsonl"
    path.write_text(
        '{"question": "q1", "answer": "a1", "doc_id": "d1"}\n'
        "\n"
        '{"question": "q2", "answer": "a2", "doc_id": "d2"}\n',
        encoding="utf-8",
    )
    examples = load_dataset(path)
    assert len(examples) == 2
    assert examples[0].gold_doc_id == "d1"


def test_load_dataset_rejects_garbage(tmp_path):
    path = tmp_path / "data.jsonl"
    path.write_text("nope\n", encoding="utf-8")
    with pytest.raises(DatasetInvalid):
        load_dataset(path)
    path.write_text('{"question": "q"}\n', encoding="utf-8")
    with pytest.raises(DatasetInvalid):
        load_dataset(path)
    path.write_text("", encoding="utf-8")
    with pytest.raises(DatasetInvalid):
        load_dataset(path)


def test_unique_term_match_gives_recall_one_everywhere(demo_index):
    dataset = [
        EvalExample(
            question="which fruit has potassium?",
            gold_answer="bananas",
            gold_doc_id="bananas",
        )
    ]
    report = run_eval(demo_index, dataset)
    assert len(report.rows) == 4  # {off, native} x {relsnip off, on}
    for row in report.rows:
        assert row.recall_at_1 == 1.0
        assert row.recall_at_1 <= row.recall_at_5 <= row.recall_at_10
        assert 0.0 <= row.answer_em <= row.answer_f1 <= 1.0


def test_missing_gold_docs_skipped_and_listed(demo_index):
    dataset = [
        EvalExample("which fruit has potassium?", "bananas", "bananas"),
        EvalExample("where is atlantis?", "nowhere", "not-in-corpus"),
    ]
    report = run_eval(demo_index, dataset, configurations=[EvalConfiguration("solo")])
    assert report.missing_gold_docs == ["not-in-corpus"]
    assert report.rows[0].examples == 1
    assert report.rows[0].skipped == 1


def test_not_shipped_strategy_fails_loudly(demo_index):
    dataset = [EvalExample("q?", "a", "bananas")]
    for strategy in ("rm3", "word2vec"):
        with pytest.raises(DatasetInvalid, match="not shipped"):
            run_eval(
                demo_index,
                dataset,
                configurations=[EvalConfiguration("x", expansion=strategy)],
            )


def test_synonym_corpus_recall_property():
    docs, mismatch, control = build_synonym_corpus()
    index = ingest(docs)
    configurations = [
        EvalConfiguration("baseline", expansion="off", relsnip_enabled=False),
        EvalConfiguration("native-expansion", expansion="native", relsnip_enabled=False),
    ]
    full = run_eval(index, as_examples(mismatch + control), configurations)
    baseline_row, expanded_row = full.rows
    assert expanded_row.recall_at_5 >= baseline_row.recall_at_5

    subset = run_eval(index, as_examples(mismatch), configurations)
    baseline_sub, expanded_sub = subset.rows
    assert expanded_sub.recall_at_5 > baseline_sub.recall_at_5
    assert baseline_sub.recall_at_5 == 0.0
    assert expanded_sub.recall_at_5 == 1.0


def test_latency_accounting(demo_index):
    dataset = [
        EvalExample("which fruit has potassium?", "bananas", "bananas"),
        EvalExample("who founded apple?", "steve jobs", "mac"),
    ]
    report = run_eval(demo_index, dataset, configurations=[EvalConfiguration("solo")])
    row = report.rows[0]
    stage_sum = (
        row.mean_expand_ms
        + row.mean_retrieve_ms
        + row.mean_condense_ms
        + row.mean_read_ms
    )
    assert stage_sum <= row.mean_total_ms + 1.0  # stages nest inside the total


def test_default_configurations_cartesian():
    labels = [c.label for c in default_configurations()]
    assert labels == [
        "baseline",
        "baseline+relsnip",
        "native-expansion",
        "native-expansion+relsnip",
    ]
    with_remote = [c.label for c in default_configurations(include_remote=True)]
    assert "remote-expansion+relsnip" in with_remote


def test_empty_report_csv_is_header_only():
    assert report_to_csv(EvalReport()) == ",".join(CSV_COLUMNS) + "\n"


def test_report_rows_and_formatting(demo_index, tmp_path):
    dataset = [EvalExample("which fruit has potassium?", "bananas", "bananas")]
    report = run_eval(
        demo_index,
        dataset,
        configurations=[
            EvalConfiguration("a", relsnip_enabled=False),
            EvalConfiguration("b", relsnip_enabled=True),
        ],
    )
    csv_text = report_to_csv(report)
    lines = csv_text.strip().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(lines) == 3
    out = tmp_path / "report.csv"
    emit_report(report, out)
    assert out.read_text(encoding="utf-8") == csv_text
    table = format_table(report)
    assert "configuration" in table and "a" in table and "b" in table


def test_long_doc_suite_chunk_reduction():
    # documents padded to 10,000 tokens: condensation cuts reader chunks
    # by an order of magnitude
    rng = random.Random(3)
    words = [f"pad{rng.randrange(97)}" for _ in range(10_000)]
    words[5000:5003] = ["hidden", "treasure", "chest"]
    docs = [Document(doc_id="long", title="", body=" ".join(words[:10_000]))]
    index = ingest(docs)
    dataset = [
        EvalExample("where is the hidden treasure chest?", "treasure", "long")
    ]
    report = run_eval(
        index,
        dataset,
        configurations=[
            EvalConfiguration("full", relsnip_enabled=False),
            EvalConfiguration("condensed", relsnip_enabled=True),
        ],
    )
    full_row, condensed_row = report.rows
    assert condensed_row.reader_chunks_total <= full_row.reader_chunks_total / 10
    assert condensed_row.reader_chunks_total >= 1


def test_perfect_answer_f1_is_one(demo_index):
    # lexical baseline extracts the matching window; gold equals that window
    dataset = [
        EvalExample(
            question="documents ranks engine search query",
            gold_answer="search engine ranks documents for a query",
            gold_doc_id="search",
        )
    ]
    report = run_eval(
        demo_index, dataset, configurations=[EvalConfiguration("solo")]
    )
    assert report.rows[0].answer_f1 == 1.0
