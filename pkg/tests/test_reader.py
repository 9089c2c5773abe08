from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import CannedHttpServer
from spanqa.analysis import Analyzer
from spanqa.errors import BackendUnavailable, InvalidStride
from spanqa.reader import (
    AnswerSpan,
    LexicalReaderBackend,
    ReaderBackend,
    RemoteReaderBackend,
    SpanPrediction,
    chunk_tokens,
    num_chunks,
    read_passage,
)


def toks(analyzer: Analyzer, n: int, vocab: int = 40, seed: int = 0):
    rng = random.Random(seed)
    passage = " ".join(f"w{rng.randrange(vocab)}" for _ in range(n))
    return passage, analyzer.tokenize(passage)


def test_chunk_window_enumeration(analyzer):
    passage, tokens = toks(analyzer, 1200)
    chunks = chunk_tokens(tokens, max_tokens=512, stride=384, passage=passage)
    assert [(c.token_start, c.token_end) for c in chunks] == [
        (0, 512),
        (384, 896),
        (768, 1200),
    ]


def test_chunk_single_when_short(analyzer):
    passage, tokens = toks(analyzer, 100)
    chunks = chunk_tokens(tokens, max_tokens=512, stride=384, passage=passage)
    assert len(chunks) == 1
    assert chunks[0].text == passage


def test_chunk_disjoint_tiling(analyzer):
    passage, tokens = toks(analyzer, 1000)
    chunks = chunk_tokens(tokens, max_tokens=250, stride=250, passage=passage)
    bounds = [(c.token_start, c.token_end) for c in chunks]
    assert bounds == [(0, 250), (250, 500), (500, 750), (750, 1000)]


def test_chunk_invalid_stride(analyzer):
    passage, tokens = toks(analyzer, 10)
    with pytest.raises(InvalidStride):
        chunk_tokens(tokens, max_tokens=5, stride=6, passage=passage)
    with pytest.raises(InvalidStride):
        chunk_tokens(tokens, max_tokens=5, stride=0, passage=passage)


def test_chunk_empty_passage(analyzer):
    assert chunk_tokens([], 512, 384) == []
    assert num_chunks(0, 512, 384) == 0


@given(
    n=st.integers(min_value=0, max_value=3000),
    max_tokens=st.integers(min_value=1, max_value=600),
    data=st.data(),
)
@settings(max_examples=200)
def test_chunk_coverage_and_overlap(n, max_tokens, data):
    stride = data.draw(st.integers(min_value=1, max_value=max_tokens))
    analyzer = Analyzer()
    passage = " ".join("x" for _ in range(n))
    tokens = analyzer.tokenize(passage)
    chunks = chunk_tokens(tokens, max_tokens, stride, passage=passage)
    assert len(chunks) == num_chunks(n, max_tokens, stride)
    covered = set()
    for c in chunks:
        assert c.token_end - c.token_start <= max_tokens
        covered.update(range(c.token_start, c.token_end))
    assert covered == set(range(n))
    for left, right in zip(chunks, chunks[1:]):
        assert right.token_start - left.token_start == stride


# --- lexical backend -------------------------------------------------------


def brute_force_best_window(
    analyzer: Analyzer, question: str, chunk_text: str, max_len: int = 15
) -> float:
    """Enumerate every token window up to max_len; uniform IDF of 1."""
    q_terms = {
        t.text
        for t in analyzer.tokenize(question)
        if t.pos.name != "PUNCT" and t.text not in analyzer.stopwords
    }
    if not q_terms:
        return 0.0
    tokens = analyzer.tokenize(chunk_text)
    best = 0.0
    for i in range(len(tokens)):
        for j in range(i, min(i + max_len, len(tokens))):
            covered = {t.text for t in tokens[i : j + 1]} & q_terms
            best = max(best, len(covered) / len(q_terms))
    return best


def test_lexical_no_shared_terms():
    backend = LexicalReaderBackend()
    assert backend.read("what is a quasar?", "bananas are fruit") == []


def test_lexical_full_coverage_scores_one():
    backend = LexicalReaderBackend()
    spans = backend.read(
        "red apple sauce", "I spread red apple sauce on toast"
    )
    assert spans and spans[0].score == pytest.approx(1.0)


def test_lexical_partial_overlap_matches_oracle(analyzer):
    backend = LexicalReaderBackend()
    question = "red apple sauce"
    chunk = "the apple tree gives red fruit"
    spans = backend.read(question, chunk)
    assert spans[0].score == pytest.approx(2 / 3)
    assert spans[0].score == pytest.approx(
        brute_force_best_window(analyzer, question, chunk)
    )
    assert spans[0].text == "apple tree gives red"


def test_lexical_attributions_max_normalized():
    backend = LexicalReaderBackend()
    spans = backend.read("red apple sauce", "the apple tree gives red fruit")
    weights = [a.weight for a in spans[0].attributions]
    assert max(weights) == 1.0
    assert [a.token for a in spans[0].attributions] == ["apple", "tree", "gives", "red"]
    assert weights == [1.0, 0.0, 0.0, 1.0]


def test_lexical_score_floor():
    backend = LexicalReaderBackend(score_floor=0.5)
    # only 1 of 3 question terms present: score 1/3 < 0.5
    assert backend.read("red apple sauce", "an apple a day") == []


def test_lexical_all_stopword_question():
    backend = LexicalReaderBackend()
    assert backend.read("what is the", "the what is") == []


def test_lexical_randomized_against_oracle(analyzer):
    rng = random.Random(2718)
    vocab = [f"v{i}" for i in range(12)]
    backend = LexicalReaderBackend()
    for _ in range(100):
        question = " ".join(rng.sample(vocab, rng.randint(1, 4)))
        chunk = " ".join(rng.choice(vocab) for _ in range(rng.randint(0, 60)))
        spans = backend.read(question, chunk)
        expected = brute_force_best_window(analyzer, question, chunk)
        got = spans[0].score if spans else 0.0
        if expected >= backend.score_floor:
            assert got == pytest.approx(expected)
        else:
            assert got == 0.0


# --- read_passage aggregation ---------------------------------------------


class ScriptedBackend(ReaderBackend):
    """Returns canned spans per chunk text, recording calls."""

    def __init__(self, script, max_tokens=8):
        self.script = script  # chunk_text -> list[SpanPrediction]
        self.max_tokens = max_tokens
        self.calls = 0

    def read(self, question, chunk_text):
        self.calls += 1
        return self.script(chunk_text)


def test_read_passage_empty_for_unrelated_text():
    backend = LexicalReaderBackend()
    assert read_passage("quasar luminosity", "bananas are fruit", backend, top_k=3) == []


def test_read_passage_dedups_overlapping_chunks():
    # chunks of 4 tokens, stride 2; the span "w w" at tokens 2..3 appears in
    # chunk 0 (offset 4..7) and chunk 1 (offset 0..3); scripted scores differ
    passage = "a b w w c d"

    def script(chunk_text):
        pos = chunk_text.find("w w")
        if pos < 0:
            return []
        score = 0.9 if chunk_text.startswith("w") else 0.7
        return [SpanPrediction(text="w w", start=pos, end=pos + 3, score=score)]

    backend = ScriptedBackend(script, max_tokens=4)
    spans = read_passage("irrelevant", passage, backend, top_k=5, stride=2)
    assert len(spans) == 1
    assert spans[0].score == 0.9
    assert spans[0].text == "w w"
    assert passage[spans[0].passage_char_start : spans[0].passage_char_end] == "w w"


def test_read_passage_sorts_by_score():
    passage = "alpha beta gamma delta"

    def script(chunk_text):
        return [
            SpanPrediction(text="alpha", start=0, end=5, score=0.5),
            SpanPrediction(text="beta", start=6, end=10, score=0.8),
        ]

    backend = ScriptedBackend(script, max_tokens=10)
    spans = read_passage("q", passage, backend, top_k=5, stride=10)
    assert [s.score for s in spans] == [0.8, 0.5]


def test_read_passage_top_k_truncation():
    passage = "alpha beta gamma delta"

    def script(chunk_text):
        return [
            SpanPrediction(text="a", start=i, end=i + 1, score=1.0 - i / 10)
            for i in range(4)
        ]

    backend = ScriptedBackend(script, max_tokens=10)
    assert len(read_passage("q", passage, backend, top_k=2, stride=10)) == 2


def test_read_passage_offset_correctness_and_global_max(analyzer):
    rng = random.Random(11)
    vocab = [f"v{i}" for i in range(15)]
    backend = LexicalReaderBackend(max_tokens=20)
    for _ in range(50):
        question = " ".join(rng.sample(vocab, rng.randint(1, 4)))
        passage = " ".join(rng.choice(vocab) for _ in range(rng.randint(0, 120)))
        spans = read_passage(question, passage, backend, top_k=5, stride=10)
        tokens = analyzer.tokenize(passage)
        chunks = chunk_tokens(tokens, 20, 10, passage=passage)
        chunk_best = 0.0
        for c in chunks:
            for p in backend.read(question, c.text):
                chunk_best = max(chunk_best, p.score)
        top = spans[0].score if spans else 0.0
        assert top == pytest.approx(chunk_best)
        for s in spans:
            assert s.text == passage[s.passage_char_start : s.passage_char_end]


# --- remote backend --------------------------------------------------------


def test_remote_backend_contract():
    seen = {}

    def handler(path, body):
        seen.update(body)
        return 200, {
            "answers": [
                {
                    "text": "the mac",
                    "start": 0,
                    "end": 7,
                    "score": 0.9,
                    "attributions": [{"token": "mac", "weight": 1.0}],
                }
            ]
        }

    with CannedHttpServer(handler) as server:
        backend = RemoteReaderBackend(server.url + "/read", timeout_ms=2000)
        spans = backend.read("what computer?", "the mac was a computer")
        backend.close()
    assert len(spans) == 1
    assert spans[0].score == 0.9
    assert spans[0].attributions[0].token == "mac"
    assert seen["question"] == "what computer?"
    assert seen["top_k"] == 5


def test_remote_backend_missing_attributions():
    def handler(path, body):
        return 200, {"answers": [{"text": "mac", "start": 4, "end": 7, "score": 0.5}]}

    with CannedHttpServer(handler) as server:
        backend = RemoteReaderBackend(server.url, timeout_ms=2000)
        spans = backend.read("q", "the mac was a computer")
        backend.close()
    assert spans[0].attributions == ()


def test_remote_backend_malformed_response():
    def handler(path, body):
        return 200, {"answers": [{"wrong": 1}]}

    with CannedHttpServer(handler) as server:
        backend = RemoteReaderBackend(server.url, timeout_ms=2000)
        with pytest.raises(BackendUnavailable):
            backend.read("q", "context")
        backend.close()


def test_remote_backend_unreachable():
    backend = RemoteReaderBackend("http://127.0.0.1:9/read", timeout_ms=200)
    with pytest.raises(BackendUnavailable):
        backend.read("q", "context")
    backend.close()


def test_remote_backend_rejects_out_of_bounds_offsets():
    def handler(path, body):
        return 200, {"answers": [{"text": "x", "start": 0, "end": 999, "score": 0.5}]}

    with CannedHttpServer(handler) as server:
        backend = RemoteReaderBackend(server.url, timeout_ms=2000)
        with pytest.raises(BackendUnavailable):
            backend.read("q", "short")
        backend.close()
