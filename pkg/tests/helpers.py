"""Independent oracles and generators shared by unit and acceptance tests.

Everything here recomputes expected values from scratch (no imports from
the code paths under test beyond plain data types), so a bug in the
implementation cannot leak into the expectation.
"""

from __future__ import annotations

import json
import random
import threading
from collections import Counter
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from math import log

from spanqa.index import Document


class CannedHttpServer:
    """Loopback HTTP server answering POSTs from a user-supplied function.

    The handler function receives (path, parsed_json_body) and returns
    (status_code, response_object). Use as a context manager; ``url`` is
    the base address including the ephemeral port.
    """

    def __init__(self, handler_fn):
        outer = self

        class Handler(BaseHTTPRequestHandler):
            def do_POST(self):
                length = int(self.headers.get("Content-Length", 0))
                body = json.loads(self.rfile.read(length) or b"{}")
                status, payload = outer.handler_fn(self.path, body)
                blob = json.dumps(payload).encode("utf-8")
                self.send_response(status)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(blob)))
                self.end_headers()
                self.wfile.write(blob)

            def log_message(self, *args):
                pass

        self.handler_fn = handler_fn
        self._server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self.url = f"http://127.0.0.1:{self._server.server_address[1]}"
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)

    def __enter__(self):
        self._thread.start()
        return self

    def __exit__(self, *exc):
        self._server.shutdown()
        self._server.server_close()


def bm25_brute_force(
    doc_token_lists: list[list[str]],
    query_terms: list[str],
    k1: float = 1.2,
    b: float = 0.75,
) -> list[float]:
    """Score every document by direct evaluation of the BM25 closed form.

    Terms are summed in sorted order, mirroring the documented summation
    order, so scores are comparable bit for bit.
    """
    n = len(doc_token_lists)
    avg = sum(len(d) for d in doc_token_lists) / n
    dfs = {
        term: sum(1 for d in doc_token_lists if term in d)
        for term in set(query_terms)
    }
    out = []
    for toks in doc_token_lists:
        counts = Counter(toks)
        score = 0.0
        for term in sorted(set(query_terms)):
            tf = counts.get(term, 0)
            df = dfs[term]
            if tf == 0 or df == 0:
                continue
            idf = log(1 + (n - df + 0.5) / (df + 0.5))
            norm = k1 * (1 - b + b * len(toks) / avg)
            score += 1.0 * idf * tf * (k1 + 1) / (tf + norm)
        out.append(score)
    return out


def bm25_brute_force_ranking(
    doc_ids: list[str],
    doc_token_lists: list[list[str]],
    query_terms: list[str],
    k: int,
    k1: float = 1.2,
    b: float = 0.75,
) -> list[tuple[str, float]]:
    """Full-scan top-k ranking with the documented tie-break."""
    scores = bm25_brute_force(doc_token_lists, query_terms, k1=k1, b=b)
    matched = [
        (doc_ids[i], scores[i]) for i in range(len(doc_ids)) if scores[i] > 0.0
    ]
    matched.sort(key=lambda pair: (-pair[1], pair[0]))
    return matched[:k]


def random_corpus(
    rng: random.Random,
    max_docs: int = 50,
    vocab_size: int = 30,
    max_doc_len: int = 40,
) -> tuple[list[Document], list[list[str]]]:
    """Random small corpus plus its token lists (words are single tokens)."""
    vocab = [f"w{i}" for i in range(rng.randint(1, vocab_size))]
    n_docs = rng.randint(1, max_docs)
    docs, token_lists = [], []
    for i in range(n_docs):
        tokens = [rng.choice(vocab) for _ in range(rng.randint(0, max_doc_len))]
        docs.append(Document(doc_id=f"d{i:03d}", title="", body=" ".join(tokens)))
        token_lists.append(tokens)
    return docs, token_lists


def random_query(rng: random.Random, vocab_size: int = 30) -> list[str]:
    """Random query terms, occasionally including unindexed ones."""
    terms = [f"w{rng.randrange(vocab_size)}" for _ in range(rng.randint(1, 5))]
    if rng.random() < 0.3:
        terms.append("zzz-not-indexed")
    return terms


def build_synonym_corpus():
    """Corpus engineered so some gold documents are reachable only through
    a synonym of a query term.

    Three groups follow the same pattern: the question uses one word (car,
    doctor, movie), the gold document uses only its synonym (automobile,
    physician, film) and shares not a single term with the question, and
    two bridge documents teach the co-occurrence provider that the synonym
    appears next to the question's other content words. Control questions
    hit their gold documents by plain term match.

    Returns (documents, mismatch_examples, control_examples) where the
    examples are {"question", "answer", "doc_id"} dicts.
    """
    documents = [
        # car -> automobile
        Document(
            doc_id="gold-car",
            title="",
            body=(
                "automobile speed records : seven automobile models reached "
                "two hundred kilometres per hour"
            ),
        ),
        Document(doc_id="bridge-car-1", title="", body="one automobile can go very fast on any road"),
        Document(doc_id="bridge-car-2", title="", body="this automobile can go fast on such road"),
        # doctor -> physician
        Document(
            doc_id="gold-doctor",
            title="",
            body=(
                "physician offices treat patients downtown ; physician visits "
                "cost money"
            ),
        ),
        Document(doc_id="bridge-doctor-1", title="", body="a physician can help sick people"),
        Document(doc_id="bridge-doctor-2", title="", body="physician help for sick people"),
        # movie -> film
        Document(
            doc_id="gold-movie",
            title="",
            body="film studios release films yearly ; film critics rate films",
        ),
        Document(doc_id="bridge-movie-1", title="", body="one film to watch tonight"),
        Document(doc_id="bridge-movie-2", title="", body="another film to watch tonight"),
        # controls reachable by direct term match
        Document(
            doc_id="gold-banana",
            title="",
            body="bananas are long yellow fruit rich in potassium",
        ),
        Document(
            doc_id="gold-apple",
            title="",
            body="steve jobs and steve wozniak founded apple in a garage",
        ),
        Document(
            doc_id="gold-search",
            title="",
            body="a search engine ranks documents for a query",
        ),
        # unrelated fillers
        Document(doc_id="filler-1", title="", body="rain falls softly in northern forests"),
        Document(doc_id="filler-2", title="", body="orchestras rehearse symphonies during winter"),
    ]
    mismatch_examples = [
        {
            "question": "how fast can a car go on a road?",
            "answer": "two hundred kilometres per hour",
            "doc_id": "gold-car",
        },
        {
            "question": "which doctor can help sick people?",
            "answer": "physician offices treat patients downtown",
            "doc_id": "gold-doctor",
        },
        {
            "question": "what movie should we watch tonight?",
            "answer": "film studios release films yearly",
            "doc_id": "gold-movie",
        },
    ]
    control_examples = [
        {
            "question": "which fruit is yellow?",
            "answer": "bananas",
            "doc_id": "gold-banana",
        },
        {
            "question": "who founded apple?",
            "answer": "steve jobs and steve wozniak",
            "doc_id": "gold-apple",
        },
        {
            "question": "what does a search engine rank?",
            "answer": "documents",
            "doc_id": "gold-search",
        },
    ]
    return documents, mismatch_examples, control_examples
