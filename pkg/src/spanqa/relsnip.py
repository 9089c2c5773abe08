"""Condense long documents into short, query-relevant passages.

A retrieved document is split into fixed-size token fragments, each
fragment is BM25-scored as if the fragment set were a miniature corpus
(document frequency and average length computed over the fragments of this
one document), and the top n fragments are stitched back together in
original document order. The reader then only has to process k_frag * n
tokens instead of the whole document, which is where the latency win on
multi-thousand-token documents comes from.

Nothing here touches the index; condensation is a pure function of the
document text and the query terms.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from math import log

from .analysis import Analyzer
from .index import DEFAULT_B, DEFAULT_K1, Document


@dataclass(frozen=True)
class RelSnipParams:
    k_frag: int = 100  # tokens per fragment
    n: int = 4  # fragments kept
    enabled: bool = True


@dataclass(frozen=True)
class Fragment:
    """A contiguous slice of a document's token sequence.

    token offsets index the document token sequence; char offsets index the
    document body, so fragment text can be highlighted in place.
    """

    doc_id: str
    frag_index: int
    text: str
    token_start: int
    token_end: int
    char_start: int
    char_end: int
    terms: tuple[str, ...] = field(repr=False)
    score: float = 0.0

    @property
    def token_count(self) -> int:
        return self.token_end - self.token_start


@dataclass(frozen=True)
class CondensedPassage:
    doc_id: str
    text: str
    fragments_used: tuple[Fragment, ...]
    token_count: int


def fragment(
    doc: Document, k_frag: int, analyzer: Analyzer | None = None
) -> list[Fragment]:
    """Split ``doc`` into ceil(token_count / k_frag) contiguous fragments.

    Every fragment except possibly the last holds exactly k_frag tokens;
    together they cover the document's token sequence in order.
    """
    if k_frag < 1:
        raise ValueError("k_frag must be >= 1")
    analyzer = analyzer or Analyzer()
    tokens = analyzer.tokenize(doc.body)
    fragments = []
    for start in range(0, len(tokens), k_frag):
        slice_ = tokens[start : start + k_frag]
        fragments.append(
            Fragment(
                doc_id=doc.doc_id,
                frag_index=len(fragments),
                text=doc.body[slice_[0].char_start : slice_[-1].char_end],
                token_start=start,
                token_end=start + len(slice_),
                char_start=slice_[0].char_start,
                char_end=slice_[-1].char_end,
                terms=tuple(t.text for t in slice_),
            )
        )
    return fragments


def score_fragments(
    query_terms: list[str],
    fragments: list[Fragment],
    k1: float = DEFAULT_K1,
    b: float = DEFAULT_B,
) -> list[Fragment]:
    """BM25-score each fragment as a document of the fragment mini-corpus.

    Statistics are local to the given fragment set: N is the number of
    fragments, document frequency counts fragments containing the term,
    and the length norm uses the mean fragment length.
    """
    if not fragments:
        return []
    n = len(fragments)
    avg_len = sum(f.token_count for f in fragments) / n
    unique_terms = sorted(set(query_terms))
    dfs = {
        t: sum(1 for f in fragments if t in f.terms) for t in unique_terms
    }
    scored = []
    for frag in fragments:
        score = 0.0
        if avg_len > 0:
            for term in unique_terms:
                df = dfs[term]
                if df == 0:
                    continue
                tf = frag.terms.count(term)
                if tf == 0:
                    continue
                idf = log(1 + (n - df + 0.5) / (df + 0.5))
                norm = k1 * (1 - b + b * frag.token_count / avg_len)
                score += idf * tf * (k1 + 1) / (tf + norm)
        scored.append(replace(frag, score=score))
    return scored


def condense(
    doc: Document,
    query_terms: list[str],
    params: RelSnipParams,
    analyzer: Analyzer | None = None,
    k1: float = DEFAULT_K1,
    b: float = DEFAULT_B,
) -> CondensedPassage:
    """Keep the top-n fragments by score and reassemble them in document
    order, joined by single newlines.

    Ties go to the earlier fragment. A document that already fits in n
    fragments passes through verbatim.
    """
    scored = score_fragments(
        query_terms, fragment(doc, params.k_frag, analyzer), k1=k1, b=b
    )
    if len(scored) <= params.n:
        return CondensedPassage(
            doc_id=doc.doc_id,
            text=doc.body,
            fragments_used=tuple(scored),
            token_count=sum(f.token_count for f in scored),
        )
    by_score = sorted(scored, key=lambda f: (-f.score, f.frag_index))
    kept = sorted(by_score[: params.n], key=lambda f: f.frag_index)
    return CondensedPassage(
        doc_id=doc.doc_id,
        text="\n".join(f.text for f in kept),
        fragments_used=tuple(kept),
        token_count=sum(f.token_count for f in kept),
    )


def match_offsets(
    frag: Fragment, query_terms: set[str], analyzer: Analyzer | None = None
) -> list[tuple[int, int]]:
    """Char offsets (relative to fragment text) of tokens matching any of
    ``query_terms``. Used to render highlight marks."""
    analyzer = analyzer or Analyzer()
    return [
        (t.char_start, t.char_end)
        for t in analyzer.tokenize(frag.text)
        if t.text in query_terms
    ]
