from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from spanqa.analysis import Analyzer
from spanqa.index import Document, Index, ingest


@pytest.fixture(scope="session")
def analyzer() -> Analyzer:
    return Analyzer()


@pytest.fixture(scope="session")
def fixture_docs() -> list[Document]:
    return [
        Document(doc_id="d1", title="", body="apple makes the mac"),
        Document(doc_id="d2", title="", body="bananas are fruit"),
        Document(doc_id="d3", title="", body="apple fruit orchard"),
    ]


@pytest.fixture(scope="session")
def fixture_index(fixture_docs) -> Index:
    return ingest(fixture_docs)


@pytest.fixture(scope="session")
def demo_docs() -> list[Document]:
    return [
        Document(
            doc_id="mac",
            title="Macintosh",
            body=(
                "steve jobs and steve wozniak founded apple. "
                "the company created the macintosh, a personal computer "
                "sold as the mac. the mac shipped with a mouse."
            ),
        ),
        Document(
            doc_id="orchard",
            title="Apples",
            body=(
                "an apple is a sweet fruit grown in an orchard. "
                "apple trees need water and sun to grow fruit."
            ),
        ),
        Document(
            doc_id="bananas",
            title="Bananas",
            body="bananas are long yellow fruit rich in potassium.",
        ),
        Document(
            doc_id="search",
            title="Search engines",
            body=(
                "a search engine ranks documents for a query. "
                "an inverted index maps terms to documents."
            ),
        ),
    ]


@pytest.fixture(scope="session")
def demo_index(demo_docs) -> Index:
    return ingest(demo_docs)
