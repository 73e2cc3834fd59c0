from datetime import datetime, timezone

import pytest

from newslens.ingest import Article
from newslens.sentiment import SentimentLexicon
from newslens.store import Store

FIXED_NOW = datetime(2026, 8, 1, 12, 0, 0, tzinfo=timezone.utc)


@pytest.fixture
def lexicon():
    """Small exact-valued lexicon so rule arithmetic can be hand-traced."""
    return SentimentLexicon(
        entries={"good": 1.9, "superb": 2.1, "bad": -2.5, "great": 3.1, "terrible": -2.8},
        boosters={"very": 0.293, "slightly": -0.293},
        negators=frozenset({"not", "never"}),
    )


@pytest.fixture
def store():
    s = Store()
    yield s
    s.close()


def make_article(
    url: str,
    paragraphs: list[str],
    title: str = "Untitled",
    media_name: str = "Slate",
    media_url: str = "https://slate.example",
    now: datetime = FIXED_NOW,
) -> Article:
    return Article(
        url=url,
        title=title,
        paragraphs=paragraphs,
        media_name=media_name,
        media_url=media_url,
        modified_at=now,
        fetched_at=now,
    )


@pytest.fixture
def article_factory():
    return make_article
