import random

import pytest

from newslens.errors import ConstraintViolation, InvalidFilter
from newslens.ner import Category, EntityMention
from newslens.sentiment import Scope, SentimentScore
from newslens.store import CSV_FIELDS, QueryFilter

from conftest import make_article


def score(scope, tool="lexrule-1", p=None, s=None, compound=0.25):
    return SentimentScore(
        scope=scope,
        paragraph_index=p,
        sentence_index=s,
        compound=compound,
        five_class=3,
        tool=tool,
    )


def mention(surface="Nancy Pelosi", p=0, s=0, start=0, tagger="builtin"):
    return EntityMention(
        surface=surface,
        category=Category.PERSON,
        char_start=start,
        char_end=start + len(surface),
        paragraph_index=p,
        sentence_index=s,
        tagger=tagger,
    )


def seed_article(store, url="https://slate.example/a1", paragraphs=None):
    art = make_article(url, paragraphs or ["Nancy Pelosi visited Paris today."])
    return store.upsert_article(art).article_id


def full_scores():
    return [
        score(Scope.SENTENCE, p=0, s=0),
        score(Scope.PARAGRAPH, p=0),
        score(Scope.ARTICLE),
    ]


class TestUpsertArticle:
    def test_fresh_url_inserts(self, store):
        result = store.upsert_article(make_article("https://x.example/a", ["Text here."]))
        assert result.is_new and not result.was_replacement

    def test_same_url_replaces_in_place(self, store):
        first = store.upsert_article(make_article("https://x.example/a", ["Old."], title="Old"))
        second = store.upsert_article(make_article("https://x.example/a", ["New."], title="New"))
        assert second.article_id == first.article_id
        assert second.was_replacement and not second.is_new
        assert store.article_paragraphs(first.article_id) == ["New."]

    def test_distinct_urls_distinct_ids(self, store):
        a = store.upsert_article(make_article("https://x.example/a", ["One."]))
        b = store.upsert_article(make_article("https://x.example/b", ["Two."]))
        assert a.article_id != b.article_id

    def test_identical_payload_touches_only_fetched_at(self, store):
        from datetime import timedelta

        from conftest import FIXED_NOW

        art = make_article("https://x.example/a", ["Same text."], title="Same")
        first = store.upsert_article(art)
        later = make_article(
            "https://x.example/a", ["Same text."], title="Same",
            now=FIXED_NOW + timedelta(hours=2),
        )
        second = store.upsert_article(later)
        assert second.article_id == first.article_id
        assert not second.was_replacement and not second.is_new
        row = store._conn.execute(
            "SELECT modified_at, fetched_at FROM article WHERE id = ?", (first.article_id,)
        ).fetchone()
        assert row["modified_at"] == FIXED_NOW.isoformat()
        assert row["fetched_at"] == (FIXED_NOW + timedelta(hours=2)).isoformat()

    def test_replacement_drops_derived_rows(self, store):
        article_id = seed_article(store)
        entity_id = store.upsert_entity("Nancy Pelosi", Category.PERSON)
        store.persist_article_bundle(article_id, full_scores(), [(mention(), entity_id)])
        store.upsert_article(
            make_article("https://slate.example/a1", ["Different body."], title="Changed")
        )
        n = store._conn.execute("SELECT COUNT(*) AS n FROM sentiment").fetchone()["n"]
        m = store._conn.execute("SELECT COUNT(*) AS n FROM article_entity").fetchone()["n"]
        assert (n, m) == (0, 0)
        assert store.validate_integrity() == []

    def test_at_most_one_article_per_url(self, store):
        rng = random.Random(7)
        urls = [f"https://x.example/{i}" for i in range(10)]
        for step in range(200):
            url = rng.choice(urls)
            store.upsert_article(make_article(url, [f"Body {rng.randrange(3)}."]))
        assert store.article_count() == 10
        assert store.validate_integrity() == []


class TestPersistBundle:
    def test_counting_contract(self, store):
        article_id = seed_article(store)
        entity_id = store.upsert_entity("Nancy Pelosi", Category.PERSON)
        scores = full_scores()
        links = [(mention(), entity_id)]
        assert store.persist_article_bundle(article_id, scores, links) is True
        n = store._conn.execute("SELECT COUNT(*) AS n FROM sentiment").fetchone()["n"]
        m = store._conn.execute("SELECT COUNT(*) AS n FROM article_entity").fetchone()["n"]
        assert n == len(scores)
        assert m == len(links)

    def test_unknown_entity_atomic_rollback(self, store):
        article_id = seed_article(store)
        with pytest.raises(ConstraintViolation):
            store.persist_article_bundle(article_id, full_scores(), [(mention(), 999)])
        n = store._conn.execute("SELECT COUNT(*) AS n FROM sentiment").fetchone()["n"]
        m = store._conn.execute("SELECT COUNT(*) AS n FROM article_entity").fetchone()["n"]
        assert (n, m) == (0, 0)

    def test_repersist_swaps_generations(self, store):
        article_id = seed_article(store)
        entity_id = store.upsert_entity("Nancy Pelosi", Category.PERSON)
        store.persist_article_bundle(article_id, full_scores(), [(mention(), entity_id)])
        store.persist_article_bundle(
            article_id, [score(Scope.ARTICLE, compound=0.9)], []
        )
        rows = store._conn.execute("SELECT score FROM sentiment").fetchall()
        assert [r["score"] for r in rows] == [0.9]


class TestUpsertEntity:
    def test_exact_match_reuses(self, store):
        a = store.upsert_entity("Nancy Pelosi", Category.PERSON)
        b = store.upsert_entity("Nancy Pelosi", Category.PERSON)
        assert a == b

    def test_category_splits(self, store):
        a = store.upsert_entity("Pelosi", Category.PERSON)
        b = store.upsert_entity("Pelosi", Category.ORGANIZATION)
        assert a != b


class TestQueryRows:
    def seed(self, store):
        article_id = seed_article(store)
        entity_id = store.upsert_entity("Nancy Pelosi", Category.PERSON)
        store.persist_article_bundle(article_id, full_scores(), [(mention(), entity_id)])
        return article_id, entity_id

    def test_empty_store(self, store):
        assert store.query_rows(QueryFilter(entity_pattern="anything")) == []

    def test_substring_semantics(self, store):
        self.seed(store)
        full = store.query_rows(QueryFilter(entity_pattern="Pelosi"))
        part = store.query_rows(QueryFilter(entity_pattern="Pel"))
        ci = store.query_rows(QueryFilter(entity_pattern="pelosi"))
        assert len(full) == 3  # one link x three scopes
        assert part == full
        assert ci == full

    def test_source_filter(self, store):
        self.seed(store)
        assert store.query_rows(QueryFilter(sources=frozenset({"BBC News"}))) == []
        assert len(store.query_rows(QueryFilter(sources=frozenset({"Slate"})))) == 3

    def test_scope_filter_covers_mention(self, store):
        self.seed(store)
        rows = store.query_rows(QueryFilter(scope=Scope.SENTENCE))
        assert len(rows) == 1
        assert rows[0].paragraph == 0 and rows[0].sentence == 0
        rows = store.query_rows(QueryFilter(scope=Scope.ARTICLE))
        assert rows[0].paragraph is None and rows[0].sentence is None

    def test_date_filter(self, store):
        self.seed(store)
        assert len(store.query_rows(QueryFilter(date_from="2026-08-01", date_to="2026-08-01"))) == 3
        assert store.query_rows(QueryFilter(date_to="2026-07-31")) == []
        with pytest.raises(InvalidFilter):
            store.query_rows(QueryFilter(date_from="2026-08-02", date_to="2026-08-01"))

    def test_row_shape_matches_result_fields(self, store):
        self.seed(store)
        row = store.query_rows(QueryFilter())[0]
        assert len(row.as_tuple()) == 13
        assert row.type == "PER"
        assert row.media_name == "Slate"
        assert row.date == "2026-08-01"

    def test_read_only(self, store):
        self.seed(store)
        before = store.state_hash()
        store.query_rows(QueryFilter(entity_pattern="Pelosi"))
        assert store.state_hash() == before

    def test_multiplicity_no_optional_filters(self, store):
        # second mention in a second sentence: each link gets its 3 scopes
        article_id = store.upsert_article(
            make_article("https://x.example/m", ["First one. Second one."])
        ).article_id
        entity_id = store.upsert_entity("Nancy Pelosi", Category.PERSON)
        scores = [
            score(Scope.SENTENCE, p=0, s=0),
            score(Scope.SENTENCE, p=0, s=1),
            score(Scope.PARAGRAPH, p=0),
            score(Scope.ARTICLE),
        ]
        links = [
            (mention(p=0, s=0, start=0), entity_id),
            (mention(p=0, s=1, start=20), entity_id),
        ]
        store.persist_article_bundle(article_id, scores, links)
        rows = store.query_rows(QueryFilter())
        assert len(rows) == 2 * 3

    def test_stable_total_order(self, store):
        self.seed(store)
        a = [r.as_tuple() for r in store.query_rows(QueryFilter())]
        b = [r.as_tuple() for r in store.query_rows(QueryFilter())]
        assert a == b
        scopes = [(r.paragraph, r.sentence) for r in store.query_rows(QueryFilter())]
        assert scopes == [(None, None), (0, None), (0, 0)]


def test_csv_fields_fixed():
    assert CSV_FIELDS == (
        "id", "entity", "entity_id", "type", "date", "url", "ner_tool",
        "paragraph", "sentence", "sentiment_score", "sentiment_tool",
        "media_name", "media_url",
    )
