"""Relational persistence: media, article, entity, article_entity and
sentiment tables over SQLite.

Single-writer, multi-reader: every write runs inside one serialized
transaction, so readers never observe a partial article bundle.
"""

from __future__ import annotations

import hashlib
import json
import sqlite3
import threading
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, NamedTuple, Sequence

from .errors import ConstraintViolation, InvalidFilter, StorageUnavailable, UnknownEntity
from .ner import Category, EntityMention
from .sentiment import Scope, SentimentScore

if TYPE_CHECKING:
    from .ingest import Article

__all__ = ["Store", "QueryFilter", "ResultRow", "UpsertResult", "CSV_FIELDS"]

_SCHEMA = """
CREATE TABLE IF NOT EXISTS media (
    id   INTEGER PRIMARY KEY,
    name TEXT NOT NULL UNIQUE,
    url  TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS article (
    id           INTEGER PRIMARY KEY,
    media_id     INTEGER NOT NULL REFERENCES media(id),
    url          TEXT NOT NULL UNIQUE,
    title        TEXT NOT NULL,
    published_at TEXT,
    modified_at  TEXT NOT NULL,
    fetched_at   TEXT NOT NULL,
    paragraphs   TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS entity (
    id        INTEGER PRIMARY KEY,
    full_name TEXT NOT NULL,
    category  TEXT NOT NULL CHECK (category IN ('PERSON', 'LOCATION', 'ORGANIZATION')),
    UNIQUE (full_name, category)
);
CREATE TABLE IF NOT EXISTS article_entity (
    id              INTEGER PRIMARY KEY AUTOINCREMENT,
    article_id      INTEGER NOT NULL REFERENCES article(id) ON DELETE CASCADE,
    entity_id       INTEGER NOT NULL REFERENCES entity(id),
    tagger          TEXT NOT NULL,
    surface         TEXT NOT NULL,
    paragraph_index INTEGER NOT NULL,
    sentence_index  INTEGER NOT NULL,
    char_start      INTEGER NOT NULL,
    char_end        INTEGER NOT NULL,
    CHECK (char_end > char_start)
);
CREATE TABLE IF NOT EXISTS sentiment (
    id              INTEGER PRIMARY KEY AUTOINCREMENT,
    article_id      INTEGER NOT NULL REFERENCES article(id) ON DELETE CASCADE,
    scope           TEXT NOT NULL CHECK (scope IN ('ARTICLE', 'PARAGRAPH', 'SENTENCE')),
    paragraph_index INTEGER,
    sentence_index  INTEGER,
    score           REAL NOT NULL CHECK (score >= -1.0 AND score <= 1.0),
    five_class      INTEGER NOT NULL CHECK (five_class BETWEEN 0 AND 4),
    tool            TEXT NOT NULL,
    CHECK (
        (scope = 'ARTICLE' AND paragraph_index IS NULL AND sentence_index IS NULL)
        OR (scope = 'PARAGRAPH' AND paragraph_index IS NOT NULL AND sentence_index IS NULL)
        OR (scope = 'SENTENCE' AND paragraph_index IS NOT NULL AND sentence_index IS NOT NULL)
    )
);
CREATE INDEX IF NOT EXISTS idx_article_entity_article ON article_entity(article_id);
CREATE INDEX IF NOT EXISTS idx_article_entity_entity ON article_entity(entity_id);
CREATE INDEX IF NOT EXISTS idx_sentiment_article ON sentiment(article_id);
CREATE INDEX IF NOT EXISTS idx_entity_name ON entity(full_name);
"""

CSV_FIELDS = (
    "id", "entity", "entity_id", "type", "date", "url", "ner_tool",
    "paragraph", "sentence", "sentiment_score", "sentiment_tool",
    "media_name", "media_url",
)

_TYPE_CODES = {
    Category.PERSON: "PER",
    Category.LOCATION: "LOC",
    Category.ORGANIZATION: "ORG",
}


class UpsertResult(NamedTuple):
    article_id: int
    was_replacement: bool
    is_new: bool


@dataclass(frozen=True)
class ResultRow:
    """One search-result record; exactly these 13 fields in this order."""

    id: int
    entity: str
    entity_id: int
    type: str
    date: str
    url: str
    ner_tool: str
    paragraph: int | None
    sentence: int | None
    sentiment_score: float
    sentiment_tool: str
    media_name: str
    media_url: str

    def as_tuple(self) -> tuple:
        return tuple(getattr(self, f) for f in CSV_FIELDS)


@dataclass(frozen=True)
class QueryFilter:
    entity_pattern: str = ""
    sources: frozenset[str] | None = None  # None = all
    date_from: str | None = None  # YYYY-MM-DD
    date_to: str | None = None
    tagger: str | None = None
    tool: str | None = None
    scope: Scope | None = None


def _pattern_match(full_name: str, pattern: str) -> int:
    return 1 if pattern.casefold() in full_name.casefold() else 0


class Store:
    """One SQLite-backed corpus store."""

    def __init__(self, path: str = ":memory:"):
        self.path = path
        try:
            self._conn = sqlite3.connect(path, check_same_thread=False)
        except sqlite3.Error as exc:
            raise StorageUnavailable(f"cannot open database {path!r}: {exc}") from exc
        self._conn.row_factory = sqlite3.Row
        self._conn.execute("PRAGMA foreign_keys = ON")
        self._conn.create_function("pattern_match", 2, _pattern_match, deterministic=True)
        self._lock = threading.RLock()
        self.migrate()

    def close(self) -> None:
        self._conn.close()

    def migrate(self) -> None:
        with self._lock, self._conn:
            self._conn.executescript(_SCHEMA)

    def _rows(self, sql: str, params: Sequence = ()) -> list[sqlite3.Row]:
        with self._lock:
            return self._conn.execute(sql, params).fetchall()

    def _one(self, sql: str, params: Sequence = ()) -> sqlite3.Row | None:
        with self._lock:
            return self._conn.execute(sql, params).fetchone()

    # -- media ---------------------------------------------------------

    def upsert_media(self, name: str, url: str) -> int:
        if not name:
            raise ConstraintViolation("media name must be non-empty")
        with self._lock, self._conn:
            row = self._conn.execute("SELECT id FROM media WHERE name = ?", (name,)).fetchone()
            if row is not None:
                self._conn.execute("UPDATE media SET url = ? WHERE id = ?", (url, row["id"]))
                return row["id"]
            cur = self._conn.execute("INSERT INTO media (name, url) VALUES (?, ?)", (name, url))
            return cur.lastrowid

    def media(self) -> list[dict]:
        rows = self._rows("SELECT name, url FROM media ORDER BY name")
        return [{"name": r["name"], "url": r["url"]} for r in rows]

    # -- articles ------------------------------------------------------

    def upsert_article(self, article: "Article") -> UpsertResult:
        """Insert, or replace in place on URL collision.

        An identical payload only refreshes fetched_at; a changed one
        overwrites the stored fields and drops the article's derived
        sentiment and mention rows in the same transaction.
        """
        if not article.url:
            raise ConstraintViolation("article url must be non-empty")
        paragraphs_json = json.dumps(list(article.paragraphs))
        published = article.published_at.isoformat() if article.published_at else None
        modified = article.modified_at.isoformat()
        fetched = article.fetched_at.isoformat()
        try:
            with self._lock, self._conn:
                media_id = article.media_id
                if media_id is None:
                    media_id = self._upsert_media_tx(article.media_name, article.media_url)
                row = self._conn.execute(
                    "SELECT id, title, published_at, paragraphs FROM article WHERE url = ?",
                    (article.url,),
                ).fetchone()
                if row is None:
                    cur = self._conn.execute(
                        "INSERT INTO article (media_id, url, title, published_at, modified_at,"
                        " fetched_at, paragraphs) VALUES (?, ?, ?, ?, ?, ?, ?)",
                        (media_id, article.url, article.title, published, modified, fetched,
                         paragraphs_json),
                    )
                    return UpsertResult(cur.lastrowid, was_replacement=False, is_new=True)
                same = (
                    row["title"] == article.title
                    and row["paragraphs"] == paragraphs_json
                    and row["published_at"] == published
                )
                if same:
                    self._conn.execute(
                        "UPDATE article SET fetched_at = ? WHERE id = ?", (fetched, row["id"])
                    )
                    return UpsertResult(row["id"], was_replacement=False, is_new=False)
                self._conn.execute(
                    "UPDATE article SET media_id = ?, title = ?, published_at = ?,"
                    " modified_at = ?, fetched_at = ?, paragraphs = ? WHERE id = ?",
                    (media_id, article.title, published, modified, fetched, paragraphs_json,
                     row["id"]),
                )
                self._conn.execute("DELETE FROM sentiment WHERE article_id = ?", (row["id"],))
                self._conn.execute("DELETE FROM article_entity WHERE article_id = ?", (row["id"],))
                return UpsertResult(row["id"], was_replacement=True, is_new=False)
        except sqlite3.IntegrityError as exc:
            raise ConstraintViolation(str(exc)) from exc
        except sqlite3.Error as exc:
            raise StorageUnavailable(str(exc)) from exc

    def _upsert_media_tx(self, name: str, url: str) -> int:
        row = self._conn.execute("SELECT id FROM media WHERE name = ?", (name,)).fetchone()
        if row is not None:
            return row["id"]
        return self._conn.execute(
            "INSERT INTO media (name, url) VALUES (?, ?)", (name, url)
        ).lastrowid

    def article_paragraphs(self, article_id: int) -> list[str]:
        row = self._one("SELECT paragraphs FROM article WHERE id = ?", (article_id,))
        if row is None:
            raise ConstraintViolation(f"no article {article_id}")
        return json.loads(row["paragraphs"])

    def article_count(self) -> int:
        return self._one("SELECT COUNT(*) AS n FROM article")["n"]

    # -- entities ------------------------------------------------------

    def upsert_entity(self, full_name: str, category: Category) -> int:
        """Registry op used by cross-article resolution: exact-match merge."""
        if not full_name:
            raise ConstraintViolation("entity full_name must be non-empty")
        with self._lock, self._conn:
            row = self._conn.execute(
                "SELECT id FROM entity WHERE full_name = ? AND category = ?",
                (full_name, category.value),
            ).fetchone()
            if row is not None:
                return row["id"]
            cur = self._conn.execute(
                "INSERT INTO entity (full_name, category) VALUES (?, ?)",
                (full_name, category.value),
            )
            return cur.lastrowid

    def entity_catalog(self) -> list[tuple[int, str, Category]]:
        rows = self._rows("SELECT id, full_name, category FROM entity ORDER BY id")
        return [(r["id"], r["full_name"], Category(r["category"])) for r in rows]

    def entity_exists(self, entity_id: int) -> bool:
        return self._one("SELECT 1 FROM entity WHERE id = ?", (entity_id,)) is not None

    # -- bundles -------------------------------------------------------

    def persist_article_bundle(
        self,
        article_id: int,
        scores: Sequence[SentimentScore],
        links: Sequence[tuple[EntityMention, int]],
    ) -> bool:
        """All-or-nothing write of one article's derived rows.

        Prior sentiment and mention rows for the article are dropped in
        the same transaction, so a replaced article never mixes row
        generations.
        """
        try:
            with self._lock, self._conn:
                exists = self._conn.execute(
                    "SELECT 1 FROM article WHERE id = ?", (article_id,)
                ).fetchone()
                if exists is None:
                    raise ConstraintViolation(f"no article {article_id}")
                self._conn.execute("DELETE FROM sentiment WHERE article_id = ?", (article_id,))
                self._conn.execute(
                    "DELETE FROM article_entity WHERE article_id = ?", (article_id,)
                )
                self._conn.executemany(
                    "INSERT INTO sentiment (article_id, scope, paragraph_index, sentence_index,"
                    " score, five_class, tool) VALUES (?, ?, ?, ?, ?, ?, ?)",
                    [
                        (article_id, s.scope.value, s.paragraph_index, s.sentence_index,
                         s.compound, s.five_class, s.tool)
                        for s in scores
                    ],
                )
                self._conn.executemany(
                    "INSERT INTO article_entity (article_id, entity_id, tagger, surface,"
                    " paragraph_index, sentence_index, char_start, char_end)"
                    " VALUES (?, ?, ?, ?, ?, ?, ?, ?)",
                    [
                        (article_id, entity_id, m.tagger, m.surface, m.paragraph_index,
                         m.sentence_index, m.char_start, m.char_end)
                        for m, entity_id in links
                    ],
                )
            return True
        except ConstraintViolation:
            raise
        except sqlite3.IntegrityError as exc:
            raise ConstraintViolation(str(exc)) from exc
        except sqlite3.Error as exc:
            raise StorageUnavailable(str(exc)) from exc

    # -- search --------------------------------------------------------

    def query_rows(self, flt: QueryFilter) -> list[ResultRow]:
        """Table 1 result rows: one per (mention link x covering sentiment row).

        Stable total order: (date, article id, entity id, scope,
        paragraph, sentence, ner tool, sentiment tool, link id).
        """
        if flt.date_from and flt.date_to and flt.date_from > flt.date_to:
            raise InvalidFilter(f"date_from {flt.date_from} > date_to {flt.date_to}")
        sql = [
            "SELECT ae.id AS link_id, e.full_name, e.id AS entity_id, e.category,",
            " date(a.modified_at) AS day, a.url, ae.tagger,",
            " s.paragraph_index AS p, s.sentence_index AS sn, s.score, s.tool,",
            " m.name AS media_name, m.url AS media_url, s.scope",
            " FROM article_entity ae",
            " JOIN entity e ON e.id = ae.entity_id",
            " JOIN article a ON a.id = ae.article_id",
            " JOIN media m ON m.id = a.media_id",
            " JOIN sentiment s ON s.article_id = ae.article_id AND (",
            "   (s.scope = 'ARTICLE')",
            "   OR (s.scope = 'PARAGRAPH' AND s.paragraph_index = ae.paragraph_index)",
            "   OR (s.scope = 'SENTENCE' AND s.paragraph_index = ae.paragraph_index",
            "       AND s.sentence_index = ae.sentence_index))",
            " WHERE 1=1",
        ]
        params: list = []
        if flt.entity_pattern:
            sql.append(" AND pattern_match(e.full_name, ?) = 1")
            params.append(flt.entity_pattern)
        if flt.sources is not None:
            placeholders = ",".join("?" for _ in flt.sources)
            sql.append(f" AND m.name IN ({placeholders})")
            params.extend(sorted(flt.sources))
        if flt.date_from:
            sql.append(" AND date(a.modified_at) >= date(?)")
            params.append(flt.date_from)
        if flt.date_to:
            sql.append(" AND date(a.modified_at) <= date(?)")
            params.append(flt.date_to)
        if flt.tagger:
            sql.append(" AND ae.tagger = ?")
            params.append(flt.tagger)
        if flt.tool:
            sql.append(" AND s.tool = ?")
            params.append(flt.tool)
        if flt.scope:
            sql.append(" AND s.scope = ?")
            params.append(flt.scope.value)
        sql.append(
            " ORDER BY day, a.id, e.id,"
            " CASE s.scope WHEN 'ARTICLE' THEN 0 WHEN 'PARAGRAPH' THEN 1 ELSE 2 END,"
            " s.paragraph_index, s.sentence_index, ae.tagger, s.tool, ae.id"
        )
        try:
            rows = self._rows("".join(sql), params)
        except sqlite3.Error as exc:
            raise StorageUnavailable(str(exc)) from exc
        return [
            ResultRow(
                id=r["link_id"],
                entity=r["full_name"],
                entity_id=r["entity_id"],
                type=_TYPE_CODES[Category(r["category"])],
                date=r["day"],
                url=r["url"],
                ner_tool=r["tagger"],
                paragraph=r["p"],
                sentence=r["sn"],
                sentiment_score=r["score"],
                sentiment_tool=r["tool"],
                media_name=r["media_name"],
                media_url=r["media_url"],
            )
            for r in rows
        ]

    def ner_tools(self) -> list[str]:
        rows = self._rows("SELECT DISTINCT tagger FROM article_entity ORDER BY tagger")
        return [r["tagger"] for r in rows]

    def sentiment_tools(self) -> list[str]:
        rows = self._rows("SELECT DISTINCT tool FROM sentiment ORDER BY tool")
        return [r["tool"] for r in rows]

    # -- analytics support ----------------------------------------------

    def mention_stats(
        self, entity_ids: Iterable[int]
    ) -> list[tuple[int, str, Category, int, int]]:
        """(entity_id, tagger, category, link count, distinct article count)."""
        ids = list(entity_ids)
        if not ids:
            return []
        placeholders = ",".join("?" for _ in ids)
        rows = self._rows(
            f"""
            SELECT ae.entity_id, ae.tagger, e.category,
                   COUNT(*) AS links, COUNT(DISTINCT ae.article_id) AS articles
            FROM article_entity ae JOIN entity e ON e.id = ae.entity_id
            WHERE ae.entity_id IN ({placeholders})
            GROUP BY ae.entity_id, ae.tagger
            """,
            ids,
        )
        return [
            (r["entity_id"], r["tagger"], Category(r["category"]), r["links"], r["articles"])
            for r in rows
        ]

    def location_link_counts(
        self,
        sources: frozenset[str] | None = None,
        date_from: str | None = None,
        date_to: str | None = None,
    ) -> list[tuple[str, int]]:
        sql = [
            "SELECT e.full_name, COUNT(*) AS n FROM article_entity ae",
            " JOIN entity e ON e.id = ae.entity_id",
            " JOIN article a ON a.id = ae.article_id",
            " JOIN media m ON m.id = a.media_id",
            " WHERE e.category = 'LOCATION'",
        ]
        params: list = []
        if sources is not None:
            placeholders = ",".join("?" for _ in sources)
            sql.append(f" AND m.name IN ({placeholders})")
            params.extend(sorted(sources))
        if date_from:
            sql.append(" AND date(a.modified_at) >= date(?)")
            params.append(date_from)
        if date_to:
            sql.append(" AND date(a.modified_at) <= date(?)")
            params.append(date_to)
        sql.append(" GROUP BY e.id ORDER BY n DESC, e.full_name")
        rows = self._rows("".join(sql), params)
        return [(r["full_name"], r["n"]) for r in rows]

    def articles_linking_entity(
        self,
        entity_id: int,
        sources: frozenset[str] | None = None,
        date_from: str | None = None,
        date_to: str | None = None,
    ) -> list[tuple[int, str]]:
        """(article_id, modified date) for articles linking the entity, by date."""
        if not self.entity_exists(entity_id):
            raise UnknownEntity(f"no entity {entity_id}")
        sql = [
            "SELECT DISTINCT a.id, date(a.modified_at) AS day FROM article_entity ae",
            " JOIN article a ON a.id = ae.article_id",
            " JOIN media m ON m.id = a.media_id",
            " WHERE ae.entity_id = ?",
        ]
        params: list = [entity_id]
        if sources is not None:
            placeholders = ",".join("?" for _ in sources)
            sql.append(f" AND m.name IN ({placeholders})")
            params.extend(sorted(sources))
        if date_from:
            sql.append(" AND date(a.modified_at) >= date(?)")
            params.append(date_from)
        if date_to:
            sql.append(" AND date(a.modified_at) <= date(?)")
            params.append(date_to)
        sql.append(" ORDER BY day, a.id")
        rows = self._rows("".join(sql), params)
        return [(r["id"], r["day"]) for r in rows]

    def entity_link_positions(self, entity_id: int, article_id: int) -> list[tuple[int, int]]:
        rows = self._rows(
            "SELECT paragraph_index, sentence_index FROM article_entity"
            " WHERE entity_id = ? AND article_id = ?",
            (entity_id, article_id),
        )
        return [(r["paragraph_index"], r["sentence_index"]) for r in rows]

    def sentiment_for_article(self, article_id: int, tool: str) -> list[SentimentScore]:
        rows = self._rows(
            "SELECT scope, paragraph_index, sentence_index, score, five_class, tool"
            " FROM sentiment WHERE article_id = ? AND tool = ?",
            (article_id, tool),
        )
        return [
            SentimentScore(
                scope=Scope(r["scope"]),
                paragraph_index=r["paragraph_index"],
                sentence_index=r["sentence_index"],
                compound=r["score"],
                five_class=r["five_class"],
                tool=r["tool"],
                article_id=article_id,
            )
            for r in rows
        ]

    # -- validation ------------------------------------------------------

    def validate_integrity(self) -> list[str]:
        """Full-scan referential/uniqueness check; empty list means clean."""
        problems: list[str] = []
        q = self._one
        for sql, msg in [
            ("SELECT COUNT(*) AS n FROM article a LEFT JOIN media m ON m.id = a.media_id"
             " WHERE m.id IS NULL", "articles with missing media"),
            ("SELECT COUNT(*) AS n FROM article_entity ae LEFT JOIN article a"
             " ON a.id = ae.article_id WHERE a.id IS NULL", "links with missing article"),
            ("SELECT COUNT(*) AS n FROM article_entity ae LEFT JOIN entity e"
             " ON e.id = ae.entity_id WHERE e.id IS NULL", "links with missing entity"),
            ("SELECT COUNT(*) AS n FROM sentiment s LEFT JOIN article a"
             " ON a.id = s.article_id WHERE a.id IS NULL", "sentiment with missing article"),
            ("SELECT COUNT(*) AS n FROM (SELECT url FROM article GROUP BY url"
             " HAVING COUNT(*) > 1)", "duplicate article urls"),
            ("SELECT COUNT(*) AS n FROM (SELECT full_name, category FROM entity"
             " GROUP BY full_name, category HAVING COUNT(*) > 1)", "duplicate entities"),
            ("SELECT COUNT(*) AS n FROM sentiment WHERE NOT ("
             " (scope = 'ARTICLE' AND paragraph_index IS NULL AND sentence_index IS NULL)"
             " OR (scope = 'PARAGRAPH' AND paragraph_index IS NOT NULL AND sentence_index IS NULL)"
             " OR (scope = 'SENTENCE' AND paragraph_index IS NOT NULL"
             "     AND sentence_index IS NOT NULL))", "sentiment scope/index mismatch"),
        ]:
            n = q(sql)["n"]
            if n:
                problems.append(f"{msg}: {n}")
        return problems

    def state_hash(self) -> str:
        """Hash of all table contents; unchanged by read-only operations."""
        digest = hashlib.sha256()
        for table in ("media", "article", "entity", "article_entity", "sentiment"):
            for row in self._rows(f"SELECT * FROM {table} ORDER BY id"):
                digest.update(repr(tuple(row)).encode())
        return digest.hexdigest()
