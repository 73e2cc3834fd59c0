"""Deterministic store fixtures shared by service, analytics and
acceptance tests. Values are hand-picked so golden files stay stable."""

from datetime import datetime, timezone
from pathlib import Path

from newslens.ingest import Article
from newslens.ner import Category, EntityMention
from newslens.sentiment import Scope, SentimentScore
from newslens.store import Store

BODY_SENTINEL = "XBODYSENTINEL93X"

_PAGE_BODIES = {
    "slate": [
        ("pelosi-visit", "Pelosi Visits Paris",
         ["Nancy Pelosi visited Paris on Monday. {s}", "Ms. Pelosi praised the hosts."]),
        ("fbi-report", "Crime Report Released",
         ["A report by the F.B.I. showed violent crime rose. {s}",
          "The Federal Bureau of Investigation declined further comment."]),
        ("serrano-retires", "Serrano Retires",
         ["Jose Serrano announced a wonderful retirement. {s}"]),
        ("ocasio-cortez", "Freshman Profile",
         ["Alexandria Ocasio-Cortez spoke. Later, Ocasio-Cortez smiled. {s}"]),
    ],
    "bbc": [
        ("london-crime", "London Crime Falls",
         ["Crime in London fell sharply. {s}", "The Police Department cheered."]),
        ("paris-summit", "Paris Summit",
         ["Leaders met in Paris for a peace summit. {s}"]),
        ("schumer-speech", "Schumer Speaks",
         ["Chuck Schumer gave a hopeful speech. {s}"]),
    ],
    "atlantic": [
        ("pelosi-profile", "The Speaker",
         ["Nancy Pelosi led the House of Representatives. {s}",
          "Pelosi faced terrible attacks."]),
        ("climate", "Climate Worries",
         ["Scientists fear a climate disaster. {s}"]),
        ("jordan-feature", "Two Jordans",
         ["Michael Jordan met James Jordan. Jordan smiled. {s}"]),
    ],
}


def build_feed_world(root: Path) -> Path:
    """Write three file:// RSS sources (10 articles) plus a config file.

    Returns the config path; the store lands at root/corpus.db.
    """
    root = Path(root)
    (root / "pages").mkdir(parents=True, exist_ok=True)
    (root / "feeds").mkdir(exist_ok=True)
    sources = {"slate": "Slate", "bbc": "BBC News", "atlantic": "The Atlantic"}
    config_lines = ["[store]", f"db = {root / 'corpus.db'}", ""]
    for key, media_name in sources.items():
        items = []
        for slug, title, paragraphs in _PAGE_BODIES[key]:
            page = root / "pages" / f"{key}-{slug}.html"
            body = "".join(
                f"<p>{p.format(s=BODY_SENTINEL)}</p>" for p in paragraphs
            )
            page.write_text(
                f"<html><head><title>{title}</title></head>"
                f"<body><article><h1>{title}</h1>{body}</article></body></html>",
                encoding="utf-8",
            )
            items.append(
                f"<item><title>{title}</title><link>{page.as_uri()}</link></item>"
            )
        feed = root / "feeds" / f"{key}.xml"
        feed.write_text(
            f"<rss version='2.0'><channel><title>{media_name}</title>"
            + "".join(items) + "</channel></rss>",
            encoding="utf-8",
        )
        config_lines += [
            f"[source:{media_name}]",
            f"feed_url = {feed.as_uri()}",
            f"media_url = https://{key}.example",
            "poll_interval = 7200",
            "",
        ]
    config = root / "qc.ini"
    config.write_text("\n".join(config_lines), encoding="utf-8")
    return config


def _article(url, title, media, media_url, day, paragraphs):
    stamp = datetime(2026, 7, day, 9, 30, tzinfo=timezone.utc)
    return Article(
        url=url,
        title=title,
        paragraphs=paragraphs,
        media_name=media,
        media_url=media_url,
        modified_at=stamp,
        fetched_at=stamp,
    )


def _score(scope, tool, compound, five, p=None, s=None):
    return SentimentScore(
        scope=scope, paragraph_index=p, sentence_index=s,
        compound=compound, five_class=five, tool=tool,
    )


def _mention(surface, category, p, s, start, tagger="builtin"):
    return EntityMention(
        surface=surface, category=category,
        char_start=start, char_end=start + len(surface),
        paragraph_index=p, sentence_index=s, tagger=tagger,
    )


def seed_search_store(store: Store) -> None:
    """Two articles, two media, two entities, hand-picked sentiment rows.

    Article bodies carry BODY_SENTINEL so tests can prove no endpoint
    ever leaks body text.
    """
    a1 = store.upsert_article(
        _article(
            "https://slate.example/pelosi-visits",
            "Pelosi Visits Paris",
            "Slate",
            "https://slate.example",
            30,
            [f"Nancy Pelosi visited Paris. {BODY_SENTINEL}", f"More text. {BODY_SENTINEL}"],
        )
    ).article_id
    a2 = store.upsert_article(
        _article(
            "https://bbc.example/pelosi-returns",
            "Pelosi Returns",
            "BBC News",
            "https://bbc.example",
            31,
            [f"Pelosi returned home. {BODY_SENTINEL}"],
        )
    ).article_id

    pelosi = store.upsert_entity("Nancy Pelosi", Category.PERSON)
    paris = store.upsert_entity("Paris", Category.LOCATION)

    store.persist_article_bundle(
        a1,
        [
            _score(Scope.SENTENCE, "lexrule-1", 0.25, 3, p=0, s=0),
            _score(Scope.PARAGRAPH, "lexrule-1", 0.1, 3, p=0),
            _score(Scope.ARTICLE, "lexrule-1", -0.04, 2),
        ],
        [
            (_mention("Nancy Pelosi", Category.PERSON, 0, 0, 0), pelosi),
            (_mention("Paris", Category.LOCATION, 0, 0, 21), paris),
        ],
    )
    store.persist_article_bundle(
        a2,
        [
            _score(Scope.SENTENCE, "lexrule-1", -0.3, 1, p=0, s=0),
            _score(Scope.PARAGRAPH, "lexrule-1", -0.2, 1, p=0),
            _score(Scope.ARTICLE, "lexrule-1", 0.5, 3),
        ],
        [(_mention("Pelosi", Category.PERSON, 0, 0, 0), pelosi)],
    )
