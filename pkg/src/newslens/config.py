"""INI-style configuration: sources, taggers, data-file paths, options.

Sections: [store], [pipeline], [service], one [source:<media name>] per
feed, one [tagger:<id>] per tagger. Everything has a sensible default;
an empty file runs with the builtin tagger and shipped data files.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

from .ingest import DEFAULT_POLL_INTERVAL, FeedSource
from .ner import (
    BUILTIN_TAGGER_ID,
    Category,
    Gazetteer,
    TaggerSpec,
    default_gazetteer,
    load_gazetteer,
)
from .resolve import AbbreviationCorpus, default_abbreviations, load_abbreviations
from .segment import default_guard, load_guard
from .sentiment import (
    CONTINUOUS_TOOL,
    FIVE_CLASS_TOOL,
    SentimentLexicon,
    default_lexicon,
    load_lexicon,
)

__all__ = ["Config", "load_config"]


@dataclass
class Config:
    db_path: str = ":memory:"
    sources: list[FeedSource] = field(default_factory=list)
    taggers: list[TaggerSpec] = field(default_factory=lambda: [TaggerSpec(BUILTIN_TAGGER_ID)])
    sentiment_tools: tuple[str, ...] = (CONTINUOUS_TOOL, FIVE_CLASS_TOOL)
    default_category: Category = Category.PERSON
    score_title: bool = False  # titles are never scored; flag recorded for provenance
    lexicon_path: str | None = None
    boosters_path: str | None = None
    negators_path: str | None = None
    guard_path: str | None = None
    abbreviations_path: str | None = None
    gazetteer_path: str | None = None
    preview_limit: int = 20
    export_ttl: float = 3600.0
    user_agent: str = "newslens/0.1"

    def lexicon(self) -> SentimentLexicon:
        if self.lexicon_path:
            return load_lexicon(self.lexicon_path, self.boosters_path, self.negators_path)
        return default_lexicon()

    def guard(self) -> frozenset[str]:
        return load_guard(self.guard_path) if self.guard_path else default_guard()

    def gazetteer(self) -> Gazetteer:
        return load_gazetteer(self.gazetteer_path) if self.gazetteer_path else default_gazetteer()

    def abbreviations(self) -> AbbreviationCorpus:
        if self.abbreviations_path:
            return load_abbreviations(self.abbreviations_path)
        return default_abbreviations()


def load_config(path) -> Config:
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise FileNotFoundError(f"config file not found: {path}")
    base = Path(path).resolve().parent

    def resolve(value: str | None) -> str | None:
        if value is None:
            return None
        p = Path(value)
        return str(p if p.is_absolute() else base / p)

    cfg = Config()
    if parser.has_section("store"):
        cfg.db_path = resolve(parser.get("store", "db", fallback=None)) or cfg.db_path
    if parser.has_section("pipeline"):
        sec = parser["pipeline"]
        if "sentiment_tools" in sec:
            cfg.sentiment_tools = tuple(
                t.strip() for t in sec["sentiment_tools"].split(",") if t.strip()
            )
        if "default_category" in sec:
            cfg.default_category = Category(sec["default_category"].strip().upper())
        cfg.score_title = sec.getboolean("score_title", fallback=False)
    if parser.has_section("paths"):
        sec = parser["paths"]
        cfg.lexicon_path = resolve(sec.get("lexicon"))
        cfg.boosters_path = resolve(sec.get("boosters"))
        cfg.negators_path = resolve(sec.get("negators"))
        cfg.guard_path = resolve(sec.get("abbrev_guard"))
        cfg.abbreviations_path = resolve(sec.get("abbreviations"))
        cfg.gazetteer_path = resolve(sec.get("gazetteer"))
    if parser.has_section("service"):
        sec = parser["service"]
        cfg.preview_limit = sec.getint("preview_limit", fallback=cfg.preview_limit)
        cfg.export_ttl = sec.getfloat("export_ttl", fallback=cfg.export_ttl)
    if parser.has_section("ingest"):
        cfg.user_agent = parser.get("ingest", "user_agent", fallback=cfg.user_agent)

    sources = []
    taggers = []
    for section in parser.sections():
        if section.startswith("source:"):
            sec = parser[section]
            sources.append(
                FeedSource(
                    media_name=section.split(":", 1)[1].strip(),
                    feed_url=sec["feed_url"],
                    media_url=sec["media_url"],
                    poll_interval=sec.getfloat("poll_interval", fallback=DEFAULT_POLL_INTERVAL),
                    title_selector=sec.get("title_selector") or None,
                    content_selector=sec.get("content_selector") or None,
                )
            )
        elif section.startswith("tagger:"):
            sec = parser[section]
            taggers.append(
                TaggerSpec(
                    tagger_id=section.split(":", 1)[1].strip(),
                    kind=sec.get("kind", "builtin").strip(),
                    command=sec.get("command", ""),
                    timeout=sec.getfloat("timeout", fallback=10.0),
                )
            )
    if sources:
        cfg.sources = sources
    if taggers:
        ids = [t.tagger_id for t in taggers]
        if len(set(ids)) != len(ids):
            raise ValueError(f"duplicate tagger ids in config: {ids}")
        cfg.taggers = taggers
    return cfg
