"""Per-article analysis: segment, score, tag, resolve, persist.

One call takes a stored article through every derived table in a single
transactional bundle.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .config import Config
from .ner import tag_all
from .resolve import resolve_article, resolve_global
from .segment import segment_article
from .sentiment import CONTINUOUS_TOOL, derive_five_class, score_article
from .store import Store

logger = logging.getLogger(__name__)

__all__ = ["Pipeline", "ArticleReport"]


@dataclass
class ArticleReport:
    article_id: int
    score_rows: int = 0
    link_rows: int = 0
    entities: int = 0
    forward_occurrences: int = 0
    tagger_errors: dict[str, str] = field(default_factory=dict)


class Pipeline:
    """Analysis stages wired over one store, built from one config."""

    def __init__(self, store: Store, config: Config | None = None):
        self.store = store
        self.config = config if config is not None else Config()
        self.lexicon = self.config.lexicon()
        self.guard = self.config.guard()
        self.gazetteer = self.config.gazetteer()
        self.abbreviations = self.config.abbreviations()

    def process_article(self, article_id: int) -> ArticleReport:
        """Recompute and persist every derived row for one article."""
        report = ArticleReport(article_id=article_id)
        paragraphs = self.store.article_paragraphs(article_id)
        seg = segment_article(paragraphs, self.guard, article_id=article_id)

        base = score_article(seg, self.lexicon, CONTINUOUS_TOOL)
        scores = []
        for tool in self.config.sentiment_tools:
            if tool == CONTINUOUS_TOOL:
                scores.extend(base)
            else:
                scores.extend(derive_five_class(base, tool_id=tool))

        mentions_by_tagger, errors = tag_all(
            seg, self.config.taggers, self.gazetteer, self.config.default_category
        )
        report.tagger_errors = errors
        links = []
        for tagger_id in sorted(mentions_by_tagger):
            mentions = mentions_by_tagger[tagger_id]
            result = resolve_article(mentions, self.abbreviations)
            mapping = resolve_global(result.entities, self.store)
            links.extend((link.mention, mapping[link.entity_id]) for link in result.links)
            report.entities += len(result.entities)
            report.forward_occurrences += result.forward_occurrences

        self.store.persist_article_bundle(article_id, scores, links)
        report.score_rows = len(scores)
        report.link_rows = len(links)
        return report
