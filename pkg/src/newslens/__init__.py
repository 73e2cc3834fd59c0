"""newslens: a continuously ingesting, sentiment- and entity-tagged news
corpus with a searchable, CSV-exportable query layer."""

__version__ = "0.1.0"

from .ingest import Article, FeedItem, FeedSource, Scheduler, extract_article, fetch_feed
from .ner import Category, EntityMention, Gazetteer, TaggerSpec, tag_all, tag_builtin, tag_external
from .resolve import (
    AbbreviationCorpus,
    MentionLink,
    ResolvedEntity,
    expand_abbreviation,
    normalize_surface,
    resolve_article,
    resolve_global,
)
from .segment import SegmentedArticle, expected_score_count, segment_article, split_paragraphs, split_sentences
from .sentiment import (
    Scope,
    SentimentLexicon,
    SentimentScore,
    score_article,
    score_tokens,
    to_five_class,
)
from .store import QueryFilter, ResultRow, Store

__all__ = [
    "Article",
    "FeedItem",
    "FeedSource",
    "Scheduler",
    "extract_article",
    "fetch_feed",
    "Category",
    "EntityMention",
    "Gazetteer",
    "TaggerSpec",
    "tag_all",
    "tag_builtin",
    "tag_external",
    "AbbreviationCorpus",
    "MentionLink",
    "ResolvedEntity",
    "expand_abbreviation",
    "normalize_surface",
    "resolve_article",
    "resolve_global",
    "SegmentedArticle",
    "expected_score_count",
    "segment_article",
    "split_paragraphs",
    "split_sentences",
    "Scope",
    "SentimentLexicon",
    "SentimentScore",
    "score_article",
    "score_tokens",
    "to_five_class",
    "QueryFilter",
    "ResultRow",
    "Store",
]
