"""Validation metrics and bias reports over the corpus store.

Per-article precision/recall/F1 against gold entity lists, roster
classification/coverage, variant-share statistics, location frequency
counts, and per-entity sentiment series across the three scopes.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

from .errors import EmptyInput
from .ner import Category
from .resolve import normalize_surface, token_boundary_contains
from .sentiment import CONTINUOUS_TOOL, Scope
from .store import Store

__all__ = [
    "MatchMode",
    "PRF",
    "AggregateStats",
    "RosterReport",
    "VariantReport",
    "SeriesPoint",
    "prf",
    "aggregate",
    "roster_report",
    "variant_report",
    "location_frequencies",
    "sentiment_series",
]

_NAME_TOKENS = re.compile(r"[\s\-]+")


class MatchMode(Enum):
    EXACT = "exact"  # normalized name + category
    NAME_ONLY = "name-only"  # normalized name, category ignored


@dataclass(frozen=True)
class PRF:
    precision: float
    recall: float
    f1: float
    tp: int
    fp: int
    fn: int


@dataclass(frozen=True)
class AggregateStats:
    mean_precision: float
    sd_precision: float
    mean_recall: float
    sd_recall: float
    mean_f1: float
    sd_f1: float
    count: int


@dataclass
class RosterReport:
    coverage: float
    matched_names: list[str]
    unmatched_names: list[str]
    # tagger -> {category -> roster-linked mention count}
    classifications: dict[str, dict[Category, int]] = field(default_factory=dict)


@dataclass
class VariantReport:
    target: str
    variants: list[tuple[str, Category, int]]  # (full_name, category, article count)
    top_share: float


@dataclass(frozen=True)
class SeriesPoint:
    article_id: int
    date: str
    article_score: float | None
    paragraph_mean: float | None
    sentence_mean: float | None


def _match_key(name: str, category, mode: MatchMode):
    normalized = normalize_surface(str(name)).casefold()
    if mode is MatchMode.NAME_ONLY:
        return normalized
    return (normalized, Category(category))


def prf(
    gold: Iterable[tuple[str, str]],
    predicted: Iterable[tuple[str, str]],
    match_mode: MatchMode = MatchMode.NAME_ONLY,
) -> PRF:
    """Set precision/recall/F1 with 0/0 conventions mapped to 0."""
    gold_keys = {_match_key(n, c, match_mode) for n, c in gold}
    pred_keys = {_match_key(n, c, match_mode) for n, c in predicted}
    tp = len(gold_keys & pred_keys)
    fp = len(pred_keys - gold_keys)
    fn = len(gold_keys - pred_keys)
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return PRF(precision=precision, recall=recall, f1=f1, tp=tp, fp=fp, fn=fn)


def _mean_sd(values: Sequence[float]) -> tuple[float, float]:
    mean = sum(values) / len(values)
    variance = sum((v - mean) ** 2 for v in values) / len(values)
    return mean, math.sqrt(variance)


def aggregate(per_article: Sequence[PRF]) -> AggregateStats:
    """Arithmetic mean and population standard deviation per metric."""
    if not per_article:
        raise EmptyInput("aggregate requires at least one PRF")
    mp, sp = _mean_sd([x.precision for x in per_article])
    mr, sr = _mean_sd([x.recall for x in per_article])
    mf, sf = _mean_sd([x.f1 for x in per_article])
    return AggregateStats(
        mean_precision=mp, sd_precision=sp,
        mean_recall=mr, sd_recall=sr,
        mean_f1=mf, sd_f1=sf,
        count=len(per_article),
    )


def _contains_token(full_name: str, token: str) -> bool:
    return token_boundary_contains(full_name.casefold(), token.casefold())


def roster_report(
    roster: Sequence[str],
    store: Store,
    exclude: Iterable[str] = (),
) -> RosterReport:
    """How the store classified a roster of known-person full names.

    A roster name matches an entity when every space- or hyphen-separated
    token of the name appears in the entity full_name; the exclusion list
    removes hand-identified false matches by entity full name.
    """
    if not roster:
        raise EmptyInput("roster must be non-empty")
    excluded = {e.casefold() for e in exclude}
    catalog = [
        (eid, fname, cat)
        for eid, fname, cat in store.entity_catalog()
        if fname.casefold() not in excluded
    ]
    matched_entities: dict[str, set[int]] = {}
    for name in roster:
        tokens = [t for t in _NAME_TOKENS.split(name) if t]
        hits = {
            eid for eid, fname, _ in catalog if all(_contains_token(fname, t) for t in tokens)
        }
        if hits:
            matched_entities[name] = hits

    all_ids = sorted(set().union(*matched_entities.values())) if matched_entities else []
    stats = store.mention_stats(all_ids)
    links_by_entity: dict[int, int] = {}
    classifications: dict[str, dict[Category, int]] = {}
    for entity_id, tagger, category, links, _articles in stats:
        links_by_entity[entity_id] = links_by_entity.get(entity_id, 0) + links
        per_tagger = classifications.setdefault(
            tagger, {c: 0 for c in Category}
        )
        per_tagger[category] += links

    matched = [
        name
        for name, ids in matched_entities.items()
        if any(links_by_entity.get(eid, 0) > 0 for eid in ids)
    ]
    unmatched = [name for name in roster if name not in set(matched)]
    return RosterReport(
        coverage=len(matched) / len(roster),
        matched_names=matched,
        unmatched_names=unmatched,
        classifications=classifications,
    )


def variant_report(pattern_tokens: Sequence[str], store: Store) -> VariantReport:
    """Resolved-name variants touching any pattern token, by article reach."""
    if not pattern_tokens:
        raise EmptyInput("variant_report requires at least one token")
    catalog = store.entity_catalog()
    hits = [
        (eid, fname, cat)
        for eid, fname, cat in catalog
        if any(_contains_token(fname, t) for t in pattern_tokens)
    ]
    article_counts: dict[int, int] = {}
    for entity_id, _tagger, _category, _links, articles in store.mention_stats(
        [eid for eid, _, _ in hits]
    ):
        article_counts[entity_id] = article_counts.get(entity_id, 0) + articles
    variants = sorted(
        (
            (fname, cat, article_counts.get(eid, 0))
            for eid, fname, cat in hits
            if article_counts.get(eid, 0) > 0
        ),
        key=lambda v: (-v[2], v[0]),
    )
    total = sum(v[2] for v in variants)
    top_share = variants[0][2] / total if total else 0.0
    return VariantReport(target=" ".join(pattern_tokens), variants=variants, top_share=top_share)


def location_frequencies(
    store: Store,
    sources: frozenset[str] | None = None,
    date_from: str | None = None,
    date_to: str | None = None,
) -> list[tuple[str, int]]:
    """LOCATION mention counts, descending; CSV-ready (location, count)."""
    return store.location_link_counts(sources, date_from, date_to)


def sentiment_series(
    entity_id: int,
    store: Store,
    sources: frozenset[str] | None = None,
    date_from: str | None = None,
    date_to: str | None = None,
    tool: str = CONTINUOUS_TOOL,
) -> list[SeriesPoint]:
    """Per-article sentiment for one entity at the three scopes.

    Paragraph/sentence values are means over only the paragraphs and
    sentences that mention the entity; scopes with no covering score
    rows stay None.
    """
    points: list[SeriesPoint] = []
    for article_id, day in store.articles_linking_entity(entity_id, sources, date_from, date_to):
        positions = store.entity_link_positions(entity_id, article_id)
        para_indices = {p for p, _ in positions}
        sent_indices = set(positions)
        article_score = None
        para_scores: list[float] = []
        sent_scores: list[float] = []
        for s in store.sentiment_for_article(article_id, tool):
            if s.scope is Scope.ARTICLE:
                article_score = s.compound
            elif s.scope is Scope.PARAGRAPH and s.paragraph_index in para_indices:
                para_scores.append(s.compound)
            elif s.scope is Scope.SENTENCE and (s.paragraph_index, s.sentence_index) in sent_indices:
                sent_scores.append(s.compound)
        points.append(
            SeriesPoint(
                article_id=article_id,
                date=day,
                article_score=article_score,
                paragraph_mean=sum(para_scores) / len(para_scores) if para_scores else None,
                sentence_mean=sum(sent_scores) / len(sent_scores) if sent_scores else None,
            )
        )
    return points
