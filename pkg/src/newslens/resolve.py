"""Entity resolution: link each mention to the most recent prior entity
whose full name contains it, expanding acronyms through a corpus, so
only full names persist.

Within an article the expected pattern is full name first, short form
after; a short form seen before its full name starts its own entity and
bumps a diagnostic counter. Across articles, entities merge on exact
(normalized full name, category) equality.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Mapping, Protocol, Sequence

from .errors import UnsortedInput
from .ner import Category, EntityMention

__all__ = [
    "ResolvedEntity",
    "MentionLink",
    "AbbreviationCorpus",
    "ResolutionResult",
    "load_abbreviations",
    "default_abbreviations",
    "normalize_surface",
    "expand_abbreviation",
    "resolve_article",
    "resolve_global",
    "token_boundary_contains",
]

# Letters separated by periods, at least two letters: F.B.I., U.S., U.S.A
_DOTTED_ACRONYM = re.compile(r"[A-Za-z](?:\.[A-Za-z])+\.?")
_ACRONYM = re.compile(r"[A-Z]{2,}")

# Lowercase words skipped when deriving a name's initials.
_INITIAL_SKIP = {"of", "the", "and", "for", "&"}


@dataclass(frozen=True)
class ResolvedEntity:
    entity_id: int
    full_name: str
    category: Category


@dataclass(frozen=True)
class MentionLink:
    mention: EntityMention
    entity_id: int
    tagger: str


@dataclass(frozen=True)
class AbbreviationCorpus:
    # acronym (period-free, case-folded) -> (full name, category or None)
    entries: Mapping[str, tuple[str, Category | None]] = field(default_factory=dict)

    def get(self, acronym: str, category: Category | None = None) -> str | None:
        hit = self.entries.get(acronym.replace(".", "").casefold())
        if hit is None:
            return None
        full_name, entry_category = hit
        if entry_category is not None and category is not None and entry_category != category:
            return None
        return full_name


@dataclass
class ResolutionResult:
    entities: list[ResolvedEntity]
    links: list[MentionLink]
    forward_occurrences: int = 0


def load_abbreviations(path) -> AbbreviationCorpus:
    """Load `ACRONYM<TAB>Full Name<TAB>CATEGORY?` lines."""
    with open(path, encoding="utf-8") as fh:
        return AbbreviationCorpus(entries=_parse_abbreviations(fh.read()))


def default_abbreviations() -> AbbreviationCorpus:
    text = resources.files("newslens.data").joinpath("abbreviations.tsv").read_text("utf-8")
    return AbbreviationCorpus(entries=_parse_abbreviations(text))


def _parse_abbreviations(text: str) -> dict[str, tuple[str, Category | None]]:
    entries: dict[str, tuple[str, Category | None]] = {}
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split("\t")
        if len(parts) < 2:
            continue
        acronym = parts[0].replace(".", "").casefold()
        category = Category(parts[2].strip()) if len(parts) > 2 and parts[2].strip() else None
        entries[acronym] = (parts[1].strip(), category)
    return entries


def normalize_surface(surface: str) -> str:
    """Strip periods out of dotted acronyms and collapse whitespace.

    Case and every other character are preserved: "F.B.I." -> "FBI",
    "U.S. House" -> "US House".
    """
    tokens = []
    for token in surface.split():
        if _DOTTED_ACRONYM.fullmatch(token):
            token = token.replace(".", "")
        tokens.append(token)
    return " ".join(tokens)


def _is_acronym(name: str) -> bool:
    return _ACRONYM.fullmatch(name) is not None


def _initials(full_name: str) -> str:
    letters = []
    for token in full_name.split():
        if token.lower() in _INITIAL_SKIP:
            continue
        if token and token[0].isalpha():
            letters.append(token[0].upper())
    return "".join(letters)


def expand_abbreviation(
    acronym: str,
    corpus: AbbreviationCorpus,
    article_context: Sequence[str] = (),
    category: Category | None = None,
) -> str | None:
    """Full name for an acronym, or None.

    A prior full name from the same article whose initials spell the
    acronym wins over the corpus entry.
    """
    for full_name in article_context:
        if _initials(full_name) == acronym:
            return full_name
    return corpus.get(acronym, category)


def _is_word_char(c: str) -> bool:
    return c.isalnum() or c in "'’"


def token_boundary_contains(haystack: str, needle: str) -> bool:
    """Case-sensitive containment at token boundaries; equality counts."""
    if not needle:
        return False
    n = len(needle)
    start = 0
    while True:
        idx = haystack.find(needle, start)
        if idx < 0:
            return False
        left_ok = idx == 0 or not _is_word_char(haystack[idx - 1])
        right_ok = idx + n == len(haystack) or not _is_word_char(haystack[idx + n])
        if left_ok and right_ok:
            return True
        start = idx + 1


def resolve_article(
    mentions: Sequence[EntityMention],
    corpus: AbbreviationCorpus | None = None,
    first_entity_id: int = 1,
) -> ResolutionResult:
    """Resolve one tagger's document-ordered mentions within one article.

    Keeps a recency list of open entities per category; each mention
    links to the most recently used entity whose full name contains its
    normalized (or acronym-expanded) surface, or opens a new entity.
    """
    corpus = corpus if corpus is not None else AbbreviationCorpus()
    order = [(m.paragraph_index, m.char_start) for m in mentions]
    if order != sorted(order):
        raise UnsortedInput("mentions must be sorted by (paragraph_index, char_start)")
    taggers = {m.tagger for m in mentions}
    if len(taggers) > 1:
        raise ValueError(f"resolve_article takes one tagger's mentions, got {sorted(taggers)}")

    recency: dict[Category, list[ResolvedEntity]] = {c: [] for c in Category}
    entities: list[ResolvedEntity] = []
    links: list[MentionLink] = []
    forward = 0
    next_id = first_entity_id

    for mention in mentions:
        name = normalize_surface(mention.surface)
        open_entities = recency[mention.category]
        if _is_acronym(name):
            expansion = expand_abbreviation(
                name, corpus, [e.full_name for e in open_entities], mention.category
            )
            if expansion is not None:
                name = normalize_surface(expansion)
        match = None
        for entity in open_entities:
            if token_boundary_contains(entity.full_name, name):
                match = entity
                break
        if match is None:
            if any(token_boundary_contains(name, e.full_name) for e in open_entities):
                # short form arrived before the full name it belongs to
                forward += 1
            match = ResolvedEntity(entity_id=next_id, full_name=name, category=mention.category)
            next_id += 1
            entities.append(match)
        else:
            open_entities.remove(match)
        open_entities.insert(0, match)
        links.append(MentionLink(mention=mention, entity_id=match.entity_id, tagger=mention.tagger))

    return ResolutionResult(entities=entities, links=links, forward_occurrences=forward)


class EntityRegistry(Protocol):
    def upsert_entity(self, full_name: str, category: Category) -> int: ...


def resolve_global(
    entities: Sequence[ResolvedEntity], registry: EntityRegistry
) -> dict[int, int]:
    """Merge article-local entities into the global registry.

    Exact (normalized full name, category) matches reuse the stored id;
    everything else is inserted. Returns local id -> global id.
    """
    mapping: dict[int, int] = {}
    for entity in entities:
        mapping[entity.entity_id] = registry.upsert_entity(
            normalize_surface(entity.full_name), entity.category
        )
    return mapping
