"""Entity mention tagging: a heuristic capitalization tagger plus a
subprocess adapter protocol for external tools.

Both produce the same mention shape (surface, category, paragraph-relative
char span, sentence/paragraph indices, tagger id) so storage and
resolution stay tool-count-agnostic.
"""

from __future__ import annotations

import json
import logging
import re
import shlex
import subprocess
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from typing import Mapping, Sequence

from .errors import AdapterProtocolError, AdapterTimeout, SpanMismatch
from .segment import SegmentedArticle, Sentence

logger = logging.getLogger(__name__)

__all__ = [
    "Category",
    "EntityMention",
    "TaggerSpec",
    "Gazetteer",
    "default_gazetteer",
    "load_gazetteer",
    "tag_builtin",
    "tag_external",
    "tag_all",
    "BUILTIN_TAGGER_ID",
]

BUILTIN_TAGGER_ID = "builtin"


class Category(str, Enum):
    PERSON = "PERSON"
    LOCATION = "LOCATION"
    ORGANIZATION = "ORGANIZATION"


@dataclass(frozen=True)
class EntityMention:
    surface: str
    category: Category
    char_start: int  # span within the paragraph text
    char_end: int
    paragraph_index: int
    sentence_index: int
    tagger: str
    article_id: int | None = None


@dataclass(frozen=True)
class TaggerSpec:
    tagger_id: str
    kind: str = "builtin"  # "builtin" | "external"
    command: str = ""
    timeout: float = 10.0

    def __post_init__(self):
        if self.kind not in ("builtin", "external"):
            raise ValueError(f"unknown tagger kind {self.kind!r}")
        if self.kind == "external" and not self.command.strip():
            raise ValueError("external tagger requires a command")


# Words allowed inside a capitalized run when it resumes with a
# capitalized token ("Department of Justice").
_CONNECTORS = {"of", "the", "&"}

_ACRONYM = re.compile(r"(?:[A-Z]\.?){2,}\.?")

# Dotted abbreviations only: a bare titlecase rank ("Justice",
# "President") must stay inside runs ("Department of Justice").
_DEFAULT_HONORIFICS = frozenset(
    {
        "Mr.", "Ms.", "Mrs.", "Dr.", "Prof.", "Sen.", "Rep.", "Gov.", "Gen.",
        "Capt.", "Col.", "Sgt.", "Lt.", "Cmdr.", "Adm.", "Rev.", "Hon.",
        "Pres.", "Sec.", "Amb.",
    }
)

_DEFAULT_ORG_SUFFIXES = frozenset(
    {
        "Inc.", "Corp.", "Co.", "Ltd.", "LLC", "Company", "Corporation",
        "Department", "Bureau", "Agency", "Administration", "Committee",
        "Commission", "Council", "Association", "Organization", "Institute",
        "University", "College", "Ministry", "Office", "Party", "Police",
        "Court", "Bank", "Group", "Fund", "Union", "League", "Senate",
        "Congress", "Parliament", "News", "Times", "Post", "Journal",
        "Magazine", "Network", "Broadcasting", "Press",
    }
)

# Capitalized only because they open a sentence; a single one is noise.
_DEFAULT_STOPWORDS = frozenset(
    """
    a an and are as at be because but by for from he her hers him his how
    i if in into is it its last like many more most much my next no
    nor not now of on one or other our out over she so some such that the
    their them then there these they this those through to under until up
    was we were what when where which while who why will with yet you your
    according despite during meanwhile however although today yesterday
    tomorrow two three several still also just here earlier later
    """.split()
)


@dataclass(frozen=True)
class Gazetteer:
    names: Mapping[str, Category] = field(default_factory=dict)  # case-folded
    honorifics: frozenset[str] = _DEFAULT_HONORIFICS
    org_suffixes: frozenset[str] = _DEFAULT_ORG_SUFFIXES
    stopwords: frozenset[str] = _DEFAULT_STOPWORDS

    def lookup(self, surface: str) -> Category | None:
        key = " ".join(surface.casefold().split())
        hit = self.names.get(key)
        if hit is None:
            hit = self.names.get(key.replace(".", ""))
        return hit


def load_gazetteer(path) -> Gazetteer:
    """Load `name<TAB>CATEGORY` lines; honorific/suffix sets stay default."""
    names: dict[str, Category] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            name, category = line.split("\t")[:2]
            names[" ".join(name.casefold().split())] = Category(category.strip())
    return Gazetteer(names=names)


def default_gazetteer() -> Gazetteer:
    text = resources.files("newslens.data").joinpath("gazetteer.tsv").read_text("utf-8")
    names: dict[str, Category] = {}
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        name, category = line.split("\t")[:2]
        names[" ".join(name.casefold().split())] = Category(category.strip())
    return Gazetteer(names=names)


def _is_acronym_token(text: str) -> bool:
    return _ACRONYM.fullmatch(text) is not None


def _is_capitalized(text: str) -> bool:
    if not text or not text[0].isalpha() or not text[0].isupper():
        return False
    return all(c.isalpha() or c in ".'’-&" for c in text)


def _runs(sentence: Sentence, gaz: Gazetteer):
    """Yield (token_index_list,) maximal capitalized runs in one sentence."""
    tokens = sentence.tokens
    i = 0
    while i < len(tokens):
        text = tokens[i].text
        if text in gaz.honorifics or not _is_capitalized(text):
            i += 1
            continue
        run = [i]
        j = i + 1
        while j < len(tokens):
            nxt = tokens[j].text
            if nxt in gaz.honorifics:
                break
            if _is_capitalized(nxt):
                run.append(j)
                j += 1
                continue
            if nxt.lower() in _CONNECTORS or nxt == "&":
                # connectors join only when a capitalized token follows
                k = j
                while k < len(tokens) and (tokens[k].text.lower() in _CONNECTORS or tokens[k].text == "&"):
                    k += 1
                if k < len(tokens) and _is_capitalized(tokens[k].text) and tokens[k].text not in gaz.honorifics:
                    run.extend(range(j, k + 1))
                    j = k + 1
                    continue
            break
        yield run
        i = j


def _classify_run(
    sentence: Sentence,
    run: list[int],
    surface: str,
    gaz: Gazetteer,
    default_category: Category,
) -> Category:
    hit = gaz.lookup(surface)
    if hit is not None:
        return hit
    first = run[0]
    if first > 0 and sentence.tokens[first - 1].text in gaz.honorifics:
        return Category.PERSON
    if any(sentence.tokens[i].text in gaz.org_suffixes for i in run):
        return Category.ORGANIZATION
    if all(_is_acronym_token(sentence.tokens[i].text) for i in run):
        return Category.ORGANIZATION
    return default_category


def tag_builtin(
    seg: SegmentedArticle,
    gaz: Gazetteer | None = None,
    tagger_id: str = BUILTIN_TAGGER_ID,
    default_category: Category = Category.PERSON,
) -> list[EntityMention]:
    """Tag capitalized runs, acronyms and gazetteer names in one article."""
    gaz = gaz if gaz is not None else default_gazetteer()
    mentions: list[EntityMention] = []
    for para in seg.paragraphs:
        for sent in para.sentences:
            for run in _runs(sent, gaz):
                if run[0] == 0 and sent.tokens[run[0]].text.lower() in gaz.stopwords:
                    # sentence-initial capitalized stopword: never part of a mention
                    run = run[1:]
                    while run and sent.tokens[run[0]].text.lower() in _CONNECTORS:
                        run = run[1:]
                    if not run:
                        continue
                start_tok = sent.tokens[run[0]]
                end_tok = sent.tokens[run[-1]]
                surface = para.text[start_tok.start : end_tok.end]
                category = _classify_run(sent, run, surface, gaz, default_category)
                mentions.append(
                    EntityMention(
                        surface=surface,
                        category=category,
                        char_start=start_tok.start,
                        char_end=end_tok.end,
                        paragraph_index=para.index,
                        sentence_index=sent.index_in_paragraph,
                        tagger=tagger_id,
                        article_id=seg.article_id,
                    )
                )
    return mentions


_VALID_CATEGORIES = {c.value for c in Category}


def _validate_response(doc, seg: SegmentedArticle, tagger_id: str) -> list[EntityMention]:
    if not isinstance(doc, dict) or not isinstance(doc.get("mentions"), list):
        raise AdapterProtocolError("response must be an object with a 'mentions' list")
    paragraphs = seg.paragraphs
    mentions: list[EntityMention] = []
    for item in doc["mentions"]:
        if not isinstance(item, dict):
            raise AdapterProtocolError("mention entries must be objects")
        try:
            p = int(item["p"])
            s = int(item["s"])
            start = int(item["start"])
            end = int(item["end"])
            surface = item["surface"]
            category = item["category"]
        except (KeyError, TypeError, ValueError) as exc:
            raise AdapterProtocolError(f"mention entry missing or mistyped field: {exc}") from exc
        if category not in _VALID_CATEGORIES:
            raise AdapterProtocolError(f"category {category!r} outside PERSON/LOCATION/ORGANIZATION")
        if not 0 <= p < len(paragraphs):
            raise AdapterProtocolError(f"paragraph index {p} out of range")
        para = paragraphs[p]
        if not 0 <= s < len(para.sentences):
            raise AdapterProtocolError(f"sentence index {s} out of range for paragraph {p}")
        if not (0 <= start < end <= len(para.text)):
            raise AdapterProtocolError(f"span ({start}, {end}) out of range for paragraph {p}")
        if para.text[start:end] != surface:
            raise SpanMismatch(
                f"surface {surface!r} != paragraph text {para.text[start:end]!r} at ({start}, {end})"
            )
        mentions.append(
            EntityMention(
                surface=surface,
                category=Category(category),
                char_start=start,
                char_end=end,
                paragraph_index=p,
                sentence_index=s,
                tagger=tagger_id,
                article_id=seg.article_id,
            )
        )
    mentions.sort(key=lambda m: (m.paragraph_index, m.char_start, m.char_end))
    for a, b in zip(mentions, mentions[1:]):
        if a.paragraph_index == b.paragraph_index and b.char_start < a.char_end:
            raise AdapterProtocolError(
                f"overlapping mentions at paragraph {a.paragraph_index}: "
                f"{a.surface!r} and {b.surface!r}"
            )
    return mentions


def tag_external(seg: SegmentedArticle, spec: TaggerSpec) -> list[EntityMention]:
    """Run one adapter process over one article and validate its output.

    Wire format: request `{"article_id": ..., "paragraphs": [...]}` on the
    adapter's stdin (EOF-terminated); response `{"mentions": [...]}` on
    stdout with paragraph-relative spans and the three categories only.
    """
    if spec.kind != "external":
        raise ValueError("tag_external requires an external TaggerSpec")
    request = json.dumps(
        {"article_id": seg.article_id, "paragraphs": [p.text for p in seg.paragraphs]}
    ).encode("utf-8")
    try:
        proc = subprocess.run(
            shlex.split(spec.command),
            input=request,
            capture_output=True,
            timeout=spec.timeout,
        )
    except subprocess.TimeoutExpired as exc:
        raise AdapterTimeout(f"tagger {spec.tagger_id!r} timed out after {spec.timeout}s") from exc
    except OSError as exc:
        raise AdapterProtocolError(f"tagger {spec.tagger_id!r} failed to start: {exc}") from exc
    if proc.returncode != 0:
        raise AdapterProtocolError(
            f"tagger {spec.tagger_id!r} exited {proc.returncode}: {proc.stderr.decode(errors='replace')[:200]}"
        )
    try:
        doc = json.loads(proc.stdout.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise AdapterProtocolError(f"tagger {spec.tagger_id!r} wrote invalid JSON: {exc}") from exc
    return _validate_response(doc, seg, spec.tagger_id)


def tag_all(
    seg: SegmentedArticle,
    specs: Sequence[TaggerSpec],
    gaz: Gazetteer | None = None,
    default_category: Category = Category.PERSON,
) -> tuple[dict[str, list[EntityMention]], dict[str, str]]:
    """Run every tagger independently; failures never cross taggers.

    Returns (mentions by tagger id, error message by failed tagger id).
    """
    ids = [s.tagger_id for s in specs]
    if len(set(ids)) != len(ids):
        raise ValueError(f"duplicate tagger ids: {ids}")
    results: dict[str, list[EntityMention]] = {}
    errors: dict[str, str] = {}
    for spec in specs:
        try:
            if spec.kind == "builtin":
                results[spec.tagger_id] = tag_builtin(
                    seg, gaz, tagger_id=spec.tagger_id, default_category=default_category
                )
            else:
                results[spec.tagger_id] = tag_external(seg, spec)
        except Exception as exc:  # isolation contract: record and continue
            logger.warning("tagger %s failed: %s", spec.tagger_id, exc)
            results[spec.tagger_id] = []
            errors[spec.tagger_id] = f"{type(exc).__name__}: {exc}"
    return results, errors
