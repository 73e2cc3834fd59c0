"""Deterministic paragraph/sentence/token segmentation.

Produces the index space shared by the sentiment and entity-tagging
stages: paragraph indices, per-paragraph sentence indices, and token
character spans relative to the paragraph text.
"""

from __future__ import annotations

import re
import string
from dataclasses import dataclass
from importlib import resources

__all__ = [
    "Token",
    "Sentence",
    "Paragraph",
    "SegmentedArticle",
    "default_guard",
    "load_guard",
    "split_paragraphs",
    "split_sentences",
    "segment_article",
    "expected_score_count",
]

# Punctuation peeled off token edges; interior characters are kept so
# tokens like "Ocasio-Cortez", "We'd" and "3.7" survive intact.
_EDGE_PUNCT = set(string.punctuation) | set("“”‘’—–…«»")

# Characters that may open a sentence after a terminator.
_OPENERS = set("\"'“‘«")
# Closing quotes/brackets allowed to trail a terminator inside a sentence.
_CLOSERS = set("\"'”’»)]")

_TERMINATORS = set(".!?")

# "U.S.", "F.B.I." and the like keep their periods; a bare initial "W."
# never ends a sentence either.
_ACRONYM_DOTTED = re.compile(r"(?:[A-Za-z]\.){2,}")
_INITIAL = re.compile(r"[A-Z]\.")

_BLANK_LINE = re.compile(r"\n\s*\n")


@dataclass(frozen=True)
class Token:
    text: str
    start: int  # paragraph-relative character offsets
    end: int


@dataclass(frozen=True)
class Sentence:
    index_in_paragraph: int
    global_index: int
    start: int
    end: int
    text: str
    tokens: tuple[Token, ...]


@dataclass(frozen=True)
class Paragraph:
    index: int
    text: str
    sentences: tuple[Sentence, ...]


@dataclass(frozen=True)
class SegmentedArticle:
    article_id: int | None
    paragraphs: tuple[Paragraph, ...]

    def all_tokens(self) -> list[Token]:
        return [t for p in self.paragraphs for s in p.sentences for t in s.tokens]

    def sentence_count(self) -> int:
        return sum(len(p.sentences) for p in self.paragraphs)


def load_guard(path) -> frozenset[str]:
    """Read an abbreviation-guard file: one entry per line, '#' comments."""
    entries = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if line:
                entries.add(line)
    return frozenset(entries)


def default_guard() -> frozenset[str]:
    """The guard list shipped with the package."""
    text = resources.files("newslens.data").joinpath("abbrev_guard.txt").read_text("utf-8")
    entries = set()
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            entries.add(line)
    return frozenset(entries)


def split_paragraphs(body: str) -> list[str]:
    """Split plain text on blank lines, trimming and dropping empties."""
    parts = _BLANK_LINE.split(body)
    return [p.strip() for p in parts if p.strip()]


def _keeps_period(core: str, guard: frozenset[str]) -> bool:
    return (
        core in guard
        or _ACRONYM_DOTTED.fullmatch(core) is not None
        or _INITIAL.fullmatch(core) is not None
    )


def _tokenize(text: str, base: int, guard: frozenset[str]) -> list[Token]:
    """Whitespace-split with edge punctuation peeled into one-char tokens."""
    tokens: list[Token] = []
    for m in re.finditer(r"\S+", text):
        chunk = m.group()
        s, e = 0, len(chunk)
        off = base + m.start()
        lead: list[Token] = []
        while s < e and chunk[s] in _EDGE_PUNCT:
            lead.append(Token(chunk[s], off + s, off + s + 1))
            s += 1
        trail: list[Token] = []
        while e > s and chunk[e - 1] in _EDGE_PUNCT:
            if chunk[e - 1] == "." and _keeps_period(chunk[s:e], guard):
                break
            trail.append(Token(chunk[e - 1], off + e - 1, off + e))
            e -= 1
        tokens.extend(lead)
        if e > s:
            tokens.append(Token(chunk[s:e], off + s, off + e))
        tokens.extend(reversed(trail))
    return tokens


def _token_before(text: str, period_pos: int) -> str:
    """The non-whitespace run ending at the period, leading punctuation stripped."""
    j = period_pos
    while j > 0 and not text[j - 1].isspace():
        j -= 1
    token = text[j : period_pos + 1]
    return token.lstrip("\"'(“‘[«")


def _is_boundary(text: str, i: int, guard: frozenset[str]) -> bool:
    """True when the terminator at ``i`` (or its closing-quote run) ends a sentence."""
    j = i + 1
    while j < len(text) and text[j] in _CLOSERS:
        j += 1
    if j >= len(text) or not text[j].isspace():
        return False
    k = j
    while k < len(text) and text[k].isspace():
        k += 1
    if k >= len(text):
        return False
    nxt = text[k]
    if not (nxt.isupper() or nxt.isdigit() or nxt in _OPENERS):
        return False
    if text[i] == ".":
        if _keeps_period(_token_before(text, i), guard):
            return False
    return True


def _sentence_spans(paragraph: str, guard: frozenset[str]) -> list[tuple[int, int]]:
    spans: list[tuple[int, int]] = []
    start = 0
    i = 0
    n = len(paragraph)
    while i < n:
        if paragraph[i] in _TERMINATORS and _is_boundary(paragraph, i, guard):
            end = i + 1
            while end < n and paragraph[end] in _CLOSERS:
                end += 1
            spans.append((start, end))
            start = end
        i += 1
    if start < n:
        spans.append((start, n))
    out: list[tuple[int, int]] = []
    for s, e in spans:
        while s < e and paragraph[s].isspace():
            s += 1
        while e > s and paragraph[e - 1].isspace():
            e -= 1
        if e > s:
            out.append((s, e))
    return out


def split_sentences(
    paragraph: str,
    abbreviation_guard: frozenset[str] | None = None,
    *,
    global_offset: int = 0,
) -> list[Sentence]:
    """Split one paragraph into sentences with paragraph-relative token spans.

    Boundaries fall at '.', '!' or '?' followed by whitespace and an
    uppercase letter, digit or opening quote, unless the preceding token
    is a guarded abbreviation, a dotted acronym, or a single initial.
    """
    guard = abbreviation_guard if abbreviation_guard is not None else default_guard()
    sentences: list[Sentence] = []
    for idx, (s, e) in enumerate(_sentence_spans(paragraph, guard)):
        text = paragraph[s:e]
        sentences.append(
            Sentence(
                index_in_paragraph=idx,
                global_index=global_offset + idx,
                start=s,
                end=e,
                text=text,
                tokens=tuple(_tokenize(text, s, guard)),
            )
        )
    return sentences


def segment_article(
    paragraph_texts: list[str],
    abbreviation_guard: frozenset[str] | None = None,
    article_id: int | None = None,
) -> SegmentedArticle:
    """Segment stored paragraphs into the shared index space."""
    guard = abbreviation_guard if abbreviation_guard is not None else default_guard()
    paragraphs: list[Paragraph] = []
    global_index = 0
    for p_idx, text in enumerate(paragraph_texts):
        sentences = split_sentences(text, guard, global_offset=global_index)
        global_index += len(sentences)
        paragraphs.append(Paragraph(index=p_idx, text=text, sentences=tuple(sentences)))
    return SegmentedArticle(article_id=article_id, paragraphs=tuple(paragraphs))


def expected_score_count(seg: SegmentedArticle) -> int:
    """Sentence + paragraph + article score slots; 0 for an empty article."""
    if not seg.paragraphs:
        return 0
    return seg.sentence_count() + len(seg.paragraphs) + 1
