"""Lexicon-rule sentiment scoring at sentence, paragraph and article scope.

One pass over a token stream sums rule-adjusted valences and squashes
the total into [-1, 1]; a threshold map turns that compound value into
a discrete 0-4 class.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from importlib import resources
from typing import Iterable, Mapping, Sequence

from .errors import OutOfRange
from .segment import SegmentedArticle

__all__ = [
    "Scope",
    "SentimentLexicon",
    "SentimentScore",
    "load_lexicon",
    "default_lexicon",
    "score_tokens",
    "score_article",
    "to_five_class",
    "rescale_five_class",
    "derive_five_class",
]

NEGATION_SCALAR = -0.74
CAPS_EMPHASIS = 0.733
EXCLAIM_BOOST = 0.292
MAX_EXCLAIM = 3
BOOSTER_DECAY = (1.0, 0.95, 0.90)
ALPHA = 15.0

CONTINUOUS_TOOL = "lexrule-1"
FIVE_CLASS_TOOL = "lexrule-5class"


class Scope(str, Enum):
    ARTICLE = "ARTICLE"
    PARAGRAPH = "PARAGRAPH"
    SENTENCE = "SENTENCE"


@dataclass(frozen=True)
class SentimentLexicon:
    entries: Mapping[str, float]
    boosters: Mapping[str, float]
    negators: frozenset[str]


@dataclass(frozen=True)
class SentimentScore:
    scope: Scope
    paragraph_index: int | None
    sentence_index: int | None
    compound: float
    five_class: int
    tool: str
    article_id: int | None = None


def _read_lines(text: str) -> Iterable[str]:
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            yield line


def load_lexicon(lexicon_path, boosters_path=None, negators_path=None) -> SentimentLexicon:
    """Load `token<TAB>valence` entries plus booster/negator side files."""
    entries: dict[str, float] = {}
    with open(lexicon_path, encoding="utf-8") as fh:
        for line in _read_lines(fh.read()):
            token, valence = line.split("\t")[:2]
            entries[token.lower()] = float(valence)
    boosters: dict[str, float] = {}
    if boosters_path is not None:
        with open(boosters_path, encoding="utf-8") as fh:
            for line in _read_lines(fh.read()):
                parts = line.split("\t")
                boosters[parts[0].lower()] = float(parts[1]) if len(parts) > 1 else 0.293
    negators: set[str] = set()
    if negators_path is not None:
        with open(negators_path, encoding="utf-8") as fh:
            negators = {line.lower() for line in _read_lines(fh.read())}
    return SentimentLexicon(entries=entries, boosters=boosters, negators=frozenset(negators))


def default_lexicon() -> SentimentLexicon:
    """The valence/booster/negator files shipped with the package."""
    data = resources.files("newslens.data")
    entries = {}
    for line in _read_lines(data.joinpath("lexicon.tsv").read_text("utf-8")):
        token, valence = line.split("\t")[:2]
        entries[token.lower()] = float(valence)
    boosters = {}
    for line in _read_lines(data.joinpath("boosters.txt").read_text("utf-8")):
        parts = line.split("\t")
        boosters[parts[0].lower()] = float(parts[1]) if len(parts) > 1 else 0.293
    negators = frozenset(_read_lines(data.joinpath("negators.txt").read_text("utf-8")))
    return SentimentLexicon(entries=entries, boosters=boosters, negators=negators)


def _normalize(x: float, alpha: float = ALPHA) -> float:
    score = x / math.sqrt(x * x + alpha)
    return max(-1.0, min(1.0, score))


def _mixed_case(tokens: Sequence[str]) -> bool:
    """Some but not all cased tokens are ALL CAPS."""
    cased = upper = 0
    for tok in tokens:
        if any(c.isalpha() for c in tok):
            cased += 1
            if tok.isupper():
                upper += 1
    return 0 < upper < cased


def score_tokens(tokens: Sequence[str], lexicon: SentimentLexicon) -> float:
    """Compound sentiment of one token stream, in [-1, 1].

    Per lexicon hit: valence, flipped by -0.74 when a negator sits in
    the 3 preceding tokens, nudged by up to 3 preceding boosters with
    distance decay, emphasised by +/-0.733 for ALL-CAPS amid mixed-case
    text. The exclamation total then amplifies the sum sign-following,
    and x/sqrt(x^2+alpha) maps the sum onto [-1, 1].
    """
    mixed = _mixed_case(tokens)
    x = 0.0
    for i, tok in enumerate(tokens):
        low = tok.lower()
        if low in lexicon.boosters:
            continue
        valence = lexicon.entries.get(low)
        if valence is None:
            continue
        if any(t.lower() in lexicon.negators for t in tokens[max(0, i - 3) : i]):
            valence *= NEGATION_SCALAR
        for dist, decay in enumerate(BOOSTER_DECAY, start=1):
            j = i - dist
            if j < 0:
                break
            inc = lexicon.boosters.get(tokens[j].lower())
            if inc is None:
                continue
            inc *= decay
            if valence < 0:
                inc = -inc
            valence += inc
        if mixed and tok.isupper():
            if valence > 0:
                valence += CAPS_EMPHASIS
            elif valence < 0:
                valence -= CAPS_EMPHASIS
        x += valence
    exclaims = min(sum(tok.count("!") for tok in tokens), MAX_EXCLAIM)
    if exclaims:
        amp = EXCLAIM_BOOST * exclaims
        if x > 0:
            x += amp
        elif x < 0:
            x -= amp
    return _normalize(x)


def to_five_class(compound: float) -> int:
    """Map a compound value onto the discrete 0 (very negative) .. 4 scale."""
    if abs(compound) > 1:
        raise OutOfRange(f"compound {compound} outside [-1, 1]")
    if compound <= -0.6:
        return 0
    if compound <= -0.05:
        return 1
    if compound < 0.05:
        return 2
    if compound < 0.6:
        return 3
    return 4


def rescale_five_class(five_class: int) -> float:
    """Project a 0-4 class back onto the shared [-1, 1] score axis."""
    return (five_class - 2) / 2.0


def derive_five_class(
    scores: Sequence[SentimentScore], tool_id: str = FIVE_CLASS_TOOL
) -> list[SentimentScore]:
    """Mirror continuous rows as the discrete tool's output.

    The class is the headline value; the score column carries it
    rescaled onto [-1, 1] so both tools share one axis.
    """
    return [
        replace(s, tool=tool_id, compound=rescale_five_class(s.five_class)) for s in scores
    ]


def score_article(
    seg: SegmentedArticle,
    lexicon: SentimentLexicon,
    tool_id: str = CONTINUOUS_TOOL,
) -> list[SentimentScore]:
    """One score per sentence, per paragraph, and for the whole article."""
    scores: list[SentimentScore] = []
    article_tokens: list[str] = []
    for para in seg.paragraphs:
        para_tokens: list[str] = []
        for sent in para.sentences:
            texts = [t.text for t in sent.tokens]
            para_tokens.extend(texts)
            compound = score_tokens(texts, lexicon)
            scores.append(
                SentimentScore(
                    scope=Scope.SENTENCE,
                    paragraph_index=para.index,
                    sentence_index=sent.index_in_paragraph,
                    compound=compound,
                    five_class=to_five_class(compound),
                    tool=tool_id,
                    article_id=seg.article_id,
                )
            )
        article_tokens.extend(para_tokens)
        compound = score_tokens(para_tokens, lexicon)
        scores.append(
            SentimentScore(
                scope=Scope.PARAGRAPH,
                paragraph_index=para.index,
                sentence_index=None,
                compound=compound,
                five_class=to_five_class(compound),
                tool=tool_id,
                article_id=seg.article_id,
            )
        )
    if seg.paragraphs:
        compound = score_tokens(article_tokens, lexicon)
        scores.append(
            SentimentScore(
                scope=Scope.ARTICLE,
                paragraph_index=None,
                sentence_index=None,
                compound=compound,
                five_class=to_five_class(compound),
                tool=tool_id,
                article_id=seg.article_id,
            )
        )
    return scores
