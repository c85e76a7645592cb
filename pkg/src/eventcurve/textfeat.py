"""Lexicon-based scoring of policy statements.

Each sentence gets one label (hawk, dove, neutral, out of scope); labels
roll up into a document tone. Guidance and uncertainty variables come from
separate phrase lists in the same lexicon file.
"""

from __future__ import annotations

import csv
import enum
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .errors import ParseError
from .ingest import StatementDoc

LEXICON_CLASSES = (
    "hawk",
    "dove",
    "neutral",
    "scope",
    "uncertainty",
    "guidance_tighten",
    "guidance_ease",
    "guidance_explicit",
)

# lowercase, without the trailing period
ABBREVIATIONS = frozenset(
    {
        "mr", "mrs", "ms", "dr", "prof", "sr", "sra", "vs", "e.g", "i.e", "p.p", "a.a",
        "fig", "approx", "aprox", "inc", "ltd", "jan", "feb", "fev", "apr", "abr",
        "jun", "jul", "aug", "sep", "oct", "nov", "dec", "dez",
    }
)


class SentenceLabel(enum.Enum):
    HAWK = "hawk"
    DOVE = "dove"
    NEUTRAL = "neutral"
    OUT_OF_SCOPE = "out_of_scope"


def _normalize(term: str) -> str:
    return " ".join(term.lower().split())


@dataclass(frozen=True)
class Lexicon:
    hawk_terms: frozenset = frozenset()
    dove_terms: frozenset = frozenset()
    neutral_markers: frozenset = frozenset()
    scope_markers: frozenset = frozenset()
    uncertainty_terms: frozenset = frozenset()
    tighten_phrases: frozenset = frozenset()
    ease_phrases: frozenset = frozenset()
    explicit_phrases: frozenset = frozenset()
    _patterns: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        for name in (
            "hawk_terms", "dove_terms", "neutral_markers", "scope_markers",
            "uncertainty_terms", "tighten_phrases", "ease_phrases", "explicit_phrases",
        ):
            terms = frozenset(_normalize(t) for t in getattr(self, name))
            if any(not t for t in terms):
                raise ValueError(f"{name}: empty phrase")
            object.__setattr__(self, name, terms)
        sentence_sets = {
            "hawk": self.hawk_terms,
            "dove": self.dove_terms,
            "neutral": self.neutral_markers,
            "scope": self.scope_markers,
        }
        names = list(sentence_sets)
        for i, a in enumerate(names):
            for b in names[i + 1:]:
                common = sentence_sets[a] & sentence_sets[b]
                if common:
                    raise ValueError(f"lexicon classes {a} and {b} overlap: {sorted(common)}")

    def swapped(self) -> "Lexicon":
        """Same lexicon with hawkish and dovish polarity exchanged."""
        return Lexicon(
            hawk_terms=self.dove_terms,
            dove_terms=self.hawk_terms,
            neutral_markers=self.neutral_markers,
            scope_markers=self.scope_markers,
            uncertainty_terms=self.uncertainty_terms,
            tighten_phrases=self.ease_phrases,
            ease_phrases=self.tighten_phrases,
            explicit_phrases=self.explicit_phrases,
        )

    def pattern(self, name: str):
        """Compiled whole-phrase regex for one term set, or None if empty."""
        pat = self._patterns.get(name)
        if pat is None and name not in self._patterns:
            terms = sorted(getattr(self, name), key=lambda t: (-len(t), t))
            pat = _compile(tuple(terms)) if terms else None
            self._patterns[name] = pat
        return pat


@lru_cache(maxsize=256)
def _compile(terms: tuple):
    # \w-boundaries so "rate" does not match inside "rates" and accents count as letters
    alts = "|".join(r"\s+".join(re.escape(w) for w in t.split()) for t in terms)
    return re.compile(rf"(?<!\w)(?:{alts})(?!\w)", re.IGNORECASE)


def count_hits(sentence: str, lex: Lexicon, name: str) -> int:
    """Non-overlapping phrase occurrences from one lexicon set.

    Longer phrases win, so "further tightening" counts once even when
    "tightening" is also listed.
    """
    pat = lex.pattern(name)
    return len(pat.findall(sentence)) if pat else 0


def _matches(sentence: str, lex: Lexicon, name: str) -> bool:
    pat = lex.pattern(name)
    return bool(pat and pat.search(sentence))


def load_lexicon(path=None) -> Lexicon:
    """Read a ``term,class`` CSV. ``None`` loads the bundled default."""
    if path is None:
        text = resources.files("eventcurve").joinpath("data/lexicon.csv").read_text(encoding="utf-8")
        source = "<bundled lexicon>"
    else:
        text = Path(path).read_text(encoding="utf-8")
        source = str(path)
    buckets = {c: set() for c in LEXICON_CLASSES}
    reader = csv.reader(text.splitlines())
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != ["term", "class"]:
        raise ParseError("header must be 'term,class'", source, 1)
    for line, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != 2:
            raise ParseError(f"expected 2 fields, got {len(row)}", source, line)
        term, cls = _normalize(row[0]), row[1].strip()
        if cls not in buckets:
            raise ParseError(f"unknown class {cls!r}", source, line, "class")
        if not term:
            raise ParseError("empty term", source, line, "term")
        buckets[cls].add(term)
    try:
        return Lexicon(
            hawk_terms=buckets["hawk"],
            dove_terms=buckets["dove"],
            neutral_markers=buckets["neutral"],
            scope_markers=buckets["scope"],
            uncertainty_terms=buckets["uncertainty"],
            tighten_phrases=buckets["guidance_tighten"],
            ease_phrases=buckets["guidance_ease"],
            explicit_phrases=buckets["guidance_explicit"],
        )
    except ValueError as exc:
        raise ParseError(str(exc), source) from None


# -- sentences ---------------------------------------------------------------

_TERMINATORS = ".!?"
_CLOSERS = "\"')]»”’"


def _is_abbreviation(text: str, dot: int) -> bool:
    j = dot
    while j > 0 and not text[j - 1].isspace() and text[j - 1] not in "([\"'“":
        j -= 1
    token = text[j:dot].lower()
    if not token:
        return False
    if len(token) == 1 and token.isalpha():
        return True
    # dotted initialisms such as "u.s" or "e.g"
    if re.fullmatch(r"(?:[^\W\d_]\.)+[^\W\d_]", token):
        return True
    return token in ABBREVIATIONS


def split_sentences(text: str) -> list[str]:
    """Split on ``.``, ``!`` and ``?`` followed by whitespace or end of text.

    Decimal points never split; a period after a single letter, a dotted
    initialism or a listed abbreviation does not split either.
    """
    sentences = []
    start = 0
    n = len(text)
    i = 0
    while i < n:
        ch = text[i]
        if ch in _TERMINATORS:
            if ch == "." and (
                (0 < i < n - 1 and text[i - 1].isdigit() and text[i + 1].isdigit())
                or _is_abbreviation(text, i)
            ):
                i += 1
                continue
            j = i + 1
            while j < n and (text[j] in _TERMINATORS or text[j] in _CLOSERS):
                j += 1
            if j == n or text[j].isspace():
                chunk = text[start:j].strip()
                if chunk:
                    sentences.append(chunk)
                start = j
                i = j
                continue
        i += 1
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


def classify_sentence(sentence: str, lex: Lexicon) -> SentenceLabel:
    if not _matches(sentence, lex, "scope_markers"):
        return SentenceLabel.OUT_OF_SCOPE
    hawk = count_hits(sentence, lex, "hawk_terms")
    dove = count_hits(sentence, lex, "dove_terms")
    if hawk > dove:
        return SentenceLabel.HAWK
    if dove > hawk:
        return SentenceLabel.DOVE
    return SentenceLabel.NEUTRAL


def aggregate_tone(labels: Iterable[SentenceLabel], denominator: str = "inscope") -> float:
    """(hawk - dove) / in-scope count; ``denominator="polar"`` uses hawk + dove."""
    labels = list(labels)
    n_hawk = sum(lab is SentenceLabel.HAWK for lab in labels)
    n_dove = sum(lab is SentenceLabel.DOVE for lab in labels)
    n_neutral = sum(lab is SentenceLabel.NEUTRAL for lab in labels)
    if denominator == "inscope":
        denom = n_hawk + n_dove + n_neutral
    elif denominator == "polar":
        denom = n_hawk + n_dove
    else:
        raise ValueError(f"unknown tone denominator {denominator!r}")
    if denom == 0:
        return 0.0
    return (n_hawk - n_dove) / denom


def _text(doc) -> str:
    return doc.text if isinstance(doc, StatementDoc) else doc


def extract_guidance(doc, lex: Lexicon) -> tuple[int, float]:
    """Guidance direction and explicitness.

    A sentence is forward-looking when it carries any guidance phrase
    (tightening, easing or explicit commitment). Direction is the sign of
    tightening minus easing hits over those sentences; explicitness is the
    share of them with an explicit-commitment phrase.
    """
    forward = 0
    explicit = 0
    tighten = 0
    ease = 0
    for s in split_sentences(_text(doc)):
        t = count_hits(s, lex, "tighten_phrases")
        e = count_hits(s, lex, "ease_phrases")
        x = _matches(s, lex, "explicit_phrases")
        if not (t or e or x):
            continue
        forward += 1
        tighten += t
        ease += e
        explicit += x
    if forward == 0:
        return 0, 0.0
    direction = (tighten > ease) - (tighten < ease)
    explicitness = min(1.0, max(0.0, explicit / forward))
    return direction, explicitness


def _uncertainty_level(text: str, lex: Lexicon) -> float:
    in_scope = 0
    hits = 0
    for s in split_sentences(text):
        if classify_sentence(s, lex) is SentenceLabel.OUT_OF_SCOPE:
            continue
        in_scope += 1
        hits += count_hits(s, lex, "uncertainty_terms")
    if in_scope == 0:
        return 0.0
    x = hits / in_scope
    return x / (1.0 + x)


def extract_uncertainty(doc, prev_doc, lex: Lexicon) -> tuple[float, float]:
    """Uncertainty level in [0, 1) and its change from ``prev_doc``."""
    level = _uncertainty_level(_text(doc), lex)
    if prev_doc is None:
        return level, 0.0
    return level, level - _uncertainty_level(_text(prev_doc), lex)


@dataclass(frozen=True)
class StatementFeatures:
    tone: float
    guidance_direction: int
    guidance_explicitness: float
    guidance_score: float
    uncertainty_level: float
    uncertainty_change: float

    def __post_init__(self):
        if self.guidance_score != self.guidance_direction * self.guidance_explicitness:
            raise ValueError("guidance_score must equal direction * explicitness")


def score_statement(doc, prev_doc: Optional[object], lex: Lexicon, tone_denominator: str = "inscope") -> StatementFeatures:
    labels = [classify_sentence(s, lex) for s in split_sentences(_text(doc))]
    direction, explicitness = extract_guidance(doc, lex)
    level, change = extract_uncertainty(doc, prev_doc, lex)
    return StatementFeatures(
        tone=aggregate_tone(labels, tone_denominator),
        guidance_direction=direction,
        guidance_explicitness=explicitness,
        guidance_score=direction * explicitness,
        uncertainty_level=level,
        uncertainty_change=change,
    )


def score_corpus(docs: Sequence[StatementDoc], lex: Lexicon, tone_denominator: str = "inscope") -> dict:
    """Score every statement against the one published before it."""
    docs = sorted(docs, key=lambda d: d.statement_date)
    out = {}
    prev = None
    for doc in docs:
        out[doc.statement_date] = score_statement(doc, prev, lex, tone_denominator)
        prev = doc
    return out
