"""Requirement data model: tokens, the five keyed slots, completeness and
ambiguity checks.

A requirement is tagged with up to five kinds of keyed phrases:

* entity     - the main measured object ("the number", "concentration")
* quantifier - the scope of the entity ("taxi", "TVOC")
* location   - where the requirement is in effect
* time       - when the requirement is in effect
* condition  - the numeric constraint ("10", "0.3 cfm per square foot")

Phrases found in the source sentence carry a token span; phrases supplied
later through clarification have no span. Normalized views (a time
interval, a parsed condition, a spatial domain) are attached by the
refinement pass in :mod:`reqspec.extract`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .errors import OverlapError, SchemaError

# Characters detached from chunk edges as standalone tokens. Interior
# occurrences (decimal points, clock colons, mg/m3) stay inside the token.
_EDGE_PUNCT = ".,;:!?()"
_WORD_NUMBERS = {
    "one": 1, "two": 2, "three": 3, "four": 4, "five": 5,
    "six": 6, "seven": 7, "eight": 8, "nine": 9, "ten": 10,
    "eleven": 11, "twelve": 12, "thirteen": 13, "fourteen": 14,
    "fifteen": 15, "sixteen": 16, "seventeen": 17, "eighteen": 18,
    "nineteen": 19, "twenty": 20,
}
_NUMERIC_RE = re.compile(r"\d+(\.\d+)?")


class KeyKind(Enum):
    ENTITY = "entity"
    QUANTIFIER = "quantifier"
    LOCATION = "location"
    TIME = "time"
    CONDITION = "condition"

    def __str__(self):
        return self.value


# Fixed order used whenever kinds are listed or asked about.
KIND_ORDER = (
    KeyKind.LOCATION,
    KeyKind.QUANTIFIER,
    KeyKind.CONDITION,
    KeyKind.ENTITY,
    KeyKind.TIME,
)


def tokenize(text: str) -> list[str]:
    """Split text into tokens.

    Whitespace separates chunks; punctuation ``.,;:!?()`` at chunk edges is
    detached as separate tokens; interior punctuation (hyphens, slashes,
    decimal points, clock colons) stays inside the token.
    """
    return [t for t, _, _ in token_offsets(text)]


def token_offsets(text: str) -> list[tuple[str, int, int]]:
    """Like :func:`tokenize` but each token carries its byte offsets."""
    out = []
    for m in re.finditer(r"\S+", text):
        chunk, start = m.group(), m.start()
        lo, hi = 0, len(chunk)
        prefix = []
        while lo < hi and chunk[lo] in _EDGE_PUNCT:
            prefix.append((chunk[lo], start + lo, start + lo + 1))
            lo += 1
        suffix = []
        while hi > lo and chunk[hi - 1] in _EDGE_PUNCT:
            suffix.append((chunk[hi - 1], start + hi - 1, start + hi))
            hi -= 1
        out.extend(prefix)
        if hi > lo:
            out.append((chunk[lo:hi], start + lo, start + hi))
        out.extend(reversed(suffix))
    return out


def detokenize(tokens: list[str]) -> str:
    """Join tokens with single spaces (canonical whitespace form)."""
    return " ".join(tokens)


def normalize_phrase(text: str) -> str:
    """Lowercased, whitespace-collapsed form used for matching and caching."""
    return " ".join(text.lower().split())


def strip_articles(text: str) -> str:
    """Drop leading determiners ("the number" -> "number")."""
    words = text.split()
    while words and words[0].lower() in ("the", "a", "an", "all"):
        words = words[1:]
    return " ".join(words) if words else text


def singularize(word: str) -> str:
    """Naive plural stripping used for vocabulary matching."""
    lower = word.lower()
    if lower.endswith("ies") and len(lower) > 4:
        return word[:-3] + "y"
    if lower.endswith("ses") or lower.endswith("xes") or lower.endswith("zes"):
        return word[:-2]
    if lower.endswith("s") and not lower.endswith("ss") and len(lower) > 3:
        return word[:-1]
    return word


def stem_phrase(text: str) -> str:
    """Singularize the last word of a phrase ("vending vehicles" -> "vending vehicle")."""
    words = text.split()
    if not words:
        return text
    return " ".join(words[:-1] + [singularize(words[-1])])


@dataclass(frozen=True)
class KeyedPhrase:
    """One keyed phrase. ``span`` is a half-open token index range in the
    source sentence, or None when the phrase came from a clarification
    answer rather than the sentence itself. ``canon`` is the vocabulary
    form the phrase matched ("taxis" -> "taxi"); empty when the surface
    text already is the canonical form."""

    kind: KeyKind
    text: str
    span: Optional[tuple[int, int]] = None
    confidence: float = 1.0
    canon: str = ""

    def __post_init__(self):
        if self.span is not None:
            lo, hi = self.span
            if lo < 0 or hi <= lo:
                raise ValueError(f"empty or negative span {self.span}")
        if not (0.0 <= self.confidence <= 1.0):
            raise ValueError(f"confidence {self.confidence} outside [0,1]")

    @property
    def canonical(self) -> str:
        return self.canon or self.text

    def check_against(self, tokens: list[str]):
        """Verify span validity and text/span agreement for a token list."""
        if self.span is None:
            return
        lo, hi = self.span
        if hi > len(tokens):
            raise OverlapError(f"span {self.span} beyond {len(tokens)} tokens")
        joined = detokenize(tokens[lo:hi])
        if joined != self.text:
            raise OverlapError(
                f"phrase text {self.text!r} does not match span tokens {joined!r}")


class SlotSet:
    """The keyed phrases extracted from one requirement, plus normalized
    views filled in by refinement.

    Multiple phrases per kind are allowed (a requirement can name two
    locations); spans of distinct phrases never overlap.
    """

    def __init__(self, phrases=()):
        self._phrases: dict[KeyKind, list[KeyedPhrase]] = {k: [] for k in KeyKind}
        # Normalized views; populated by reqspec.extract.refine.
        self.time_interval = None      # sastl.TimeInterval
        self.condition = None          # extract.ConditionParse
        self.spatial_domain = None     # sastl.SpatialDomain
        self.notes: list[str] = []
        self.issues: list[tuple[KeyKind, str, str]] = []
        for p in phrases:
            self.add(p)

    def add(self, phrase: KeyedPhrase):
        if phrase.span is not None:
            for existing in self.all_phrases():
                if existing.span is None:
                    continue
                lo, hi = phrase.span
                elo, ehi = existing.span
                if lo < ehi and elo < hi:
                    raise OverlapError(
                        f"span {phrase.span} overlaps {existing.span} "
                        f"({existing.kind.value})")
        self._phrases[phrase.kind].append(phrase)

    def replace_kind(self, kind: KeyKind, phrase: KeyedPhrase):
        """Drop all phrases of ``kind`` and install the given one."""
        self._phrases[kind] = []
        self.add(phrase)

    def get(self, kind: KeyKind) -> list[KeyedPhrase]:
        return list(self._phrases[kind])

    def first_text(self, kind: KeyKind) -> Optional[str]:
        phrases = self._phrases[kind]
        return phrases[0].text if phrases else None

    def has(self, kind: KeyKind) -> bool:
        return bool(self._phrases[kind])

    def kinds_present(self) -> list[KeyKind]:
        return [k for k in KIND_ORDER if self._phrases[k]]

    def all_phrases(self) -> list[KeyedPhrase]:
        out = []
        for k in KIND_ORDER:
            out.extend(self._phrases[k])
        return out

    def copy(self) -> "SlotSet":
        dup = SlotSet(self.all_phrases())
        dup.time_interval = self.time_interval
        dup.condition = self.condition
        dup.spatial_domain = self.spatial_domain
        dup.notes = list(self.notes)
        dup.issues = list(self.issues)
        return dup

    def __eq__(self, other):
        if not isinstance(other, SlotSet):
            return NotImplemented
        return self._phrases == other._phrases

    def __repr__(self):
        parts = [f"{k.value}={[p.text for p in v]}" for k, v in self._phrases.items() if v]
        return "SlotSet(" + ", ".join(parts) + ")"

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            kind.value: [
                {
                    "text": p.text,
                    "span": list(p.span) if p.span else None,
                    "confidence": p.confidence,
                    **({"canon": p.canon} if p.canon else {}),
                }
                for p in self._phrases[kind]
            ]
            for kind in KeyKind
            if self._phrases[kind]
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SlotSet":
        slots = cls()
        for key, entries in data.items():
            try:
                kind = KeyKind(key)
            except ValueError:
                raise SchemaError(f"unknown key kind {key!r}")
            for entry in entries:
                span = tuple(entry["span"]) if entry.get("span") else None
                slots.add(KeyedPhrase(kind, entry["text"], span,
                                      entry.get("confidence", 1.0),
                                      entry.get("canon", "")))
        return slots


@dataclass
class Requirement:
    id: str
    source_text: str
    tokens: list[str] = field(default_factory=list)
    slots: SlotSet = field(default_factory=SlotSet)
    status: str = "draft"  # draft | awaiting_clarification | proposed | confirmed
    formula = None

    def __post_init__(self):
        if not self.tokens and self.source_text:
            self.tokens = tokenize(self.source_text)

    def to_dict(self) -> dict:
        from .sastl import print_formula

        return {
            "id": self.id,
            "source_text": self.source_text,
            "tokens": self.tokens,
            "slots": self.slots.to_dict(),
            "status": self.status,
            "formula": print_formula(self.formula) if self.formula else None,
        }


def completeness_check(slots: SlotSet, strict: bool = False) -> list[KeyKind]:
    """Kinds that still need an answer before a specification can be built.

    Lenient mode (default): a missing time defaults to the unbounded
    interval and is reported by :func:`defaulted_kinds`, not here; entity
    and quantifier stand in for each other, so only their joint absence is
    missing (reported as entity). Strict mode demands all five kinds.
    """
    if strict:
        return [k for k in KIND_ORDER if not slots.has(k)]
    missing = []
    for kind in KIND_ORDER:
        if kind is KeyKind.TIME:
            continue
        if kind in (KeyKind.ENTITY, KeyKind.QUANTIFIER):
            continue
        if not slots.has(kind):
            missing.append(kind)
    if not slots.has(KeyKind.ENTITY) and not slots.has(KeyKind.QUANTIFIER):
        missing.append(KeyKind.ENTITY)
    return missing


def defaulted_kinds(slots: SlotSet) -> list[KeyKind]:
    """Kinds silently filled with a default under lenient completeness."""
    out = []
    if not slots.has(KeyKind.TIME):
        out.append(KeyKind.TIME)
    if slots.has(KeyKind.ENTITY) != slots.has(KeyKind.QUANTIFIER):
        out.append(KeyKind.QUANTIFIER if slots.has(KeyKind.ENTITY) else KeyKind.ENTITY)
    return out


def contains_number(text: str) -> bool:
    if _NUMERIC_RE.search(text):
        return True
    return any(w.lower() in _WORD_NUMBERS for w in tokenize(text))


def word_number(token: str) -> Optional[int]:
    return _WORD_NUMBERS.get(token.lower())


def ambiguity_check(slots: SlotSet, vague_terms: list[str]) -> list[tuple[KeyKind, str, str]]:
    """Phrases too vague to convert, as (kind, phrase, reason) triples.

    A phrase is flagged when it contains a configured vague term (matched
    on word boundaries, case-insensitive); a condition is flagged when it
    carries no numeric constant at all.
    """
    flagged = []
    patterns = [
        (term, re.compile(r"\b" + re.escape(term.lower()) + r"\b"))
        for term in vague_terms
    ]
    for phrase in slots.all_phrases():
        lowered = normalize_phrase(phrase.text)
        for term, pat in patterns:
            if pat.search(lowered):
                flagged.append((phrase.kind, phrase.text, f"vague term {term!r}"))
                break
    for phrase in slots.get(KeyKind.CONDITION):
        if not contains_number(phrase.text):
            flagged.append((KeyKind.CONDITION, phrase.text, "no numeric constant"))
    return flagged
