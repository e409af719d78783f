"""Translation front-end: a pluggable tagger contract, the deterministic
lexicon+pattern reference tagger, and the refinement passes that normalize
time, conditions (with negation handling), and locations.

The tagger interface is deliberately small so a learned model can be
dropped in later: anything with ``tag(text, kb) -> SlotSet`` qualifies,
and :func:`validated` wraps an implementation with the span-invariant
checks a well-behaved tagger must satisfy.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from typing import Optional, Protocol

from .errors import AmbiguousTime, NoNumericConstant, TaggerContractViolation
from .knowledge import KnowledgeBase
from .reqmodel import (
    KeyKind, KeyedPhrase, SlotSet, detokenize, normalize_phrase, stem_phrase,
    strip_articles, tokenize, word_number,
)
from .sastl import (
    Comparator, INF, PropAnd, PropLabel, SpatialDomain, TimeInterval,
    UNBOUNDED, sanitize_name,
)

# Kinds competing for the same span lose to the earlier entry here.
TIE_PRIORITY = (KeyKind.LOCATION, KeyKind.TIME, KeyKind.CONDITION,
                KeyKind.QUANTIFIER, KeyKind.ENTITY)

VOCAB_CONFIDENCE = 1.0
HEURISTIC_CONFIDENCE = 0.6

_SENTENCE_PUNCT = {".", ";", "!", "?", ":"}
_NEGATION_CUES = {"not", "no", "never"}

_UNIT_WORDS = {
    "per", "square", "cubic", "foot", "feet", "meter", "meters", "metre",
    "metres", "mile", "miles", "hour", "hours", "minute", "minutes",
    "second", "seconds", "day", "days", "mg", "kg", "g", "cfm", "db",
    "decibel", "decibels", "mph", "ppm", "percent", "degree", "degrees",
    "people", "persons", "vehicles", "micrograms", "microgram", "liters",
    "litres", "gallon", "gallons", "kw", "kwh", "drones",
}
_DISTANCE_UNITS = {"meter", "meters", "metre", "metres", "foot", "feet",
                   "mile", "miles", "m", "km", "block", "blocks"}
_NP_STOP_WORDS = {
    "should", "shall", "must", "may", "will", "can", "cannot", "between",
    "from", "during", "for", "when", "while", "if", "unless", "and", "or",
}
_NUMERIC_TOKEN_RE = re.compile(r"^\d[\d,]*(\.\d+)?$")
_ALNUM_UNIT_RE = re.compile(r"^[A-Za-z]+\d+$")  # m3, km2

_ISO_DATE_RE = re.compile(r"^(\d{4})-(\d{2})-(\d{2})$")
_US_DATE_RE = re.compile(r"^(\d{2})-(\d{2})-(\d{4})$")
_CLOCK_RE = re.compile(r"^(\d{1,2})(?::(\d{2}))?$")

_RANGE_RE = re.compile(
    r"^(?:from|between)\s+(?P<a>.+?)\s+(?:to|and|until)\s+(?P<b>.+)$",
    re.IGNORECASE,
)
_UNBOUNDED_PHRASES = {
    "", "always", "every day", "at any time", "at all times", "all the time",
    "daily", "anytime",
}


def load_comparator_lexicon(path=None) -> dict[str, Comparator]:
    """Phrase -> comparator map; longest phrase wins at match time."""
    if path is None:
        src = resources.files("reqspec.data").joinpath("comparators.json")
        raw = json.loads(src.read_text(encoding="utf-8"))
    else:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    return {normalize_phrase(k): Comparator[v] for k, v in raw.items()}


def load_vague_terms(path=None) -> list[str]:
    if path is None:
        src = resources.files("reqspec.data").joinpath("vague_terms.json")
        raw = json.loads(src.read_text(encoding="utf-8"))
    else:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    return list(raw["vague_terms"])


# -- time normalization -------------------------------------------------------

def _parse_clock(text: str) -> Optional[Fraction]:
    """One clock mark -> hours. Accepts "8:00", "16:00", "7 am", "7:30 pm",
    "noon", "midnight"."""
    words = text.lower().replace(".", "").split()
    if not words:
        return None
    if words == ["noon"]:
        return Fraction(12)
    if words == ["midnight"]:
        return Fraction(0)
    meridiem = ""
    if words[-1] in ("am", "pm"):
        meridiem = words[-1]
        words = words[:-1]
    if len(words) != 1:
        return None
    m = _CLOCK_RE.match(words[0])
    if not m:
        return None
    hours = int(m.group(1))
    minutes = int(m.group(2) or 0)
    if hours > 24 or minutes >= 60:
        return None
    value = Fraction(hours) + Fraction(minutes, 60)
    if meridiem == "pm" and hours < 12:
        value += 12
    elif meridiem == "am" and hours == 12:
        value -= 12
    return value


def normalize_time(phrase: str) -> TimeInterval:
    """Map a time phrase to an interval in hours.

    Recognizes "from H1 to H2" and "between H1 and/to H2" with am/pm or
    24h clocks, the unbounded defaults ("always", "every day", empty), and
    single dates (kept as a date tag on the [0,24] interval). Anything
    else, including "after midnight", raises AmbiguousTime so the dialogue
    can ask.
    """
    text = " ".join(phrase.split())
    lowered = text.lower().strip(".")
    if lowered in _UNBOUNDED_PHRASES:
        return UNBOUNDED
    m = _ISO_DATE_RE.match(text)
    if m:
        return TimeInterval(0, 24, date=text)
    m = _US_DATE_RE.match(text)
    if m:
        month, day, year = m.groups()
        return TimeInterval(0, 24, date=f"{year}-{month}-{day}")
    m = _RANGE_RE.match(lowered)
    if m:
        lo = _parse_clock(m.group("a"))
        hi = _parse_clock(m.group("b"))
        if lo is not None and hi is not None and lo <= hi:
            return TimeInterval(lo, hi)
    raise AmbiguousTime(phrase)


def time_like(phrase: str) -> bool:
    """Whether a phrase reads as a time expression at all (even an
    ambiguous one such as "after midnight")."""
    lowered = normalize_phrase(phrase)
    if lowered.startswith("after ") or lowered.startswith("before "):
        return True
    try:
        normalize_time(phrase)
        return True
    except AmbiguousTime:
        return False


# -- negation -------------------------------------------------------------

def clause_bounds(tokens: list[str], index: int) -> tuple[int, int]:
    """Token range of the clause containing ``index`` (clauses are cut at
    sentence punctuation)."""
    lo = index
    while lo > 0 and tokens[lo - 1] not in _SENTENCE_PUNCT:
        lo -= 1
    hi = index
    while hi < len(tokens) and tokens[hi] not in _SENTENCE_PUNCT:
        hi += 1
    return lo, hi


def detect_negation(tokens: list[str], anchor_span: tuple[int, int],
                    exclude_span: Optional[tuple[int, int]] = None) -> bool:
    """True when an odd number of negation cues shares the clause with the
    anchor. Cues inside ``exclude_span`` (the comparator phrase itself, so
    the "no" of "no more than" does not count) are ignored."""
    lo, hi = clause_bounds(tokens, anchor_span[0])
    count = 0
    for i in range(lo, hi):
        if exclude_span and exclude_span[0] <= i < exclude_span[1]:
            continue
        word = tokens[i].lower()
        if word in _NEGATION_CUES or word.endswith("n't"):
            count += 1
    return count % 2 == 1


# -- condition parsing ------------------------------------------------------

@dataclass(frozen=True)
class ConditionParse:
    comparator: Comparator
    constant: Fraction
    unit: str = ""
    negated: bool = False  # comparator is stored post-flip


def _normalize_unit(words: list[str]) -> str:
    """"cfm per square foot" -> "cfm/foot^2"; "miles per hour" -> "miles/hour"."""
    parts = []
    sep = ""
    power = ""
    for word in words:
        lower = word.lower()
        if lower == "per":
            sep = "/"
            continue
        if lower == "square":
            power = "^2"
            continue
        if lower == "cubic":
            power = "^3"
            continue
        if parts and not sep:
            sep = "-"
        parts.append(sep + word + power)
        sep = ""
        power = ""
    return "".join(parts)


def _first_number(tokens: list[str]) -> Optional[tuple[int, Fraction]]:
    for i, tok in enumerate(tokens):
        if _NUMERIC_TOKEN_RE.match(tok):
            return i, Fraction(tok.replace(",", ""))
        value = word_number(tok)
        if value is not None:
            return i, Fraction(value)
    return None


def find_comparator(tokens: list[str], window: tuple[int, int],
                    lexicon: dict[str, Comparator]):
    """Longest lexicon phrase inside the token window, as
    (comparator, span) or None."""
    lows = [t.lower() for t in tokens]
    best = None
    for phrase, cmp in lexicon.items():
        words = phrase.split()
        size = len(words)
        for i in range(window[0], window[1] - size + 1):
            if lows[i:i + size] == words:
                if best is None or size > best[2]:
                    best = (cmp, (i, i + size), size)
    if best is None:
        return None
    return best[0], best[1]


def parse_condition(text: str, slots: SlotSet,
                    lexicon: dict[str, Comparator]) -> ConditionParse:
    """Normalize the condition slot against its surrounding clause.

    The comparator comes from the longest lexicon phrase in the clause
    (default <= when none is worded); the constant is the first number of
    the condition phrase, with number words one..twenty understood; the
    unit is the token run trailing the number. A negation cue in the
    clause (outside the comparator phrase) flips the comparator.
    """
    tokens = tokenize(text)
    cond = slots.get(KeyKind.CONDITION)
    if cond and cond[0].span is not None:
        span = cond[0].span
        cond_tokens = tokens[span[0]:span[1]]
    elif cond:
        span = None
        cond_tokens = tokenize(cond[0].text)
    else:
        span = None
        cond_tokens = tokens
    found = _first_number(cond_tokens)
    if found is None:
        raise NoNumericConstant(detokenize(cond_tokens))
    num_index, constant = found
    unit = _normalize_unit(cond_tokens[num_index + 1:])

    if span is not None:
        clause = clause_bounds(tokens, span[0])
        anchor = span
        search_tokens = tokens
    else:
        search_tokens = cond_tokens if not cond else tokenize(cond[0].text)
        clause = (0, len(search_tokens))
        anchor = (0, len(search_tokens))

    hit = find_comparator(search_tokens, clause, lexicon)
    if hit:
        comparator, cmp_span = hit
    else:
        comparator, cmp_span = Comparator.LE, None

    negated = detect_negation(search_tokens, anchor, exclude_span=cmp_span)
    if negated:
        comparator = comparator.flip()
    return ConditionParse(comparator, constant, unit, negated)


# -- location normalization ---------------------------------------------------

_DISTANCE_RE = re.compile(
    r"^within\s+(\d+(?:\.\d+)?)\s+(\w+)\s+of\s+(.+)$", re.IGNORECASE)


def location_to_domain(phrase: str) -> SpatialDomain:
    """"within 200 meters of all the schools" -> school within [0,200];
    a bare place name becomes its own label with no distance bound."""
    text = " ".join(phrase.split()).strip(".")
    m = _DISTANCE_RE.match(text)
    if m and m.group(2).lower() in _DISTANCE_UNITS:
        distance = Fraction(m.group(1))
        target = strip_articles(m.group(3))
        label = stem_phrase(sanitize_name(target))
        return SpatialDomain(PropLabel(label), 0, distance)
    return SpatialDomain(PropLabel(sanitize_name(text)))


def _merge_domains(domains: list[SpatialDomain]) -> SpatialDomain:
    prop = domains[0].proposition
    lo = domains[0].distance_lo
    hi = domains[0].distance_hi
    for dom in domains[1:]:
        prop = PropAnd(prop, dom.proposition)
        lo = max(lo, dom.distance_lo)
        hi = min(hi, dom.distance_hi)
    if not (isinstance(hi, float) and hi == INF) and lo >= hi:
        lo = Fraction(0)  # contradictory bands from distinct phrases
    return SpatialDomain(prop, lo, hi)


# -- the tagger contract -------------------------------------------------------

class Tagger(Protocol):
    def tag(self, text: str, kb: KnowledgeBase) -> SlotSet: ...


class _CheckedTagger:
    """Wrapper enforcing the slot-set invariants on any tagger's output."""

    def __init__(self, inner: Tagger):
        self.inner = inner

    def tag(self, text: str, kb: KnowledgeBase) -> SlotSet:
        slots = self.inner.tag(text, kb)
        tokens = tokenize(text)
        try:
            rebuilt = SlotSet()
            for phrase in slots.all_phrases():
                phrase.check_against(tokens)
                rebuilt.add(phrase)
        except Exception as exc:
            raise TaggerContractViolation(str(exc)) from exc
        return slots


def validated(tagger: Tagger) -> Tagger:
    return _CheckedTagger(tagger)


class LexiconTagger:
    """Deterministic reference tagger: greedy longest match over the
    knowledge-base vocabulary, then time/location/number heuristics over
    whatever is left. Confidence is 1.0 for vocabulary hits and 0.6 for
    heuristic ones."""

    def tag(self, text: str, kb: KnowledgeBase) -> SlotSet:
        tokens = tokenize(text)
        lows = [t.lower() for t in tokens]
        n = len(tokens)
        claimed = [False] * n
        found: list[KeyedPhrase] = []

        def claim(kind, start, end, confidence, canon=""):
            for i in range(start, end):
                claimed[i] = True
            found.append(KeyedPhrase(kind, detokenize(tokens[start:end]),
                                     (start, end), confidence, canon))

        max_len = max((len(t.split()) for k in KeyKind for t in kb.terms(k)),
                      default=1)

        # Pass 1: vocabulary, greedy longest match, left to right.
        i = 0
        while i < n:
            if claimed[i]:
                i += 1
                continue
            size = kind = canon = None
            for size in range(min(max_len, n - i), 0, -1):
                if any(claimed[i + d] for d in range(size)):
                    continue
                window = " ".join(lows[i:i + size])
                kinds = kb.kinds_of(window)
                if kinds:
                    kind = self._break_tie(kinds, kb, lows, i, i + size)
                    canon = kb.term(kind, window)
                    break
                stemmed = normalize_phrase(stem_phrase(window))
                if stemmed != window and kb.has_term(KeyKind.QUANTIFIER, stemmed):
                    kind = KeyKind.QUANTIFIER
                    canon = kb.term(KeyKind.QUANTIFIER, stemmed)
                    break
            if kind is not None:
                claim(kind, i, i + size, VOCAB_CONFIDENCE, canon)
                i += size
            else:
                i += 1

        self._claim_times(tokens, claimed, claim)
        self._claim_distance_locations(tokens, lows, claimed, claim)
        self._claim_numeric_conditions(tokens, lows, claimed, claim)

        found.sort(key=lambda p: p.span[0])
        return SlotSet(found)

    @staticmethod
    def _break_tie(kinds, kb, lows, start, end):
        if len(kinds) == 1:
            return kinds[0]
        prev_word = lows[start - 1] if start > 0 else ""
        next_word = lows[end] if end < len(lows) else ""
        scores = {}
        for pattern in kb.patterns():
            words = pattern.lower().split()
            for idx, word in enumerate(words):
                if not word.startswith("#"):
                    continue
                kind_name = word.lstrip("#").strip(".,;:!?")
                try:
                    kind = KeyKind(kind_name)
                except ValueError:
                    continue
                if kind not in kinds:
                    continue
                score = 0
                if idx > 0 and words[idx - 1] == prev_word:
                    score += 1
                if idx + 1 < len(words) and words[idx + 1].strip(".,;:!?") == next_word:
                    score += 1
                scores[kind] = max(scores.get(kind, 0), score)
        best = max(scores.values(), default=0)
        if best > 0:
            contenders = [k for k in kinds if scores.get(k, 0) == best]
        else:
            contenders = kinds
        return min(contenders, key=TIE_PRIORITY.index)

    @staticmethod
    def _claim_times(tokens, claimed, claim):
        n = len(tokens)
        for i in range(n):
            if claimed[i]:
                continue
            low = tokens[i].lower()
            if low in ("from", "between"):
                for size in range(min(8, n - i), 3, -1):
                    if any(claimed[i + d] for d in range(size)):
                        continue
                    window = detokenize(tokens[i:i + size])
                    try:
                        normalize_time(window)
                    except AmbiguousTime:
                        continue
                    if normalize_time(window).unbounded_default:
                        continue
                    claim(KeyKind.TIME, i, i + size, HEURISTIC_CONFIDENCE)
                    break
            elif low == "after" and i + 1 < n and tokens[i + 1].lower() == "midnight" \
                    and not claimed[i + 1]:
                claim(KeyKind.TIME, i, i + 2, HEURISTIC_CONFIDENCE)
            elif _ISO_DATE_RE.match(tokens[i]) or _US_DATE_RE.match(tokens[i]):
                claim(KeyKind.TIME, i, i + 1, HEURISTIC_CONFIDENCE)

    @staticmethod
    def _claim_distance_locations(tokens, lows, claimed, claim):
        n = len(tokens)
        for i in range(n):
            if claimed[i] or lows[i] != "within":
                continue
            if i + 3 >= n:
                continue
            if not _NUMERIC_TOKEN_RE.match(tokens[i + 1]):
                continue
            if lows[i + 2] not in _DISTANCE_UNITS or lows[i + 3] != "of":
                continue
            end = i + 4
            while (end < n and not claimed[end]
                   and tokens[end] not in _SENTENCE_PUNCT and tokens[end] != ","
                   and lows[end] not in _NP_STOP_WORDS):
                end += 1
            if end > i + 4 and not any(claimed[i:end]):
                claim(KeyKind.LOCATION, i, end, HEURISTIC_CONFIDENCE)

    @staticmethod
    def _claim_numeric_conditions(tokens, lows, claimed, claim):
        n = len(tokens)
        for i in range(n):
            if claimed[i]:
                continue
            if not (_NUMERIC_TOKEN_RE.match(tokens[i]) or word_number(tokens[i]) is not None):
                continue
            end = i + 1
            while end < n and not claimed[end]:
                low = lows[end]
                if low in _UNIT_WORDS or "/" in low or _ALNUM_UNIT_RE.match(low):
                    end += 1
                else:
                    break
            claim(KeyKind.CONDITION, i, end, HEURISTIC_CONFIDENCE)


# -- refinement ---------------------------------------------------------------

def refine(slots: SlotSet, text: str, kb: KnowledgeBase,
           lexicon: dict[str, Comparator]) -> SlotSet:
    """Attach normalized views to a tagged slot set.

    Fills the time interval (falling back to a scan of the sentence when
    no time slot was tagged, then to the unbounded default), the parsed
    condition (with negation folded into the comparator), and the spatial
    domain. Problems that need the user are recorded as issues on the
    returned slot set rather than raised, so the dialogue can ask.
    Idempotent: refining the result again changes nothing.
    """
    out = slots.copy()
    out.issues = []
    out.notes = []

    # Time: tagged phrase, else sentence scan, else unbounded default.
    # With several time phrases the first clock interval wins; periodicity
    # markers alongside it ("every day") are noted, not combined.
    time_phrases = out.get(KeyKind.TIME)
    if time_phrases:
        intervals = []
        ambiguous = None
        for phrase in time_phrases:
            try:
                intervals.append((phrase, normalize_time(phrase.text)))
            except AmbiguousTime:
                if ambiguous is None:
                    ambiguous = phrase
        bounded = [pair for pair in intervals if pair[1].bounded or pair[1].date]
        if bounded:
            out.time_interval = bounded[0][1]
            for phrase, interval in intervals:
                if not (interval.bounded or interval.date):
                    out.notes.append(
                        f"periodicity marker {phrase.text!r} dropped in favor "
                        f"of the clock interval")
        elif intervals:
            out.time_interval = intervals[0][1]
        else:
            out.time_interval = None
        if out.time_interval is None and ambiguous is not None:
            out.issues.append((KeyKind.TIME, ambiguous.text, "ambiguous time"))
    else:
        out.time_interval = UNBOUNDED
        out.notes.append("time defaulted to [0,inf)")

    # Condition.
    if out.has(KeyKind.CONDITION):
        try:
            out.condition = parse_condition(text, out, lexicon)
        except NoNumericConstant:
            out.condition = None
            out.issues.append((KeyKind.CONDITION,
                               out.first_text(KeyKind.CONDITION),
                               "no numeric constant"))
    else:
        out.condition = None

    # Location.
    locations = out.get(KeyKind.LOCATION)
    if locations:
        out.spatial_domain = _merge_domains(
            [location_to_domain(p.text) for p in locations])
    else:
        out.spatial_domain = None
    return out
