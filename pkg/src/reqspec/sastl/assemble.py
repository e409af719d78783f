"""Build a full specification from a refined slot set, and render the
bracketed template sentence used to confirm it with the user.

The assembled formula always has the shape

    Everywhere_{location} Always_[time] <constraint>

where the constraint is a plain comparison, an aggregate comparison when
the entity phrase carries an aggregation keyword, or a count-style
comparison ("number of taxi < 10") for counting entities.
"""

from __future__ import annotations

from fractions import Fraction

from ..errors import IncompleteSlots
from ..reqmodel import KeyKind, SlotSet, normalize_phrase, strip_articles
from .ast import (
    Aggregate, Always, Atom, Everywhere, Formula, SpatialDomain, TimeInterval,
    UNBOUNDED, sanitize_name,
)
from .printer import format_number

AGG_KEYWORDS = {
    "average": "avg",
    "mean": "avg",
    "maximum": "max",
    "minimum": "min",
    "total": "sum",
}

_COUNT_HEADS = ("number", "count")


def _aggregation_op(entity_text: str):
    """(op, remainder) when the entity phrase names an aggregation."""
    words = entity_text.split()
    for i, word in enumerate(words):
        op = AGG_KEYWORDS.get(word.lower())
        if op:
            rest = " ".join(words[:i] + words[i + 1:])
            return op, rest
    return None, entity_text


def _is_counting(entity_text: str) -> bool:
    head = strip_articles(entity_text).lower()
    return head in _COUNT_HEADS or any(head.startswith(h + " of") for h in _COUNT_HEADS)


def _compose_variable(slots: SlotSet, entity_text: str) -> str:
    """Join entity and quantifier into one signal name.

    Word order follows the source sentence when both spans are known
    ("Golf Cart" before "speed" gives "Golf Cart speed"); otherwise the
    entity leads ("concentration of TVOC"). The quantifier is dropped when
    it duplicates the location or is already part of the entity.
    """
    entity = slots.get(KeyKind.ENTITY)
    quant = slots.get(KeyKind.QUANTIFIER)
    e_text = strip_articles(entity_text) if entity_text else ""
    if not quant:
        return e_text
    q_text = strip_articles(quant[0].canonical)
    if not e_text:
        return q_text
    loc = slots.first_text(KeyKind.LOCATION)
    if loc and normalize_phrase(q_text) == normalize_phrase(strip_articles(loc)):
        return e_text
    if normalize_phrase(q_text) in normalize_phrase(e_text):
        return e_text
    e_span = entity[0].span if entity else None
    q_span = quant[0].span
    if e_span and q_span and q_span[0] < e_span[0]:
        return f"{q_text} {e_text}"
    return f"{e_text} of {q_text}"


def _require_normalized(slots: SlotSet):
    missing = []
    if slots.spatial_domain is None:
        missing.append(KeyKind.LOCATION)
    if slots.condition is None:
        missing.append(KeyKind.CONDITION)
    if not slots.has(KeyKind.ENTITY) and not slots.has(KeyKind.QUANTIFIER):
        missing.append(KeyKind.ENTITY)
    if missing:
        raise IncompleteSlots(missing)


def assemble_specification(slots: SlotSet) -> Formula:
    """Turn a complete, refined slot set into its formula.

    Raises IncompleteSlots when the location, condition, or both
    entity and quantifier are absent; a missing time falls back to the
    unbounded interval.
    """
    _require_normalized(slots)
    domain: SpatialDomain = slots.spatial_domain
    interval: TimeInterval = slots.time_interval or UNBOUNDED
    cond = slots.condition

    entity_text = ""
    if slots.has(KeyKind.ENTITY):
        entity_text = slots.get(KeyKind.ENTITY)[0].canonical

    op, remainder = _aggregation_op(entity_text)
    if _is_counting(entity_text):
        quant = slots.get(KeyKind.QUANTIFIER)
        counted = strip_articles(quant[0].canonical) if quant else ""
        var = f"number of {counted}" if counted else "number"
        inner = Atom(sanitize_name(var), cond.comparator, cond.constant, cond.unit)
    elif op:
        var = _compose_variable(slots, remainder)
        inner = Aggregate(op, domain, sanitize_name(var), cond.comparator,
                          cond.constant)
    else:
        var = _compose_variable(slots, entity_text)
        inner = Atom(sanitize_name(var), cond.comparator, cond.constant, cond.unit)
    return Everywhere(domain, Always(interval, inner))


def format_clock(hours) -> str:
    """Hours-as-rational to H:MM clock text (7.5 -> "7:30")."""
    frac = Fraction(hours)
    whole = int(frac)
    minutes = int(round((frac - whole) * 60))
    if minutes == 60:
        whole, minutes = whole + 1, 0
    return f"{whole}:{minutes:02d}"


def format_time_phrase(interval: TimeInterval) -> str:
    if interval.date:
        return f"on {interval.date}"
    if not interval.bounded:
        return "always"
    return f"between {format_clock(interval.lo)} to {format_clock(interval.hi)}"


def render_template(slots: SlotSet) -> str:
    """Bracketed confirmation sentence:

    [entity] of [quantifier] should be [cmp] [condition] [time] [location]
    """
    _require_normalized(slots)
    cond = slots.condition
    interval = slots.time_interval or UNBOUNDED

    entity = slots.get(KeyKind.ENTITY)
    quant = slots.get(KeyKind.QUANTIFIER)
    if entity:
        head = strip_articles(entity[0].canonical)
        if quant:
            head = f"[{head}] of [{strip_articles(quant[0].canonical)}]"
        else:
            head = f"[{head}]"
    else:
        head = f"[{strip_articles(quant[0].canonical)}]"

    cond_text = format_number(cond.constant)
    if cond.unit:
        cond_text += f" {cond.unit}"
    locations = " and ".join(p.text for p in slots.get(KeyKind.LOCATION))

    return (f"{head} should be [{cond.comparator.value}] [{cond_text}] "
            f"[{format_time_phrase(interval)}] [{locations}]")
