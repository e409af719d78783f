"""Seeded random formula generator for round-trip and law testing."""

from __future__ import annotations

import random
from fractions import Fraction

from .ast import (
    AGG_OPS, Aggregate, Always, And, Atom, Comparator, Count, Eventually,
    Everywhere, Formula, INF, Not, Prop, PropAnd, PropLabel, PropNot, PropOr,
    PropTrue, Somewhere, SpatialDomain, TimeInterval, TrueF, Until,
)

_NAME_WORDS = [
    "speed", "noise", "level", "rate", "flow", "density", "count", "drift",
    "taxi", "bus", "sensor", "zone", "output", "pressure", "Cart", "air",
    "water", "energy", "north", "south", "usage", "traffic",
]
_LABELS = [
    "school", "park", "block", "station", "bridge", "mall", "harbor",
    "library", "airport", "plaza", "market", "tunnel", "campus",
]
_UNITS = ["", "", "mg/m3", "miles/hour", "db", "cfm/foot^2", "percent", "kw", "ppm"]


def _name(rng: random.Random) -> str:
    return " ".join(rng.sample(_NAME_WORDS, rng.randint(1, 3)))


def _number(rng: random.Random) -> Fraction:
    style = rng.randrange(4)
    if style == 0:
        return Fraction(rng.randint(-50, 200))
    if style == 1:
        return Fraction(rng.randint(1, 9999), 10 ** rng.randint(1, 3))
    if style == 2:
        return Fraction(rng.randint(1, 99), rng.choice([3, 7, 11, 13]))
    return Fraction(0)


def _interval(rng: random.Random) -> TimeInterval:
    lo = abs(_number(rng))
    if rng.random() < 0.4:
        return TimeInterval(lo, INF)
    return TimeInterval(lo, lo + abs(_number(rng)))


def _prop(rng: random.Random, depth: int) -> Prop:
    if depth <= 0 or rng.random() < 0.5:
        if rng.random() < 0.1:
            return PropTrue()
        return PropLabel(rng.choice(_LABELS))
    pick = rng.randrange(3)
    if pick == 0:
        return PropNot(_prop(rng, depth - 1))
    if pick == 1:
        return PropOr(_prop(rng, depth - 1), _prop(rng, depth - 1))
    return PropAnd(_prop(rng, depth - 1), _prop(rng, depth - 1))


def _domain(rng: random.Random) -> SpatialDomain:
    prop = _prop(rng, 2)
    if rng.random() < 0.5:
        lo = abs(_number(rng))
        return SpatialDomain(prop, lo, lo + abs(_number(rng)) + 1)
    return SpatialDomain(prop)


def _cmp(rng: random.Random) -> Comparator:
    return rng.choice(list(Comparator))


def random_formula(rng: random.Random, depth: int = 4) -> Formula:
    """One random well-formed formula; all constructs reachable."""
    if depth <= 0 or rng.random() < 0.3:
        pick = rng.randrange(6)
        if pick == 0:
            return TrueF()
        if pick in (1, 2, 3):
            return Atom(_name(rng), _cmp(rng), _number(rng), rng.choice(_UNITS))
        return Aggregate(rng.choice(AGG_OPS), _domain(rng), _name(rng),
                         _cmp(rng), _number(rng))
    pick = rng.randrange(8)
    if pick == 0:
        return Not(random_formula(rng, depth - 1))
    if pick == 1:
        return And(random_formula(rng, depth - 1), random_formula(rng, depth - 1))
    if pick == 2:
        return Until(_interval(rng), random_formula(rng, depth - 1),
                     random_formula(rng, depth - 1))
    if pick == 3:
        return Always(_interval(rng), random_formula(rng, depth - 1))
    if pick == 4:
        return Eventually(_interval(rng), random_formula(rng, depth - 1))
    if pick == 5:
        return Everywhere(_domain(rng), random_formula(rng, depth - 1))
    if pick == 6:
        return Somewhere(_domain(rng), random_formula(rng, depth - 1))
    return Count(rng.choice(AGG_OPS), _domain(rng),
                 random_formula(rng, depth - 1), _cmp(rng), _number(rng))


def random_formulas(seed: int, count: int, depth: int = 4) -> list[Formula]:
    rng = random.Random(seed)
    return [random_formula(rng, depth) for _ in range(count)]
