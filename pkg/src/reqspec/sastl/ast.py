"""Formula abstract syntax for spatio-temporal specifications.

The grammar covers atomic comparisons over named signals, boolean
connectives, the bounded until with its derived always/eventually forms,
spatial aggregation and counting over a spatial domain, and the derived
everywhere/somewhere operators. Formulas are immutable values; every
operation here is pure.

Constants are exact rationals (:class:`fractions.Fraction`); units are
uninterpreted text tags. Interval bounds use ``math.inf`` for the open
upper end.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from enum import Enum
from typing import Union

INF = math.inf

# Words that start grammar productions; they may not begin a signal name
# or location label.
RESERVED_WORDS = frozenset({
    "true", "not", "and", "or", "inf",
    "max", "min", "sum", "avg",
    "count_max", "count_min", "count_sum", "count_avg",
    "Always", "Eventually", "Everywhere", "Somewhere", "Until",
})

# Signal names and location labels: runs of letter-initial words.
# Apostrophes and hyphens ride along; parentheses and grammar symbols do not.
_NAME_WORD_RE = re.compile(r"[A-Za-z][A-Za-z0-9_'\-]*$")


def valid_name(text: str) -> bool:
    words = text.split()
    if not words:
        return False
    return all(
        _NAME_WORD_RE.match(w) and w.rstrip("_") not in RESERVED_WORDS
        for w in words
    )


def sanitize_name(text: str) -> str:
    """Force arbitrary phrase text into grammar-valid name form."""
    cleaned = re.sub(r"[^A-Za-z0-9_'\- ]+", " ", text)
    words = [w for w in cleaned.split()
             if _NAME_WORD_RE.match(w) and w.rstrip("_") not in RESERVED_WORDS]
    return " ".join(words) if words else "x"


_UNIT_RE = re.compile(r"[A-Za-z0-9/^%.\-]+$")


def valid_unit(text: str) -> bool:
    return text == "" or (bool(_UNIT_RE.match(text)) and text[0].isalpha())


Number = Union[Fraction, float]  # float only for math.inf


def as_const(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, float):
        if math.isinf(value):
            raise ValueError("constants must be finite")
        return Fraction(value).limit_denominator(10**9)
    raise TypeError(f"cannot use {value!r} as a constant")


class Comparator(Enum):
    LT = "<"
    LE = "<="
    GT = ">"
    GE = ">="

    def flip(self) -> "Comparator":
        """Comparator under negation: not(x < c) == x >= c."""
        return _FLIP[self]

    def __str__(self):
        return self.value


_FLIP = {
    Comparator.LT: Comparator.GE,
    Comparator.LE: Comparator.GT,
    Comparator.GT: Comparator.LE,
    Comparator.GE: Comparator.LT,
}


@dataclass(frozen=True)
class TimeInterval:
    """Time window in hours; ``[0, inf)`` when unbounded. An optional date
    tag records single-date requirements without entering the grammar."""

    lo: Fraction = Fraction(0)
    hi: Number = INF
    date: str = ""

    def __post_init__(self):
        object.__setattr__(self, "lo", as_const(self.lo))
        if not (isinstance(self.hi, float) and math.isinf(self.hi)):
            object.__setattr__(self, "hi", as_const(self.hi))
        if self.lo < 0:
            raise ValueError("interval start must be >= 0")
        if self.bounded and self.lo > self.hi:
            raise ValueError(f"interval start {self.lo} above end {self.hi}")

    @property
    def bounded(self) -> bool:
        return not (isinstance(self.hi, float) and math.isinf(self.hi))

    @property
    def unbounded_default(self) -> bool:
        return self.lo == 0 and not self.bounded and not self.date


UNBOUNDED = TimeInterval()


# -- spatial propositions ----------------------------------------------------

class Prop:
    """Boolean expression over location labels."""
    __slots__ = ()


@dataclass(frozen=True)
class PropTrue(Prop):
    __slots__ = ()


@dataclass(frozen=True)
class PropLabel(Prop):
    name: str

    def __post_init__(self):
        if not valid_name(self.name):
            raise ValueError(f"invalid location label {self.name!r}")


@dataclass(frozen=True)
class PropNot(Prop):
    arg: Prop


@dataclass(frozen=True)
class PropOr(Prop):
    left: Prop
    right: Prop


@dataclass(frozen=True)
class PropAnd(Prop):
    left: Prop
    right: Prop


@dataclass(frozen=True)
class SpatialDomain:
    """Distance band plus a proposition the locations must satisfy."""

    proposition: Prop = PropTrue()
    distance_lo: Fraction = Fraction(0)
    distance_hi: Number = INF

    def __post_init__(self):
        object.__setattr__(self, "distance_lo", as_const(self.distance_lo))
        if not (isinstance(self.distance_hi, float) and math.isinf(self.distance_hi)):
            object.__setattr__(self, "distance_hi", as_const(self.distance_hi))
        if self.distance_lo < 0:
            raise ValueError("distance must be >= 0")
        if self.bounded and not self.distance_lo < self.distance_hi:
            raise ValueError("need distance_lo < distance_hi")

    @property
    def bounded(self) -> bool:
        return not (isinstance(self.distance_hi, float) and math.isinf(self.distance_hi))

    @classmethod
    def everywhere_label(cls, name: str) -> "SpatialDomain":
        return cls(PropLabel(name))


AGG_OPS = ("max", "min", "sum", "avg")


# -- formulas ----------------------------------------------------------------

class Formula:
    """Base of the formula union. Subclasses are frozen dataclasses."""
    __slots__ = ()

    def children(self) -> tuple:
        return ()

    def walk(self):
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children()))


@dataclass(frozen=True)
class TrueF(Formula):
    __slots__ = ()


@dataclass(frozen=True)
class Atom(Formula):
    var: str
    cmp: Comparator
    const: Fraction
    unit: str = ""

    def __post_init__(self):
        object.__setattr__(self, "const", as_const(self.const))
        if not valid_name(self.var):
            raise ValueError(f"invalid signal name {self.var!r}")
        if not valid_unit(self.unit):
            raise ValueError(f"invalid unit {self.unit!r}")


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula

    def children(self):
        return (self.arg,)


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Until(Formula):
    interval: TimeInterval
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Always(Formula):
    interval: TimeInterval
    arg: Formula

    def children(self):
        return (self.arg,)


@dataclass(frozen=True)
class Eventually(Formula):
    interval: TimeInterval
    arg: Formula

    def children(self):
        return (self.arg,)


@dataclass(frozen=True)
class Aggregate(Formula):
    """Compare an aggregated signal value over a spatial domain."""

    op: str
    domain: SpatialDomain
    var: str
    cmp: Comparator
    const: Fraction

    def __post_init__(self):
        object.__setattr__(self, "const", as_const(self.const))
        if self.op not in AGG_OPS:
            raise ValueError(f"unknown aggregation op {self.op!r}")
        if not valid_name(self.var):
            raise ValueError(f"invalid signal name {self.var!r}")


@dataclass(frozen=True)
class Count(Formula):
    """Compare an aggregate of per-location satisfaction of a formula."""

    op: str
    domain: SpatialDomain
    arg: Formula
    cmp: Comparator
    const: Fraction

    def __post_init__(self):
        object.__setattr__(self, "const", as_const(self.const))
        if self.op not in AGG_OPS:
            raise ValueError(f"unknown counting op {self.op!r}")

    def children(self):
        return (self.arg,)


@dataclass(frozen=True)
class Everywhere(Formula):
    domain: SpatialDomain
    arg: Formula

    def children(self):
        return (self.arg,)


@dataclass(frozen=True)
class Somewhere(Formula):
    domain: SpatialDomain
    arg: Formula

    def children(self):
        return (self.arg,)


def expand_derived(f: Formula) -> Formula:
    """Rewrite derived operators into the core grammar.

    eventually(I, p) == until(I, true, p)
    always(I, p)     == not eventually(I, not p)
    everywhere(D, p) == count_min(D, p) > 0
    somewhere(D, p)  == count_max(D, p) > 0

    Idempotent: already-core formulas come back unchanged.
    """
    if isinstance(f, (TrueF, Atom, Aggregate)):
        return f
    if isinstance(f, Not):
        return Not(expand_derived(f.arg))
    if isinstance(f, And):
        return And(expand_derived(f.left), expand_derived(f.right))
    if isinstance(f, Until):
        return Until(f.interval, expand_derived(f.left), expand_derived(f.right))
    if isinstance(f, Eventually):
        return Until(f.interval, TrueF(), expand_derived(f.arg))
    if isinstance(f, Always):
        return Not(Until(f.interval, TrueF(), Not(expand_derived(f.arg))))
    if isinstance(f, Count):
        return Count(f.op, f.domain, expand_derived(f.arg), f.cmp, f.const)
    if isinstance(f, Everywhere):
        return Count("min", f.domain, expand_derived(f.arg), Comparator.GT, Fraction(0))
    if isinstance(f, Somewhere):
        return Count("max", f.domain, expand_derived(f.arg), Comparator.GT, Fraction(0))
    raise TypeError(f"not a formula: {f!r}")


# -- JSON codec --------------------------------------------------------------

def _num_to_json(value):
    if isinstance(value, float) and math.isinf(value):
        return "inf"
    return str(value)


def _num_from_json(text):
    if text == "inf":
        return INF
    return Fraction(text)


def _prop_to_dict(p: Prop):
    if isinstance(p, PropTrue):
        return {"node": "true"}
    if isinstance(p, PropLabel):
        return {"node": "label", "name": p.name}
    if isinstance(p, PropNot):
        return {"node": "not", "arg": _prop_to_dict(p.arg)}
    if isinstance(p, PropOr):
        return {"node": "or", "left": _prop_to_dict(p.left), "right": _prop_to_dict(p.right)}
    if isinstance(p, PropAnd):
        return {"node": "and", "left": _prop_to_dict(p.left), "right": _prop_to_dict(p.right)}
    raise TypeError(repr(p))


def _prop_from_dict(d) -> Prop:
    node = d["node"]
    if node == "true":
        return PropTrue()
    if node == "label":
        return PropLabel(d["name"])
    if node == "not":
        return PropNot(_prop_from_dict(d["arg"]))
    if node == "or":
        return PropOr(_prop_from_dict(d["left"]), _prop_from_dict(d["right"]))
    if node == "and":
        return PropAnd(_prop_from_dict(d["left"]), _prop_from_dict(d["right"]))
    raise ValueError(f"unknown proposition node {node!r}")


def _interval_to_dict(i: TimeInterval):
    return {"lo": _num_to_json(i.lo), "hi": _num_to_json(i.hi), "date": i.date}


def _interval_from_dict(d) -> TimeInterval:
    return TimeInterval(_num_from_json(d["lo"]), _num_from_json(d["hi"]), d.get("date", ""))


def _domain_to_dict(dom: SpatialDomain):
    return {
        "proposition": _prop_to_dict(dom.proposition),
        "lo": _num_to_json(dom.distance_lo),
        "hi": _num_to_json(dom.distance_hi),
    }


def _domain_from_dict(d) -> SpatialDomain:
    return SpatialDomain(_prop_from_dict(d["proposition"]),
                         _num_from_json(d["lo"]), _num_from_json(d["hi"]))


def formula_to_dict(f: Formula) -> dict:
    if isinstance(f, TrueF):
        return {"node": "true"}
    if isinstance(f, Atom):
        return {"node": "atom", "var": f.var, "cmp": f.cmp.name,
                "const": _num_to_json(f.const), "unit": f.unit}
    if isinstance(f, Not):
        return {"node": "not", "arg": formula_to_dict(f.arg)}
    if isinstance(f, And):
        return {"node": "and", "left": formula_to_dict(f.left),
                "right": formula_to_dict(f.right)}
    if isinstance(f, Until):
        return {"node": "until", "interval": _interval_to_dict(f.interval),
                "left": formula_to_dict(f.left), "right": formula_to_dict(f.right)}
    if isinstance(f, Always):
        return {"node": "always", "interval": _interval_to_dict(f.interval),
                "arg": formula_to_dict(f.arg)}
    if isinstance(f, Eventually):
        return {"node": "eventually", "interval": _interval_to_dict(f.interval),
                "arg": formula_to_dict(f.arg)}
    if isinstance(f, Aggregate):
        return {"node": "aggregate", "op": f.op, "domain": _domain_to_dict(f.domain),
                "var": f.var, "cmp": f.cmp.name, "const": _num_to_json(f.const)}
    if isinstance(f, Count):
        return {"node": "count", "op": f.op, "domain": _domain_to_dict(f.domain),
                "arg": formula_to_dict(f.arg), "cmp": f.cmp.name,
                "const": _num_to_json(f.const)}
    if isinstance(f, Everywhere):
        return {"node": "everywhere", "domain": _domain_to_dict(f.domain),
                "arg": formula_to_dict(f.arg)}
    if isinstance(f, Somewhere):
        return {"node": "somewhere", "domain": _domain_to_dict(f.domain),
                "arg": formula_to_dict(f.arg)}
    raise TypeError(f"not a formula: {f!r}")


def formula_from_dict(d: dict) -> Formula:
    node = d["node"]
    if node == "true":
        return TrueF()
    if node == "atom":
        return Atom(d["var"], Comparator[d["cmp"]], Fraction(d["const"]), d.get("unit", ""))
    if node == "not":
        return Not(formula_from_dict(d["arg"]))
    if node == "and":
        return And(formula_from_dict(d["left"]), formula_from_dict(d["right"]))
    if node == "until":
        return Until(_interval_from_dict(d["interval"]),
                     formula_from_dict(d["left"]), formula_from_dict(d["right"]))
    if node == "always":
        return Always(_interval_from_dict(d["interval"]), formula_from_dict(d["arg"]))
    if node == "eventually":
        return Eventually(_interval_from_dict(d["interval"]), formula_from_dict(d["arg"]))
    if node == "aggregate":
        return Aggregate(d["op"], _domain_from_dict(d["domain"]), d["var"],
                         Comparator[d["cmp"]], Fraction(d["const"]))
    if node == "count":
        return Count(d["op"], _domain_from_dict(d["domain"]),
                     formula_from_dict(d["arg"]), Comparator[d["cmp"]],
                     Fraction(d["const"]))
    if node == "everywhere":
        return Everywhere(_domain_from_dict(d["domain"]), formula_from_dict(d["arg"]))
    if node == "somewhere":
        return Somewhere(_domain_from_dict(d["domain"]), formula_from_dict(d["arg"]))
    raise ValueError(f"unknown formula node {node!r}")
