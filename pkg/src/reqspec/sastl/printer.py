"""Canonical text rendering of formulas.

The canonical form is ASCII ("<=", "inf", "&"); pass ``unicode_symbols=True``
for a display variant with proper comparison and conjunction glyphs. Only
the ASCII form is guaranteed to round-trip through the parser. The grammar
is documented in docs/grammar.md and locked by the golden corpus under
tests/fixtures.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .ast import (
    Aggregate, Always, And, Atom, Comparator, Count, Eventually, Everywhere,
    Formula, Not, Prop, PropAnd, PropLabel, PropNot, PropOr, PropTrue,
    Somewhere, SpatialDomain, TimeInterval, TrueF, Until,
)

_UNICODE_SUBS = (
    ("<=", "≤"),   # <=  ->  less-or-equal sign
    (">=", "≥"),
    ("inf", "+∞"),
    (" & ", " ∧ "),
)


def format_number(value) -> str:
    """Exact rendering: integers bare, finite decimals as decimals,
    everything else as p/q."""
    if isinstance(value, float) and math.isinf(value):
        return "inf"
    frac = Fraction(value)
    if frac.denominator == 1:
        return str(frac.numerator)
    den = frac.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den == 1:
        digits = max(twos, fives)
        scaled = frac.numerator * 10**digits // frac.denominator
        sign = "-" if scaled < 0 else ""
        text = str(abs(scaled)).rjust(digits + 1, "0")
        return f"{sign}{text[:-digits]}.{text[-digits:]}"
    return f"{frac.numerator}/{frac.denominator}"


def format_interval(interval: TimeInterval) -> str:
    lo = format_number(interval.lo)
    if interval.bounded:
        return f"[{lo},{format_number(interval.hi)}]"
    return f"[{lo},inf)"


def _print_prop(p: Prop, parent: str = "") -> str:
    if isinstance(p, PropTrue):
        return "true"
    if isinstance(p, PropLabel):
        return p.name
    if isinstance(p, PropNot):
        inner = _print_prop(p.arg, "not")
        if isinstance(p.arg, (PropOr, PropAnd)):
            inner = f"({inner})"
        return f"not {inner}"
    if isinstance(p, (PropOr, PropAnd)):
        word = "or" if isinstance(p, PropOr) else "and"
        left = _print_prop(p.left, word)
        right = _print_prop(p.right, word)
        if isinstance(p.left, (PropOr, PropAnd)):
            left = f"({left})"
        if isinstance(p.right, (PropOr, PropAnd)):
            right = f"({right})"
        return f"{left} {word} {right}"
    raise TypeError(repr(p))


def format_domain(dom: SpatialDomain) -> str:
    prop = _print_prop(dom.proposition)
    if dom.bounded or dom.distance_lo != 0:
        lo = format_number(dom.distance_lo)
        hi = format_number(dom.distance_hi) if dom.bounded else "inf"
        close = "]" if dom.bounded else ")"
        return f"{prop} & [{lo},{hi}{close}"
    return prop


def _atom_text(var: str, cmp: Comparator, const, unit: str = "") -> str:
    text = f"{var} {cmp.value} {format_number(const)}"
    if unit:
        text += f" {unit}"
    return text


def _is_binary(f: Formula) -> bool:
    return isinstance(f, (And, Until))


def _print(f: Formula) -> str:
    if isinstance(f, TrueF):
        return "true"
    if isinstance(f, Atom):
        return _atom_text(f.var, f.cmp, f.const, f.unit)
    if isinstance(f, Not):
        return f"not ({_print(f.arg)})"
    if isinstance(f, And):
        left, right = _print(f.left), _print(f.right)
        if _is_binary(f.left):
            left = f"({left})"
        if _is_binary(f.right):
            right = f"({right})"
        return f"{left} and {right}"
    if isinstance(f, Until):
        left, right = _print(f.left), _print(f.right)
        if _is_binary(f.left):
            left = f"({left})"
        if _is_binary(f.right):
            right = f"({right})"
        return f"{left} Until_{format_interval(f.interval)} {right}"
    if isinstance(f, Always):
        return f"Always_{format_interval(f.interval)} {_wrap(f.arg)}"
    if isinstance(f, Eventually):
        return f"Eventually_{format_interval(f.interval)} {_wrap(f.arg)}"
    if isinstance(f, Everywhere):
        return f"Everywhere_{{{format_domain(f.domain)}}} {_wrap(f.arg)}"
    if isinstance(f, Somewhere):
        return f"Somewhere_{{{format_domain(f.domain)}}} {_wrap(f.arg)}"
    if isinstance(f, Aggregate):
        return f"{f.op}_{{{format_domain(f.domain)}}} " + _atom_text(f.var, f.cmp, f.const)
    if isinstance(f, Count):
        return (f"count_{f.op}_{{{format_domain(f.domain)}}} ({_print(f.arg)}) "
                f"{f.cmp.value} {format_number(f.const)}")
    raise TypeError(f"not a formula: {f!r}")


def _wrap(f: Formula) -> str:
    text = _print(f)
    return f"({text})" if _is_binary(f) else text


def print_formula(f: Formula, unicode_symbols: bool = False) -> str:
    """Deterministic canonical rendering; inverse of ``parse_formula``."""
    text = _print(f)
    if unicode_symbols:
        for ascii_form, pretty in _UNICODE_SUBS:
            text = text.replace(ascii_form, pretty)
    return text
