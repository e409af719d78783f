"""Formula abstract syntax, canonical text form, parsing, and assembly."""

from .ast import (
    AGG_OPS, Aggregate, Always, And, Atom, Comparator, Count, Eventually,
    Everywhere, Formula, INF, Not, Prop, PropAnd, PropLabel, PropNot, PropOr,
    PropTrue, RESERVED_WORDS, Somewhere, SpatialDomain, TimeInterval, TrueF,
    UNBOUNDED, Until, as_const, expand_derived, formula_from_dict,
    formula_to_dict, sanitize_name, valid_name,
)
from .assemble import (
    AGG_KEYWORDS, assemble_specification, format_clock, format_time_phrase,
    render_template,
)
from .parser import parse_formula
from .printer import format_domain, format_interval, format_number, print_formula

__all__ = [
    "AGG_KEYWORDS", "AGG_OPS", "Aggregate", "Always", "And", "Atom",
    "Comparator", "Count", "Eventually", "Everywhere", "Formula", "INF",
    "Not", "Prop", "PropAnd", "PropLabel", "PropNot", "PropOr", "PropTrue",
    "RESERVED_WORDS", "Somewhere", "SpatialDomain", "TimeInterval", "TrueF",
    "UNBOUNDED", "Until", "as_const", "assemble_specification",
    "expand_derived", "format_clock", "format_domain", "format_interval",
    "format_number", "format_time_phrase", "formula_from_dict",
    "formula_to_dict", "parse_formula", "print_formula", "render_template",
    "sanitize_name", "valid_name",
]
