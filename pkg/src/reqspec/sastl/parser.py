"""Recursive-descent parser for the canonical formula grammar.

Inverse of :func:`reqspec.sastl.printer.print_formula`: parsing the printed
form of any well-formed formula reconstructs the identical tree. Errors
carry the byte offset and the token set that would have been accepted.

Grammar (see docs/grammar.md for the full EBNF):

    formula  = conjunct ;
    conjunct = until { "and" until } ;
    until    = unary { "Until_" interval unary } ;
    unary    = "not" unary | temporal | spatial | aggregate | count | primary ;
    primary  = "true" | "(" conjunct ")" | atom ;
    atom     = name cmp number [ unit ] ;
"""

from __future__ import annotations

import re
from fractions import Fraction

from ..errors import ParseError
from .ast import (
    AGG_OPS, Aggregate, Always, And, Atom, Comparator, Count, Eventually,
    Everywhere, Formula, INF, Not, PropAnd, PropLabel, PropNot, PropOr,
    PropTrue, RESERVED_WORDS, Somewhere, SpatialDomain, TimeInterval, TrueF,
    Until, valid_unit,
)

_TEMPORAL_OPS = {"Always": Always, "Eventually": Eventually}
_SPATIAL_OPS = {"Everywhere": Everywhere, "Somewhere": Somewhere}
_COUNT_OPS = {f"count_{op}": op for op in AGG_OPS}

_TOKEN_RE = re.compile(
    r"""
    (?P<NUMBER>-?\d+(\.\d+)?(/\d+(\.\d+)?)?)
  | (?P<WORD>[A-Za-z][A-Za-z0-9_'\-/^.%]*)
  | (?P<CMP><=|>=|<|>)
  | (?P<PUNCT>[{}()\[\],&])
  | (?P<SPACE>\s+)
    """,
    re.VERBOSE,
)

_NAME_WORD = re.compile(r"[A-Za-z][A-Za-z0-9_'\-]*$")


class _Token:
    __slots__ = ("kind", "text", "offset")

    def __init__(self, kind, text, offset):
        self.kind = kind
        self.text = text
        self.offset = offset

    def __repr__(self):
        return f"{self.kind}({self.text!r}@{self.offset})"


def _lex(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "SPACE":
            tokens.append(_Token(kind, m.group(), pos))
        pos = m.end()
    tokens.append(_Token("EOF", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _lex(text)
        self.pos = 0

    # -- token helpers ------------------------------------------------------

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind, text=None) -> _Token:
        tok = self.peek()
        if tok.kind != kind or (text is not None and tok.text != text):
            raise ParseError(f"unexpected {tok.text or 'end of input'!r}",
                             tok.offset, [text or kind])
        return self.advance()

    def fail(self, expected):
        tok = self.peek()
        raise ParseError(f"unexpected {tok.text or 'end of input'!r}",
                         tok.offset, expected)

    # -- grammar ------------------------------------------------------------

    def parse(self) -> Formula:
        f = self.conjunct()
        if self.peek().kind != "EOF":
            self.fail(["end of input"])
        return f

    def conjunct(self) -> Formula:
        f = self.until()
        while self.peek().kind == "WORD" and self.peek().text == "and":
            self.advance()
            f = And(f, self.until())
        return f

    def until(self) -> Formula:
        f = self.unary()
        while self.peek().kind == "WORD" and self.peek().text == "Until_":
            self.advance()
            interval = self.interval()
            f = Until(interval, f, self.unary())
        return f

    def unary(self) -> Formula:
        tok = self.peek()
        if tok.kind == "WORD":
            if tok.text == "not":
                self.advance()
                return Not(self.unary())
            stem = tok.text[:-1] if tok.text.endswith("_") else None
            if stem in _TEMPORAL_OPS:
                self.advance()
                return _TEMPORAL_OPS[stem](self.interval(), self.unary())
            if stem in _SPATIAL_OPS:
                self.advance()
                return _SPATIAL_OPS[stem](self.braced_domain(), self.unary())
            if stem in _COUNT_OPS:
                self.advance()
                domain = self.braced_domain()
                self.expect("PUNCT", "(")
                arg = self.conjunct()
                self.expect("PUNCT", ")")
                cmp = self.comparator()
                const = self.number()
                return Count(_COUNT_OPS[stem], domain, arg, cmp, const)
            if stem in AGG_OPS:
                self.advance()
                domain = self.braced_domain()
                var = self.name("signal name")
                cmp = self.comparator()
                const = self.number()
                return Aggregate(stem, domain, var, cmp, const)
        return self.primary()

    def primary(self) -> Formula:
        tok = self.peek()
        if tok.kind == "WORD" and tok.text == "true":
            self.advance()
            return TrueF()
        if tok.kind == "PUNCT" and tok.text == "(":
            self.advance()
            f = self.conjunct()
            self.expect("PUNCT", ")")
            return f
        return self.atom()

    def atom(self) -> Formula:
        var = self.name("signal name")
        cmp = self.comparator()
        const = self.number()
        unit = ""
        tok = self.peek()
        if (tok.kind == "WORD" and tok.text.rstrip("_") not in RESERVED_WORDS
                and valid_unit(tok.text)):
            unit = self.advance().text
        return Atom(var, cmp, const, unit)

    def name(self, what) -> str:
        words = []
        while True:
            tok = self.peek()
            if (tok.kind == "WORD" and _NAME_WORD.match(tok.text)
                    and tok.text.rstrip("_") not in RESERVED_WORDS):
                words.append(self.advance().text)
            else:
                break
        if not words:
            self.fail([what])
        return " ".join(words)

    def comparator(self) -> Comparator:
        tok = self.peek()
        if tok.kind != "CMP":
            self.fail(["<", "<=", ">", ">="])
        return Comparator(self.advance().text)

    def number(self) -> Fraction:
        tok = self.peek()
        if tok.kind != "NUMBER":
            self.fail(["number"])
        self.advance()
        return Fraction(tok.text)

    def interval(self) -> TimeInterval:
        self.expect("PUNCT", "[")
        lo = self.number()
        self.expect("PUNCT", ",")
        tok = self.peek()
        if tok.kind == "WORD" and tok.text == "inf":
            self.advance()
            self.expect("PUNCT", ")")
            return TimeInterval(lo, INF)
        hi = self.number()
        self.expect("PUNCT", "]")
        return TimeInterval(lo, hi)

    def braced_domain(self) -> SpatialDomain:
        self.expect("PUNCT", "{")
        prop = self.prop_or()
        lo, hi = Fraction(0), INF
        if self.peek().kind == "PUNCT" and self.peek().text == "&":
            self.advance()
            self.expect("PUNCT", "[")
            lo = self.number()
            self.expect("PUNCT", ",")
            tok = self.peek()
            if tok.kind == "WORD" and tok.text == "inf":
                self.advance()
                self.expect("PUNCT", ")")
            else:
                hi = self.number()
                self.expect("PUNCT", "]")
        self.expect("PUNCT", "}")
        return SpatialDomain(prop, lo, hi)

    def prop_or(self):
        p = self.prop_and()
        while self.peek().kind == "WORD" and self.peek().text == "or":
            self.advance()
            p = PropOr(p, self.prop_and())
        return p

    def prop_and(self):
        p = self.prop_unary()
        while self.peek().kind == "WORD" and self.peek().text == "and":
            self.advance()
            p = PropAnd(p, self.prop_unary())
        return p

    def prop_unary(self):
        tok = self.peek()
        if tok.kind == "WORD" and tok.text == "not":
            self.advance()
            return PropNot(self.prop_unary())
        if tok.kind == "WORD" and tok.text == "true":
            self.advance()
            return PropTrue()
        if tok.kind == "PUNCT" and tok.text == "(":
            self.advance()
            p = self.prop_or()
            self.expect("PUNCT", ")")
            return p
        return PropLabel(self.name("location label"))


def parse_formula(text: str) -> Formula:
    """Parse canonical formula text back into its tree."""
    return _Parser(text).parse()
