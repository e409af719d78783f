import json
import random
from fractions import Fraction
from pathlib import Path

import pytest

from reqspec.errors import IncompleteSlots, ParseError
from reqspec.extract import ConditionParse, location_to_domain
from reqspec.reqmodel import KeyKind, KeyedPhrase, SlotSet
from reqspec.sastl import (
    Aggregate, Always, And, Atom, Comparator, Count, Eventually, Everywhere,
    Formula, INF, Not, PropLabel, Somewhere, SpatialDomain, TimeInterval,
    TrueF, UNBOUNDED, Until, assemble_specification, expand_derived,
    format_number, formula_from_dict, formula_to_dict, parse_formula,
    print_formula, render_template,
)
from reqspec.sastl.gen import random_formulas

FIXTURES = Path(__file__).parent / "fixtures"

CORE_NODES = (TrueF, Atom, Not, And, Until, Aggregate, Count)


class TestComparator:
    def test_flip_table(self):
        assert Comparator.LT.flip() is Comparator.GE
        assert Comparator.LE.flip() is Comparator.GT
        assert Comparator.GT.flip() is Comparator.LE
        assert Comparator.GE.flip() is Comparator.LT

    def test_flip_involution(self):
        for cmp in Comparator:
            assert cmp.flip().flip() is cmp


class TestIntervals:
    def test_defaults_unbounded(self):
        assert UNBOUNDED.lo == 0
        assert not UNBOUNDED.bounded

    def test_ordering_enforced(self):
        with pytest.raises(ValueError):
            TimeInterval(8, 7)
        with pytest.raises(ValueError):
            TimeInterval(-1, 5)

    def test_domain_distance_ordering(self):
        with pytest.raises(ValueError):
            SpatialDomain(PropLabel("school"), 200, 100)


class TestExpandDerived:
    def test_everywhere_becomes_min_count(self):
        dom = SpatialDomain(PropLabel("school"), 0, 200)
        phi = Atom("x", Comparator.LT, 5)
        assert expand_derived(Everywhere(dom, phi)) == Count(
            "min", dom, phi, Comparator.GT, Fraction(0))

    def test_somewhere_becomes_max_count(self):
        dom = SpatialDomain(PropLabel("park"))
        phi = Atom("x", Comparator.LT, 5)
        assert expand_derived(Somewhere(dom, phi)) == Count(
            "max", dom, phi, Comparator.GT, Fraction(0))

    def test_atom_unchanged(self):
        atom = Atom("x", Comparator.LT, 5)
        assert expand_derived(atom) == atom

    def test_always_unbounded(self):
        phi = Atom("x", Comparator.LE, 1)
        expanded = expand_derived(Always(TimeInterval(), phi))
        assert expanded == Not(Until(TimeInterval(), TrueF(), Not(phi)))

    def test_eventually_is_true_until(self):
        phi = Atom("x", Comparator.LE, 1)
        interval = TimeInterval(2, 4)
        assert expand_derived(Eventually(interval, phi)) == Until(
            interval, TrueF(), phi)

    def test_only_core_nodes_remain(self):
        for formula in random_formulas(7, 300):
            for node in expand_derived(formula).walk():
                assert isinstance(node, CORE_NODES), type(node)

    def test_idempotent(self):
        for formula in random_formulas(11, 300):
            once = expand_derived(formula)
            assert expand_derived(once) == once

    def test_expansion_preserves_round_trip(self):
        for formula in random_formulas(13, 300):
            expanded = expand_derived(formula)
            assert parse_formula(print_formula(expanded)) == expanded


class TestPrinter:
    def test_always_atom_with_unit(self):
        f = Always(TimeInterval(8, 16),
                   Atom("Golf Cart speed", Comparator.LT, 15, "miles/hour"))
        assert print_formula(f) == "Always_[8,16] Golf Cart speed < 15 miles/hour"

    def test_le_zero(self):
        assert print_formula(Atom("x", Comparator.LE, 0)) == "x <= 0"

    def test_taxi_formula(self):
        f = Everywhere(
            SpatialDomain(PropLabel("school"), 0, 200),
            Always(TimeInterval(7, 8),
                   Atom("number of taxi", Comparator.LT, 10)))
        assert print_formula(f) == \
            "Everywhere_{school & [0,200]} Always_[7,8] number of taxi < 10"

    def test_unicode_display_mode(self):
        f = Everywhere(SpatialDomain(PropLabel("school"), 0, 200),
                       Always(TimeInterval(), Atom("x", Comparator.LE, 4)))
        pretty = print_formula(f, unicode_symbols=True)
        assert "≤" in pretty and "∞" in pretty and "∧" in pretty

    def test_number_formatting(self):
        assert format_number(Fraction(3, 10)) == "0.3"
        assert format_number(Fraction(15)) == "15"
        assert format_number(Fraction(19, 2)) == "9.5"
        assert format_number(Fraction(1, 3)) == "1/3"
        assert format_number(Fraction(-7, 4)) == "-1.75"
        assert format_number(INF) == "inf"


class TestParser:
    def test_spec_shaped_text(self):
        f = parse_formula(
            "Everywhere_{city block} Always_[0,inf) vending vehicles <= 4")
        assert f == Everywhere(
            SpatialDomain(PropLabel("city block")),
            Always(TimeInterval(), Atom("vending vehicles", Comparator.LE, 4)))

    def test_empty_input_fails_at_offset_zero(self):
        with pytest.raises(ParseError) as err:
            parse_formula("")
        assert err.value.offset == 0

    def test_error_carries_offset_and_expectations(self):
        with pytest.raises(ParseError) as err:
            parse_formula("x <= ")
        assert err.value.offset == len("x <= ")
        assert "number" in err.value.expected

    def test_trailing_garbage_rejected(self):
        with pytest.raises(ParseError):
            parse_formula("x <= 5 ) y")

    def test_round_trip_identity_1000(self):
        for formula in random_formulas(42, 1000):
            assert parse_formula(print_formula(formula)) == formula

    def test_print_parse_normalizes_whitespace(self):
        text = "Everywhere_{ city block }   Always_[0,inf)  vending vehicles <= 4"
        parsed = parse_formula(text)
        canonical = print_formula(parsed)
        assert canonical == \
            "Everywhere_{city block} Always_[0,inf) vending vehicles <= 4"
        assert print_formula(parse_formula(canonical)) == canonical

    def test_golden_corpus(self):
        with open(FIXTURES / "formula_golden.jsonl", "r", encoding="utf-8") as fh:
            for line in fh:
                record = json.loads(line)
                formula = formula_from_dict(record["ast"])
                assert print_formula(formula) == record["text"]
                assert parse_formula(record["text"]) == formula

    def test_json_codec_round_trip(self):
        for formula in random_formulas(17, 300):
            assert formula_from_dict(formula_to_dict(formula)) == formula


def _slots(entity=None, quantifier=None, location=None, time=None,
           condition=None, spans=None):
    spans = spans or {}
    slots = SlotSet()
    for kind, value in [(KeyKind.ENTITY, entity), (KeyKind.QUANTIFIER, quantifier),
                        (KeyKind.LOCATION, location), (KeyKind.TIME, time)]:
        if value is not None:
            slots.add(KeyedPhrase(kind, value, spans.get(kind)))
    if location is not None:
        slots.spatial_domain = location_to_domain(location)
    if condition is not None:
        slots.condition = condition
    slots.time_interval = time if isinstance(time, TimeInterval) else None
    if time is not None and not isinstance(time, TimeInterval):
        raise AssertionError("pass TimeInterval for time")
    return slots


class TestAssemble:
    def test_taxi_worked_example(self):
        slots = SlotSet([
            KeyedPhrase(KeyKind.ENTITY, "the number", (5, 7)),
            KeyedPhrase(KeyKind.QUANTIFIER, "taxis", (8, 9), canon="taxi"),
        ])
        slots.add(KeyedPhrase(KeyKind.LOCATION,
                              "within 200 meters of all the schools", None))
        slots.spatial_domain = location_to_domain(
            "within 200 meters of all the schools")
        slots.time_interval = TimeInterval(7, 8)
        slots.condition = ConditionParse(Comparator.LT, Fraction(10))
        formula = assemble_specification(slots)
        assert print_formula(formula) == \
            "Everywhere_{school & [0,200]} Always_[7,8] number of taxi < 10"

    def test_row1_quantifier_duplicating_location_drops_out(self):
        slots = _slots(entity="air infiltration rate",
                       quantifier="sliding glass doors",
                       location="Sliding glass doors",
                       time=UNBOUNDED,
                       condition=ConditionParse(Comparator.LE, Fraction(3, 10),
                                                "cfm/foot^2"))
        formula = assemble_specification(slots)
        assert print_formula(formula) == (
            "Everywhere_{Sliding glass doors} Always_[0,inf) "
            "air infiltration rate <= 0.3 cfm/foot^2")

    def test_root_shape_everywhere_always(self):
        slots = _slots(entity="noise level", location="park", time=UNBOUNDED,
                       condition=ConditionParse(Comparator.LE, Fraction(55), "db"))
        formula = assemble_specification(slots)
        assert isinstance(formula, Everywhere)
        assert isinstance(formula.arg, Always)

    def test_aggregation_keyword_builds_aggregate(self):
        slots = _slots(entity="average concentration", quantifier="TVOC",
                       location="building", time=UNBOUNDED,
                       condition=ConditionParse(Comparator.LE, Fraction(3, 5),
                                                "mg/m3"))
        formula = assemble_specification(slots)
        inner = formula.arg.arg
        assert isinstance(inner, Aggregate)
        assert inner.op == "avg"
        assert inner.var == "concentration of TVOC"

    def test_missing_location_raises(self):
        slots = _slots(entity="noise level", time=UNBOUNDED,
                       condition=ConditionParse(Comparator.LE, Fraction(55)))
        with pytest.raises(IncompleteSlots) as err:
            assemble_specification(slots)
        assert KeyKind.LOCATION in err.value.missing

    def test_missing_time_defaults_to_unbounded(self):
        slots = _slots(entity="noise level", location="park",
                       condition=ConditionParse(Comparator.LE, Fraction(55)))
        formula = assemble_specification(slots)
        assert not formula.arg.interval.bounded


class TestRenderTemplate:
    def test_taxi_template(self):
        slots = SlotSet([
            KeyedPhrase(KeyKind.ENTITY, "the number", (5, 7)),
            KeyedPhrase(KeyKind.QUANTIFIER, "taxis", (8, 9), canon="taxi"),
            KeyedPhrase(KeyKind.LOCATION,
                        "within 200 meters of all the schools", None),
        ])
        slots.spatial_domain = location_to_domain(
            "within 200 meters of all the schools")
        slots.time_interval = TimeInterval(7, 8)
        slots.condition = ConditionParse(Comparator.LT, Fraction(10))
        assert render_template(slots) == (
            "[number] of [taxi] should be [<] [10] [between 7:00 to 8:00] "
            "[within 200 meters of all the schools]")

    def test_row3_template(self):
        slots = _slots(quantifier="vending vehicles", location="city block",
                       time=UNBOUNDED,
                       condition=ConditionParse(Comparator.LE, Fraction(4)))
        assert render_template(slots) == \
            "[vending vehicles] should be [<=] [4] [always] [city block]"

    def test_incomplete_raises(self):
        with pytest.raises(IncompleteSlots):
            render_template(SlotSet())

    def test_dated_interval_renders_as_annotation(self):
        slots = _slots(entity="noise level", location="park",
                       time=TimeInterval(0, 24, date="2024-05-01"),
                       condition=ConditionParse(Comparator.LE, Fraction(55), "db"))
        assert "[on 2024-05-01]" in render_template(slots)
        # the date stays out of the formula grammar
        formula = assemble_specification(slots)
        assert "2024" not in print_formula(formula)
