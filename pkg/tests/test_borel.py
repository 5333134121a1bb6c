import math

import pytest
from hypothesis import given, strategies as st

from daseinizer.borel import BorelSet, Interval, parse_borel
from daseinizer.errors import ParseError


def test_parse_and_print_canonical():
    b = BorelSet.parse("[0,1]u(2,3]")
    assert b.intervals == (Interval(0, 1, True, True), Interval(2, 3, False, True))
    assert str(b) == "[0,1]u(2,3]"


def test_overlapping_pieces_merge():
    assert str(BorelSet.parse("[0,1] u [0.5,2)")) == "[0,2)"
    assert str(BorelSet.parse("[0,1) u [1,2]")) == "[0,2]"
    # open at both sides of 1 leaves a gap
    assert str(BorelSet.parse("[0,1) u (1,2]")) == "[0,1)u(1,2]"


def test_empty_and_degenerate():
    assert BorelSet.parse("{}").is_empty()
    assert BorelSet.parse("∅").is_empty()
    assert BorelSet.parse("(1,1)").is_empty()
    assert BorelSet.parse("[1,1]").contains(1.0)


def test_infinite_endpoints_are_open():
    b = BorelSet.parse("[-inf,0]")
    assert str(b) == "(-inf,0]"
    assert b.contains(-1e300)


def test_contains_endpoint_semantics():
    b = BorelSet.parse("(0,1]")
    assert not b.contains(0.0)
    assert b.contains(1.0)
    assert not b.contains(1.0 + 1e-12)
    # snapping moves a nearby value onto the endpoint before the exact test
    assert b.contains(1.0 + 1e-12, snap=1e-8)
    assert not b.contains(1e-12, snap=1e-8)


def test_parse_errors_have_positions():
    with pytest.raises(ParseError) as e:
        BorelSet.parse("[0,1")
    assert e.value.position == 4
    with pytest.raises(ParseError):
        BorelSet.parse("[2,1]")
    with pytest.raises(ParseError):
        BorelSet.parse("[0,1] x")


def test_parse_borel_returns_end():
    b, end = parse_borel("[0,1] and more", 0)
    assert str(b) == "[0,1]" and end == 5


def test_complement():
    b = BorelSet.parse("[0,1]u(2,3]")
    assert str(b.complement()) == "(-inf,0)u(1,2]u(3,inf)"
    assert b.complement().complement() == b


ends = st.integers(-4, 4).map(lambda k: k / 2)
intervals = st.tuples(ends, ends, st.booleans(), st.booleans()).map(
    lambda t: Interval(min(t[0], t[1]), max(t[0], t[1]), t[2], t[3])
)
borels = st.lists(intervals, max_size=3).map(lambda ivs: BorelSet(tuple(ivs)))
probes = st.integers(-10, 10).map(lambda k: k / 4)


@given(borels, borels, probes)
def test_set_algebra_pointwise(a, b, x):
    assert (a | b).contains(x) == (a.contains(x) or b.contains(x))
    assert (a & b).contains(x) == (a.contains(x) and b.contains(x))
    assert a.complement().contains(x) == (not a.contains(x))


@given(borels)
def test_print_parse_roundtrip(a):
    assert BorelSet.parse(str(a)) == a


@given(borels)
def test_canonical_form_is_disjoint_and_sorted(a):
    ivs = a.intervals
    for x, y in zip(ivs, ivs[1:]):
        assert x.upper <= y.lower
        if x.upper == y.lower:
            assert not (x.upper_closed or y.lower_closed)
    assert all(not iv.is_empty() for iv in ivs)
    assert all(not (math.isinf(iv.lower) and iv.lower_closed) for iv in ivs)
