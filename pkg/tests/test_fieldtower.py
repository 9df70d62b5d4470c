import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quadaz.errors import DyadicPlace, NegativeValuation, ParseError, UnsupportedDomain, ZeroElement
from quadaz.fieldtower import (
    INF,
    PAdic,
    PrimeField,
    Rationals,
    etale_norm,
    parse_element,
    parse_field,
    parse_valuation,
    residue_of,
    squareclass_reduce,
    valuation_of,
)

Q = Rationals()
F5T = parse_field("Fun:Fp:5:t")
T = F5T.gen()


@pytest.mark.parametrize(
    "field, text, expected",
    [
        ("Q", "18", "2"),
        ("Q", "1", "1"),
        ("Q", "-12/5", "-15"),
        ("Fp:5", "1", "1"),
        ("Fun:Fp:5:t", "t^3+t^2", "t+1"),
        ("Fun:Fp:5:t", "1", "1"),
    ],
)
def test_squareclass_examples(field, text, expected):
    F = parse_field(field)
    assert F.fmt(squareclass_reduce(parse_element(F, text), F)) == expected


def test_squareclass_errors():
    with pytest.raises(ZeroElement):
        squareclass_reduce(0, Q)
    with pytest.raises(UnsupportedDomain):
        squareclass_reduce(1, parse_field("Dual:Q"))


@pytest.mark.parametrize(
    "field, x, place, expected",
    [
        ("Fun:Fp:5:t", "t^3+t^4", "t", 3),
        ("Fun:Fp:5:t", "1", "t", 0),
        ("Q", "12", "3", 1),
        ("Q", "1", "7", 0),
        ("Fun:Fp:5:t", "1/t^2", "inf", 2),
    ],
)
def test_valuation_examples(field, x, place, expected):
    F = parse_field(field)
    assert valuation_of(parse_element(F, x), parse_valuation(F, place)) == expected


def test_valuation_of_zero_is_infinite():
    assert valuation_of(F5T.zero, parse_valuation(F5T, "t")) == INF


@pytest.mark.parametrize(
    "field, x, place, expected",
    [
        ("Fun:Fp:5:t", "(1+t)/(1-t)", "t", "1"),
        ("Q", "7", "5", "2"),
        ("Fun:Q:t", "(t^2+1)/(t+2)", "t-1", "2/3"),
    ],
)
def test_residue_examples(field, x, place, expected):
    F = parse_field(field)
    v = parse_valuation(F, place)
    assert v.residue_field.fmt(residue_of(parse_element(F, x), v)) == expected


def test_residue_of_pole_rejected():
    with pytest.raises(NegativeValuation):
        residue_of(1 / T, parse_valuation(F5T, "t"))


def test_etale_norm_examples():
    L = parse_field("Ext:Q:2")
    assert etale_norm(1 + L.gen(), L) == -1
    assert etale_norm(L.gen(), L) == -2
    S = parse_field("Ext:Q:4")  # d a square: split algebra K x K
    x = parse_element(S, "1+sqrt(4)")
    assert etale_norm(x, S) == 3 * -1


def test_characteristic_two_rejected():
    with pytest.raises(UnsupportedDomain):
        PrimeField(2)
    with pytest.raises(DyadicPlace):
        PAdic(2)


def test_parse_errors():
    with pytest.raises(ParseError):
        parse_field("Fp:9")
    with pytest.raises(ParseError):
        parse_element(Q, "1+")
    with pytest.raises(ParseError):
        parse_element(Q, "t")
    with pytest.raises(UnsupportedDomain):
        parse_field("Ext:Fun:Fun:Fp:5:x:y:y")


def test_dual_numbers():
    D = parse_field("Dual:Fp:5")
    e = parse_element(D, "eps")
    assert e * e == D.zero
    assert D.fmt(1 + e) == "1+eps"


nonzero_q = st.fractions(min_value=-50, max_value=50, max_denominator=20).filter(lambda x: x != 0)


@settings(max_examples=200, deadline=None)
@given(nonzero_q, nonzero_q)
def test_squareclass_invariant_under_squares_q(x, y):
    assert squareclass_reduce(x * y * y, Q) == squareclass_reduce(x, Q)
    r = squareclass_reduce(x, Q)
    assert squareclass_reduce(r, Q) == r
    assert Q.is_square(x / r)


@settings(max_examples=200, deadline=None)
@given(nonzero_q, nonzero_q, st.sampled_from([3, 5, 7, 11]))
def test_padic_valuation_additive(x, y, p):
    v = PAdic(p)
    assert valuation_of(x * y, v) == valuation_of(x, v) + valuation_of(y, v)
    if x + y != 0:
        assert valuation_of(x + y, v) >= min(valuation_of(x, v), valuation_of(y, v))


@pytest.mark.parametrize("place", ["t", "t+1", "t^2+2", "inf"])
def test_function_field_valuation_axioms(place):
    rng = random.Random(place)
    v = parse_valuation(F5T, place)
    assert valuation_of(v.uniformizer(), v) == 1
    for _ in range(100):
        x, y = F5T.random(rng), F5T.random(rng)
        if x == 0 or y == 0:
            continue
        assert valuation_of(x * y, v) == valuation_of(x, v) + valuation_of(y, v)
        assert F5T.fmt(squareclass_reduce(x * y * y, F5T)) == F5T.fmt(squareclass_reduce(x, F5T))


@pytest.mark.parametrize("field, place", [("Fun:Fp:5:t", "t"), ("Fun:Fp:7:t", "t^2+1"), ("Q", "5"), ("Fun:Q:t", "t-1")])
def test_residue_is_ring_homomorphism(field, place):
    F = parse_field(field)
    v = parse_valuation(F, place)
    rng = random.Random(7)
    checked = 0
    while checked < 1000:
        x, y = F.random(rng), F.random(rng)
        if (x != 0 and v.val(x) < 0) or (y != 0 and v.val(y) < 0):
            continue
        assert v.residue(x + y) == v.residue(x) + v.residue(y)
        assert v.residue(x * y) == v.residue(x) * v.residue(y)
        checked += 1
    assert v.residue(v.uniformizer()) == v.residue_field.zero


@pytest.mark.parametrize("desc", ["Ext:Q:5", "Ext:Q:4", "Ext:Fp:7:3", "Ext:Fun:Fp:5:t:t"])
def test_etale_norm_multiplicative_and_fixes_base(desc):
    L = parse_field(desc)
    rng = random.Random(desc)
    for _ in range(100):
        x, y = L.random(rng), L.random(rng)
        assert etale_norm(x * y, L) == etale_norm(x, L) * etale_norm(y, L)
        k = L.base.random(rng)
        assert etale_norm(L.coerce(k), L) == k * k


def test_fraction_inputs():
    assert Q.coerce(Fraction(1, 2)) == Fraction(1, 2)
