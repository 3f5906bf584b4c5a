import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fupstft.cantor import (
    CantorSpec,
    GrowthCondition,
    IntervalUnion,
    InvalidSpecError,
    RadialCantorSpec,
    build_iterate,
    cantor_function,
    check_growth,
    discrete_iterate,
    measure_below,
    radial_slice,
    square_product,
)

from oracles import digit_intervals, digit_measure, measure_up_to


@st.composite
def specs(draw, max_n=6, rational=True):
    M = draw(st.integers(2, 5))
    size = draw(st.integers(1, M - 1))
    alphabet = tuple(sorted(draw(st.sets(st.integers(0, M - 1), min_size=size, max_size=size))))
    n = draw(st.integers(0, max_n))
    if rational:
        L = Fraction(draw(st.integers(1, 20)), draw(st.integers(1, 7)))
    else:
        L = draw(st.floats(0.1, 20.0))
    return CantorSpec(M, alphabet, n, L)


def test_small_iterates():
    assert build_iterate(CantorSpec(3, (0, 2), 0, 1)).intervals == ((0, 1),)
    one = build_iterate(CantorSpec(3, (0, 2), 1, 1))
    assert one.intervals == ((0, Fraction(1, 3)), (Fraction(2, 3), 1))
    assert one.measure == Fraction(2, 3)
    two = build_iterate(CantorSpec(3, (0, 2), 2, 1))
    assert len(two) == 4 and two.measure == Fraction(4, 9)
    assert all(b - a == Fraction(1, 9) for a, b in two)


def test_discrete_iterates():
    assert discrete_iterate(CantorSpec(3, (0, 2), 1)) == [0, 2]
    assert discrete_iterate(CantorSpec(3, (0, 2), 2)) == [0, 2, 6, 8]
    assert discrete_iterate(CantorSpec(2, (1,), 3)) == [7]
    with pytest.raises(OverflowError):
        discrete_iterate(CantorSpec(5, (0,), 40))


@pytest.mark.parametrize(
    "args",
    [(3, (), 1, 1), (3, (0, 1, 2), 1, 1), (3, (0, 3), 1, 1), (1, (0,), 1, 1), (3, (0,), -1, 1), (3, (0,), 1, 0)],
)
def test_invalid_specs(args):
    with pytest.raises(InvalidSpecError):
        CantorSpec(*args)


@given(specs())
@settings(max_examples=80, deadline=None)
def test_iterate_matches_digit_enumeration(spec):
    got = build_iterate(spec)
    cells = digit_intervals(spec.M, spec.alphabet, spec.n, spec.L)
    assert got == IntervalUnion(tuple(cells))
    assert got.measure == digit_measure(spec.M, spec.alphabet, spec.n, spec.L) == spec.measure
    assert got.span[0] >= 0 and got.span[1] <= spec.L


@given(specs(max_n=5))
@settings(max_examples=60, deadline=None)
def test_iterates_are_nested(spec):
    assert build_iterate(spec.with_(n=spec.n + 1)).issubset(build_iterate(spec))


@given(specs(max_n=8, rational=False))
@settings(max_examples=60, deadline=None)
def test_float_measure(spec):
    got = build_iterate(spec).measure
    assert abs(got - float(spec.measure)) <= 1e-12 * float(spec.measure)


@given(specs(max_n=6), st.fractions(min_value=-1, max_value=25))
@settings(max_examples=150, deadline=None)
def test_cantor_function_is_normalised_measure(spec, x):
    cells = digit_intervals(spec.M, spec.alphabet, spec.n, spec.L)
    g = cantor_function(spec, x)
    assert g == measure_up_to(cells, x) / spec.measure
    assert measure_below(spec, x) == measure_up_to(cells, x)


@given(specs(max_n=6), st.floats(-1, 25), st.floats(-1, 25))
@settings(max_examples=100, deadline=None)
def test_cantor_function_monotone(spec, x, y):
    lo, hi = min(x, y), max(x, y)
    assert 0 <= cantor_function(spec, lo) <= cantor_function(spec, hi) <= 1


def test_cantor_function_examples():
    spec = CantorSpec(3, (0, 2), 1, 1)
    assert cantor_function(spec, -1) == 0
    assert cantor_function(spec.with_(n=7), 1) == 1
    assert cantor_function(spec, Fraction(1, 2)) == Fraction(1, 2)


def test_interval_union_normalises():
    u = IntervalUnion(((2, 3), (0, 1), (1, 1.5), (5, 5)))
    assert u.intervals == ((0, 1.5), (2, 3))
    assert u.measure == 2.5
    with pytest.raises(ValueError):
        IntervalUnion(((1, 0),))
    assert json.loads(json.dumps(u.to_json())) == [[0, 1.5], [2, 3]]
    assert IntervalUnion.from_json(u.to_json()) == u


def test_spec_json():
    spec = CantorSpec(3, [2, 0], 2, Fraction(1, 3))
    assert spec.alphabet == (0, 2)
    data = spec.to_json()
    assert data["M"] == 3 and data["alphabet"] == [0, 2] and data["n"] == 2


def test_radial_slice():
    full = RadialCantorSpec(1, 1.0, 3, (0, 2), 0)
    assert radial_slice(full).as_array().tolist() == [[0.0, 1.0]]
    assert full.volume == pytest.approx(np.pi)
    one = RadialCantorSpec(1, 1.0, 3, (0, 2), 1)
    assert one.volume == pytest.approx(2 * np.pi / 3)
    assert not one.contains([[np.sqrt(0.5), 0.0]])[0]
    assert one.contains([[0.5, 0.0], [0.0, 0.9]]).all()
    d2 = RadialCantorSpec(2, 1.5, 3, (0, 2), 2)
    assert d2.volume == pytest.approx((4 / 9) * (np.pi * 1.5**2) ** 2 / 2)


def test_product_measure():
    spec = CantorSpec(3, (0, 2), 2, 1)
    prod = square_product(spec, 2)
    assert prod.measure == Fraction(16, 81)
    assert len(prod.axes()) == 2


def test_growth_conditions():
    cond = GrowthCondition("I_M", 1, 1, 3)
    assert check_growth(cond, [(n, 3 ** (n / 2)) for n in range(10)])
    bad = check_growth(cond, [(2, 2.9)])
    assert not bad and bad.violation[0] == 2
    assert check_growth(GrowthCondition("D_M", 1, 2, 3), [(2, 5)])
    with pytest.raises(ValueError):
        GrowthCondition("D_M", 2, 1, 3)
    with pytest.raises(ValueError):
        GrowthCondition("X", 1, 1, 3)
