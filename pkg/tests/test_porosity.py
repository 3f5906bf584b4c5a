import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fupstft.cantor import CantorSpec, IntervalUnion, build_iterate, square_product
from fupstft.porosity import (
    InvalidParameterError,
    certify_cantor_porosity,
    cantor_porosity_constants,
    sample_porosity_product,
    thicken_1d,
    thickened_porosity,
    verify_porosity_1d,
)

from oracles import largest_free_ball

FAMILIES = [(3, (0, 2)), (4, (0, 3)), (5, (1, 3)), (4, (0, 1, 3))]


@pytest.mark.parametrize("M,alphabet", FAMILIES)
@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_certificate_matches_brute_force(M, alphabet, n):
    spec = CantorSpec(M, alphabet, n, 1)
    cert = certify_cantor_porosity(spec)
    assert cert.verified
    arr = build_iterate(spec).as_array()
    nu, a_min = cantor_porosity_constants(spec)
    rng = np.random.default_rng(n)
    for r in np.geomspace(a_min, 4 * M, 25):
        for x in rng.uniform(-r, 1 + r, 200):
            assert largest_free_ball(arr, x, r) >= nu * r - 1e-12


def test_mid_third_below_cell_is_not_porous():
    spec = CantorSpec(3, (0, 2), 3, 1)
    s = build_iterate(spec)
    w = verify_porosity_1d(s, 1 / 9, 0.001, 0.01)
    assert not w.verified
    x, r = w.counterexample
    assert largest_free_ball(s.as_array(), x, r) < r / 9


@given(st.integers(1, 6), st.floats(0.02, 0.5))
@settings(max_examples=40, deadline=None)
def test_verify_agrees_with_grid_oracle(n, nu):
    s = build_iterate(CantorSpec(3, (0, 2), n, 1))
    arr = s.as_array()
    lo, hi = 3.0**-n, 2.0
    w = verify_porosity_1d(s, nu, lo, hi)
    if w.verified:
        for r in np.geomspace(lo, hi, 12):
            xs = np.linspace(-r, 1 + r, 401)
            assert min(largest_free_ball(arr, x, r) for x in xs) >= nu * r - 1e-12
    else:
        x, r = w.counterexample
        assert largest_free_ball(arr, x, r) <= nu * r + 1e-12


def test_input_validation():
    s = build_iterate(CantorSpec(3, (0, 2), 2, 1))
    for nu in (0, 1, -0.5):
        with pytest.raises(InvalidParameterError):
            verify_porosity_1d(s, nu, 0.1, 1)
    with pytest.raises(InvalidParameterError):
        verify_porosity_1d(s, 0.1, 1, 0.1)
    with pytest.raises(InvalidParameterError):
        verify_porosity_1d(s, 0.1, 1, math.inf)


def test_empty_set_is_porous():
    assert verify_porosity_1d(IntervalUnion(), 0.5, 0.1, 1).verified


def test_thickening():
    s = build_iterate(CantorSpec(3, (0, 2), 1, Fraction(1)))
    t = thicken_1d(s, Fraction(1, 10))
    assert t.intervals == ((Fraction(-1, 10), Fraction(13, 30)), (Fraction(17, 30), Fraction(11, 10)))
    assert thicken_1d(s, Fraction(1, 5)).intervals == ((Fraction(-1, 5), Fraction(6, 5)),)
    nu, (lo, hi) = thickened_porosity(1 / 9, 0.001, 0.1, 3)
    assert nu == pytest.approx(1 / 9 - 0.01) and (lo, hi) == (0.1, 3)
    with pytest.raises(InvalidParameterError):
        thickened_porosity(1 / 9, 0.5, 1, 3)


def test_thickened_set_is_still_porous():
    spec = CantorSpec(3, (0, 2), 4, 1)
    r, R = 0.0005, 0.05
    nu, (lo, hi) = thickened_porosity(1 / 9, r, R, 3)
    w = verify_porosity_1d(thicken_1d(build_iterate(spec), r), nu, max(lo, 3.0 ** (1 - 4)), hi)
    assert w.verified


def test_product_sampling():
    spec = CantorSpec(3, (0, 2), 3, 1)
    prod = square_product(spec, 2)
    nu = 1 / 9 / math.sqrt(2)
    w = sample_porosity_product(prod, nu, 3.0**-2, 3.0, trials=300, seed=1)
    assert w.verified and w.seed == 1
    # a full square is not porous at scales well inside it
    full = square_product(CantorSpec(3, (0, 2), 0, 1), 2)
    assert not sample_porosity_product(full, 0.3, 0.01, 0.05, trials=50, seed=2).verified
