import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fupstft.operators.subaveraging import check_subaveraging


def test_constant_function_at_origin_is_tight():
    for R in (0.3, 1.0, 2.0):
        res = check_subaveraging(0, 0j, R, p=2)
        assert res.passed
        assert res.rhs == pytest.approx(res.lhs, rel=1e-9)


def test_example_case():
    assert check_subaveraging(5, 1 + 1j, 0.5, p=2).passed


def test_two_dimensional_case():
    res = check_subaveraging((2, 1), (0.5 + 0.2j, -0.3 + 0.4j), 0.8, p=4)
    assert res.passed and res.rhs >= res.lhs


def test_bad_input():
    with pytest.raises(ValueError):
        check_subaveraging(1, 0j, 0.0)
    with pytest.raises(ValueError):
        check_subaveraging(1, 0j, 1.0, p=0.5)
    with pytest.raises(ValueError):
        check_subaveraging((1, 2), 0j, 1.0)


def test_budget_exhaustion_is_inconclusive():
    # with no room to refine there is never a second level to compare against
    res = check_subaveraging(20, 2.5 + 1j, 2.0, p=1, max_angles=64)
    assert res.status == "inconclusive" and not res.passed


@given(st.integers(0, 20), st.floats(0, 3), st.floats(0, 2 * math.pi), st.floats(0.05, 2), st.sampled_from([1.0, 2.0, 4.0]))
@settings(max_examples=40, deadline=None)
def test_random_monomials_pass(k, r, theta, R, p):
    z = r * complex(math.cos(theta), math.sin(theta))
    assert check_subaveraging(k, z, R, p=p).status == "pass"
