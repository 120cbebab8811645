import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from qseries.errors import NonFiniteError, PoleError
from qseries.scalar import (
    AccumulatorState,
    ScaledProduct,
    accumulate,
    compensated_sum,
    exact_sum,
    gamma,
    rgamma,
)

from oracles import gamma_stirling


def rel(x, y):
    return abs(x - y) / abs(y)


def test_gamma_one_and_half():
    assert gamma(1) == 1
    assert rel(gamma(0.5), math.sqrt(math.pi)) < 1e-14


def test_gamma_complex_against_stirling_oracle():
    z = 4.2 + 1.3j
    assert rel(gamma(z), gamma_stirling(z)) < 1e-12


@settings(max_examples=150, deadline=None)
@given(
    st.floats(-15.0, 25.0, allow_nan=False),
    st.floats(-10.0, 10.0, allow_nan=False),
)
def test_gamma_matches_oracle(x, y):
    z = complex(x, y)
    # stay clear of the poles, where the relative comparison is meaningless
    n = min(round(x), 0)
    if abs(z - n) < 1e-3:
        return
    assert rel(gamma(z), gamma_stirling(z)) < 1e-12


@pytest.mark.parametrize("n", [0, -1, -2, -7, -30])
def test_gamma_poles(n):
    with pytest.raises(PoleError):
        gamma(n)
    assert rgamma(n) == 0


def test_rgamma_is_reciprocal():
    z = -2.5 + 0.25j
    assert rel(rgamma(z) * gamma(z), 1.0) < 1e-14


def test_gamma_overflow_is_reported_not_inf():
    with pytest.raises(NonFiniteError):
        gamma(400.0)


def test_accumulate_recovers_cancelled_tiny_term():
    state = AccumulatorState()
    for t in (1.0, 1e-17, -1.0):
        state = accumulate(state, t)
    assert abs(state.value - 1e-17) <= math.ulp(1e-17)
    assert state.terms_added == 3


def test_empty_accumulator_is_zero():
    assert AccumulatorState().value == 0
    assert compensated_sum([]) == 0


def test_million_tenths():
    exact = Fraction(0.1) * 10**6
    value = compensated_sum([0.1] * 10**6)
    assert abs(Fraction(value.real) - exact) / exact < 1e-14


def test_accumulate_rejects_nan():
    with pytest.raises(NonFiniteError):
        accumulate(AccumulatorState(), complex(math.nan, 0))


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-1e6, 1e6, allow_nan=False), max_size=60))
def test_compensated_sum_agrees_with_fsum(xs):
    ref = math.fsum(xs)
    got = compensated_sum(xs).real
    scale = math.fsum(abs(x) for x in xs)
    assert abs(got - ref) <= 4 * 2.0**-53 * max(abs(ref), 1e-300) + 2.0**-100 * scale
    assert exact_sum(xs).real == ref


def test_scaled_product_stays_representable():
    sp = ScaledProduct()
    for _ in range(500):
        sp.mul(1e-300)
    for _ in range(500):
        sp.div(1e-300)
    assert rel(sp.value, 1.0) < 1e-12
