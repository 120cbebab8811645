import math

import mpmath as mp
import pytest
from hypothesis import given, settings, strategies as st

from qseries.errors import DivisionByVanishingFactor, DomainError
from qseries.pochhammer import poch, poch_ratio, qpoch, qpoch_inf, qpoch_multi, qpoch_ratio

import invariants
from oracles import qpoch_direct, qpoch_inf as qpoch_inf_oracle

EULER_HALF = 0.28878809508660242


def close(x, y, tol=1e-13):
    return abs(x - y) <= tol * max(abs(y), 1e-300)


def test_qpoch_examples():
    assert qpoch(0.7, 0.5, 0).value == 1
    assert close(qpoch(0.25, 0.5, -1).value, 2.0)
    assert close(qpoch(0.5, 0.5, 2).value, 0.375)


def test_qpoch_negative_index_pole():
    with pytest.raises(DivisionByVanishingFactor):
        qpoch(0.5, 0.5, -1)


def test_qpoch_zero_tracking():
    r = qpoch(0.25, 0.5, 5)
    assert not r.is_zero
    r = qpoch(4.0, 0.5, 5)  # 1 - 4 * 0.25 = 0 at j=2
    assert r.is_zero and r.zero_order == 1 and r.value == 0


def test_qpoch_inf_examples():
    assert qpoch_inf(0, 0.3 + 0.2j) == 1
    assert close(qpoch_inf(0.5, 0.5), EULER_HALF, 1e-10)
    assert close(qpoch_inf(0.5, 0.5), qpoch_inf_oracle(0.5, 0.5), 1e-14)
    assert qpoch_inf(1, 0.5) == 0


def test_qpoch_multi_examples():
    assert qpoch_multi([], 0.5, 7).value == 1
    assert close(qpoch_multi([0.5, 0.25], 0.5, 1).value, 0.375)
    assert close(qpoch_multi([0.5], 0.5, math.inf).value, EULER_HALF, 1e-10)


def test_poch_examples():
    assert poch(1, 4).value == 24
    assert close(poch(0.5, -2).value, 4 / 3)
    assert poch(3.7 - 1j, 0).value == 1
    r = poch(-2, 5)
    assert r.is_zero and r.value == 0
    with pytest.raises(DivisionByVanishingFactor):
        poch(2, -3)


@pytest.mark.parametrize("q", [0.0, 1.0, 1.2, -1.0, 0.6 + 0.8j])
def test_bad_base(q):
    with pytest.raises(DomainError):
        qpoch(0.3, q, 3)


def test_ratio_survives_where_parts_overflow():
    # each product alone overflows a double at k = -400, q = 0.1
    a, b, q, k = 2.0, 3.0, 0.1, -400
    value = qpoch_ratio([a], [b], q, k)
    assert math.isfinite(abs(value))
    # (a;q)_{-n}/(b;q)_{-n} = prod_j (1 - b q^-j)/(1 - a q^-j), formed in 40 digits
    mq = mp.mpf("0.1")
    ref = mp.fprod([(1 - 3 * mq ** (-j)) / (1 - 2 * mq ** (-j)) for j in range(1, 401)])
    assert close(value, complex(ref), 1e-12)


def test_poch_ratio_matches_direct():
    assert close(poch_ratio([0.5, 1.5], [2.5], 6), poch(0.5, 6).value * poch(1.5, 6).value / poch(2.5, 6).value)


@settings(max_examples=200, deadline=None)
@given(
    st.complex_numbers(max_magnitude=3.0, allow_nan=False, allow_infinity=False),
    st.floats(0.05, 0.95),
    st.integers(-8, 8),
)
def test_qpoch_matches_direct_oracle(a, q, k):
    try:
        got = qpoch(a, q, k).value
    except DivisionByVanishingFactor:
        assert any(abs(1 - a * q ** (-j)) < 1e-12 for j in range(1, -k + 1))
        return
    ref = qpoch_direct(a, q, k)
    assert abs(got - ref) <= 1e-12 * max(abs(ref), 1e-12)


cplx = st.complex_numbers(max_magnitude=3.0, allow_nan=False, allow_infinity=False)
base = st.floats(0.05, 0.95)
idx = st.integers(-8, 8)


@settings(max_examples=300, deadline=None)
@given(cplx, base, idx, idx)
def test_splice_property(a, q, m, n):
    d = invariants.qpoch_splice(a, q, m, n)
    assert d is None or d < 1e-12


@settings(max_examples=300, deadline=None)
@given(cplx, base, idx)
def test_ratio_property(a, q, k):
    d = invariants.qpoch_ratio_identity(a, q, k)
    assert d is None or d < 1e-12


@settings(max_examples=300, deadline=None)
@given(st.complex_numbers(max_magnitude=10.0, allow_nan=False, allow_infinity=False), idx, idx)
def test_poch_splice_property(a, m, n):
    d = invariants.poch_splice(a, m, n)
    assert d is None or d < 1e-12


@settings(max_examples=300, deadline=None)
@given(cplx, base, st.integers(0, 8))
def test_reflection_property(a, q, n):
    d = invariants.qpoch_reflection(a, q, n)
    assert d is None or d < 1e-12
