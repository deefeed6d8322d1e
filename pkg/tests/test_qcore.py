import math

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import phi, qpoch
from qcharlier.exceptions import InvalidParameters, NonTerminating, RangeOverflow
from qcharlier.qcore import (
    LogValue,
    QParams,
    phi21_zero_c,
    phi30,
    phi32_zero_params,
    q_exponential_Eq,
    q_pochhammer,
    q_pochhammer_inf,
    q_pochhammer_log,
    series_terms,
    signed_log_sum,
    terminating_series,
)


def test_qparams_validation():
    QParams(0.5, 1.0)
    for q in (0.0, 1.0, 1.2, -0.5, math.nan):
        with pytest.raises(InvalidParameters, match="q must satisfy 0<q<1"):
            QParams(q, 1.0)
    for a in (0.0, -1.0, math.inf):
        with pytest.raises(InvalidParameters):
            QParams(0.5, a)


def test_q_pochhammer_examples():
    assert q_pochhammer(0.7, 0.5, 0) == 1.0
    assert q_pochhammer(1.0, 0.5, 3) == 0.0
    assert q_pochhammer(0.5, 0.5, 2) == 0.375


def test_q_pochhammer_negative_n():
    with pytest.raises(InvalidParameters):
        q_pochhammer(0.5, 0.5, -1)


@given(
    x=st.floats(-3, 3, allow_nan=False),
    q=st.floats(0.05, 0.95),
    n=st.integers(0, 40),
)
def test_q_pochhammer_step(x, q, n):
    lhs = q_pochhammer(x, q, n + 1)
    rhs = q_pochhammer(x, q, n) * (1 - x * q**n)
    assert lhs == pytest.approx(rhs, rel=1e-15, abs=0)


def test_q_pochhammer_log_matches_direct():
    for x, q, n in [(0.3, 0.5, 10), (-2.0, 0.7, 25), (4.0, 0.3, 6)]:
        lv = q_pochhammer_log(x, q, n)
        assert lv.value == pytest.approx(q_pochhammer(x, q, n), rel=1e-13)
    assert q_pochhammer_log(1.0, 0.5, 3).sign == 0


def test_q_pochhammer_log_beyond_binary64():
    # (q**-400; q)_400 at q = 0.1 is far outside binary64
    lv = q_pochhammer_log(10.0**40, 0.1, 30)
    ref = mp.log(abs(qpoch(mp.mpf(10) ** 40, mp.mpf("0.1"), 30)))
    assert lv.log_abs == pytest.approx(float(ref), rel=1e-14)


def test_q_pochhammer_inf_examples():
    assert q_pochhammer_inf(0.0, 0.5).value == 1.0
    a, q = 0.8, 0.5
    assert q_pochhammer_inf(-a * q, q).value == pytest.approx(q_exponential_Eq(a, q).value, rel=1e-14)
    r = q_pochhammer_inf(0.5, 0.5, tol=1e-14)
    assert r.terms_used <= 50
    ref = mp.qp(mp.mpf("0.5"), mp.mpf("0.5"))
    assert abs(r.value - float(ref)) <= r.tail_bound + 1e-15


def test_q_pochhammer_inf_zero_factor_and_tol():
    assert q_pochhammer_inf(1.0, 0.5).value == 0.0
    with pytest.raises(InvalidParameters):
        q_pochhammer_inf(0.5, 0.5, tol=0.0)


@pytest.mark.parametrize("x", [-3.0, -0.5, 0.2, 0.9])
@pytest.mark.parametrize("q", [0.3, 0.7, 0.9])
def test_q_pochhammer_inf_tail_bound_is_honest(x, q):
    r = q_pochhammer_inf(x, q, tol=1e-6)
    ref = float(mp.qp(mp.mpf(x), mp.mpf(q)))
    assert r.tail_bound >= 0
    assert abs(r.value - ref) <= r.tail_bound + 4 * r.terms_used * 2.2e-16 * abs(ref)


def test_q_exponential_examples():
    assert q_exponential_Eq(0.0, 0.5).value == 1.0
    brute = math.fsum(0.5 ** (n * (n + 1) / 2) / q_pochhammer(0.5, 0.5, n) for n in range(40))
    assert q_exponential_Eq(1.0, 0.5).value == pytest.approx(brute, rel=1e-15)


@pytest.mark.parametrize("q", [0.3, 0.5, 0.7])
@pytest.mark.parametrize("a", [0.3, 1.0, 2.5])
def test_q_exponential_is_infinite_product(q, a):
    assert q_exponential_Eq(a, q).value == pytest.approx(q_pochhammer_inf(-a * q, q).value, rel=1e-12)


@settings(max_examples=60)
@given(z=st.floats(0, 5), q=st.floats(0.1, 0.9))
def test_q_exponential_product_within_bounds(z, q):
    e = q_exponential_Eq(z, q)
    p = q_pochhammer_inf(-z * q, q)
    assert abs(e.value - p.value) <= e.tail_bound + p.tail_bound + 1e-12 * abs(p.value)


def test_signed_log_sum():
    lv = signed_log_sum([1, -1, 1], [math.log(3.0), math.log(1.0), math.log(0.5)])
    assert lv.value == pytest.approx(2.5)
    assert lv.scale == pytest.approx(4.5)
    assert signed_log_sum([1, -1], [0.0, 0.0]).sign == 0
    big = signed_log_sum([1, -1], [800.0, 799.0])
    assert big.log_abs == pytest.approx(800 + math.log1p(-math.exp(-1)))
    with pytest.raises(RangeOverflow):
        big.value


def test_logvalue_product():
    x = LogValue(-1.0, 2.0, 2.0) * LogValue(-1.0, 3.0, 4.0)
    assert x == LogValue(1.0, 5.0, 6.0)


def test_phi21_examples():
    q, a, lam = 0.5, 0.8, 0.37
    assert phi21_zero_c(1.0, 7.0, q, 3.0, 0) == 1.0
    assert phi21_zero_c(1 / q, -a * q, q, q * lam, 1) == pytest.approx(1 - (1 + a * q) * lam, rel=1e-15)


def test_phi21_non_terminating():
    with pytest.raises(NonTerminating):
        phi21_zero_c(3.0, 1.0, 0.5, 0.5, 1)
    with pytest.raises(NonTerminating):
        phi30(1.5, 2.0, 3.0, 0.5, 0.1, 2)


def test_phi30_convention_factor():
    # the two-term sum pins q**(-k(k-1)) per term
    for q, a, m in [(0.5, 1.0, 3), (0.3, 2.5, 1), (0.7, 0.3, 5)]:
        mu = q**-m - a * q**m
        got = phi30(q**-m, -a * q**m, 1 / q, q, -q / a, 1)
        assert got == pytest.approx((1 - mu) / a, rel=1e-13)
    # third term carries q**-2
    q, a = 0.5, 1.0
    got = phi30(q**-3, -a * q**3, q**-2, q, -(q**2) / a, 2)
    assert got == pytest.approx(float(phi([q**-3, -a * q**3, q**-2], [], mp.mpf(q), -(mp.mpf(q) ** 2) / a, 2)), rel=1e-13)


def test_phi30_duality_example():
    q, a, m, n = 0.5, 0.8, 4, 3
    lhs = phi30(q**-m, -a * q**m, q**-n, q, -(q**n) / a, min(m, n))
    mq, ma = mp.mpf(q), mp.mpf(a)
    K = phi([mq**-m, -ma * mq**m], [0], mq, mq ** (n + 1), m)
    assert lhs == pytest.approx(float(K / ((-ma) ** m * mq ** (m * m))), rel=1e-12)


def test_phi32_examples():
    q, a = 0.5, 1.3
    assert phi32_zero_params(q**-2, 1.0, 2.0, q, 0.7, 0) == 1.0
    brute = 1 + (1 - 1 / q) * (1 + a * q) * (1 - 1 / q) / (1 - q) * q
    assert phi32_zero_params(1 / q, -a * q, 1 / q, q, q, 1) == pytest.approx(brute, rel=1e-14)


def test_lower_zero_counts_toward_s():
    # 3-phi-2 with zero lower parameters has no convention factor
    q = 0.6
    up = (q**-3, 0.4, 0.9)
    got = terminating_series(up, (0.0, 0.0), q, 0.3, 3).value
    ref = phi([mp.mpf(u) for u in up], [0, 0], mp.mpf(q), mp.mpf("0.3"), 3)
    assert got == pytest.approx(float(ref), rel=1e-13)


@settings(max_examples=50)
@given(
    m=st.integers(0, 15),
    q=st.floats(0.2, 0.9),
    b=st.floats(-3, 3),
    z=st.floats(-2, 2),
)
def test_summation_order_independence(m, q, b, z):
    signs, logs = series_terms((q**-m, b), (0.0,), q, z, m)
    terms = [s * math.exp(l) for s, l in zip(signs, logs)]
    rev = 0.0
    for t in reversed(terms):
        rev += t
    fwd = terminating_series((q**-m, b), (0.0,), q, z, m).value
    scale = math.fsum(abs(t) for t in terms)
    # plain reverse summation is itself only accurate to ~m eps relative to the terms
    assert abs(fwd - rev) <= max(1e-13 * abs(fwd), (m + 2) * 2.3e-16 * scale)


@pytest.mark.parametrize("q", [0.3, 0.5, 0.7])
@pytest.mark.parametrize("a", [0.3, 1.0, 2.5])
def test_phi21_closed_form_at_one(q, a):
    # the terms are O(1) while the sum is q**(m*m), so the raw sum is only
    # accurate relative to its largest term
    for m in range(13):
        signs, logs = series_terms((q**-m, -a * q**m), (0.0,), q, q, m)
        got = phi21_zero_c(q**-m, -a * q**m, q, q, m)
        exact = (-a) ** m * q ** (m * m)
        assert abs(got - exact) <= 1e-9 * abs(exact) + 1e-13 * math.exp(max(logs))
