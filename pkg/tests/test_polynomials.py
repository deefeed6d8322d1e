import math

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import K, K_lattice, d, phi, rel
from qcharlier.exceptions import InvalidParameters, NonTerminating, RangeOverflow
from qcharlier.polynomials import (
    _dual_series_log,
    alt_q_charlier_lattice,
    alt_q_charlier_lattice_seq,
    alt_q_charlier_recur,
    alt_q_charlier_series,
    dual_function_F,
    dual_poly_inverted_base,
    dual_poly_lattice,
    dual_poly_qinv,
    dual_poly_recur,
    dual_poly_series,
    dual_recurrence_residual,
    duality_residual,
    lattice,
    mu,
    qdiff_residual,
    qdiff_residual_lattice,
    recurrence_coeffs,
    recurrence_table,
)
from qcharlier.qcore import QParams

P = QParams(0.5, 1.0)


# --- lattice and coefficients -------------------------------------------------


def test_mu_examples():
    assert mu(0, QParams(0.4, 2.5)) == pytest.approx(1 - 2.5)
    assert mu(1, QParams(0.5, 1.0)) == 1.5
    assert mu(2, QParams(0.5, 0.8)) == pytest.approx(3.8, rel=1e-15)


def test_mu_overflow_and_index():
    with pytest.raises(RangeOverflow):
        mu(800, QParams(0.3, 1.0))
    with pytest.raises(InvalidParameters):
        mu(-1, P)
    with pytest.raises(InvalidParameters):
        mu(1.5, P)


def test_lattice_points_distinct(params):
    pts = [pt.mu for pt in lattice(40, params)]
    assert len(set(pts)) == len(pts)
    assert all(b > c for b, c in zip(pts[1:], pts[:-1]))


def test_recurrence_coeffs_examples():
    for q, a in [(0.5, 1.0), (0.3, 2.5), (0.7, 0.3)]:
        A0, C0 = recurrence_coeffs(0, QParams(q, a))
        assert A0 == pytest.approx(1 / (1 + a * q), rel=1e-15)
        assert C0 == 0.0
    assert recurrence_coeffs(0, P)[0] == pytest.approx(2 / 3, rel=1e-15)


def test_recurrence_coeffs_positive_and_decaying(params):
    t = recurrence_table(200, params)
    assert t.C[0] == 0.0
    assert (t.A > 0).all()
    assert (t.C[1:] > 0).all()
    s = t.A + t.C
    assert s[200] < 1e-20 and s[40] < s[20] < s[1]


# --- alternative q-Charlier --------------------------------------------------


def test_charlier_low_degree(params):
    q, a = params.q, params.a
    for lam in (0.0, 0.37, 1.0, -2.0, 5.0):
        assert alt_q_charlier_series(0, lam, params) == 1.0
        assert alt_q_charlier_recur(0, lam, params) == 1.0
        expect = 1 - (1 + a * q) * lam
        assert alt_q_charlier_series(1, lam, params) == pytest.approx(expect, rel=1e-14, abs=1e-15)
        assert alt_q_charlier_recur(1, lam, params) == pytest.approx(expect, rel=1e-14, abs=1e-15)


def test_charlier_recur_example():
    assert alt_q_charlier_recur(1, 0.3, P) == pytest.approx(1 - 1.5 * 0.3, rel=1e-15)
    assert alt_q_charlier_recur(2, 0.5, P) == pytest.approx(alt_q_charlier_series(2, 0.5, P), rel=1e-10)


@pytest.mark.parametrize("method", ["series", "recurrence"])
def test_charlier_value_at_one(params, method):
    q, a = params.q, params.a
    for n in range(13):
        got = alt_q_charlier_lattice(n, 0, params, method)
        assert got == pytest.approx((-a) ** n * q ** (n * n), rel=1e-10)


def test_charlier_n5_at_one():
    for q, a in [(0.5, 1.0), (0.7, 2.5), (0.3, 0.3)]:
        p = QParams(q, a)
        got = alt_q_charlier_lattice(5, 0, p, "recurrence")
        assert got == pytest.approx((-a) ** 5 * q**25, rel=1e-10)


def test_raw_paths_accurate_above_turning_point(params):
    q, a = params.q, params.a
    for n in range(13):
        for k in range(n, 13):
            ref = K_lattice(n, k, q, a)
            assert rel(alt_q_charlier_series(n, q**k, params), ref) < 1e-12
            assert rel(alt_q_charlier_recur(n, q**k, params), ref) < 1e-11


def test_raw_paths_lose_accuracy_below_turning_point():
    # K_12(1) is q**144 while the 2-phi-1 terms are O(1): cancellation wipes
    # out every digit, which is why the lattice evaluators exist
    p = QParams(0.3, 1.0)
    ref = K_lattice(12, 0, 0.3, 1.0)
    assert rel(alt_q_charlier_series(12, 1.0, p), ref) > 1.0
    assert rel(alt_q_charlier_recur(12, 1.0, p), ref) > 1.0
    assert rel(alt_q_charlier_lattice(12, 0, p), ref) < 1e-13


@pytest.mark.parametrize("method", ["series", "recurrence"])
def test_charlier_lattice_against_oracle(params, method):
    q, a = params.q, params.a
    worst = 0.0
    for n in range(13):
        for k in range(13):
            worst = max(worst, rel(alt_q_charlier_lattice(n, k, params, method), K_lattice(n, k, q, a)))
    assert worst < 1e-11


def test_charlier_lattice_seq_deep(params):
    # 60 degrees at lattice point q**3, checked against the oracle
    q, a = params.q, params.a
    signs, logs = alt_q_charlier_lattice_seq(60, 3, params)
    for n in (0, 2, 3, 4, 10, 30, 59):
        # the raw 2-phi-1 cancels over ~n**2 ln(1/q) nats, so give mpmath room
        with mp.workdps(300 + int(n * n * math.log10(1 / q)) * 2):
            ref = K_lattice(n, 3, q, a)
        assert signs[n] == mp.sign(ref)
        assert logs[n] == pytest.approx(float(mp.log(abs(ref))), abs=1e-11)


def test_unknown_method():
    with pytest.raises(ValueError):
        alt_q_charlier_lattice(2, 1, P, "magic")


# --- q-difference equation ---------------------------------------------------


@settings(max_examples=40)
@given(lam=st.floats(0.01, 10.0), a=st.floats(0.1, 3.0))
def test_qdiff_degree_zero(lam, a):
    r = qdiff_residual(0, lam, QParams(0.5, a))
    assert r.relative < 1e-14


def test_qdiff_examples():
    assert qdiff_residual(3, 0.25, QParams(0.5, 0.8)).relative < 1e-10
    assert qdiff_residual(8, 0.7**5, QParams(0.7, 2.5)).relative < 1e-9
    with pytest.raises(ZeroDivisionError):
        qdiff_residual(2, 0.0, P)


def test_qdiff_off_lattice():
    # the equation holds for every real lambda, not only on the lattice
    p = QParams(0.6, 1.7)
    for lam in (0.9, 1.3, 2.2, 0.05):
        for n in range(6):
            assert qdiff_residual(n, lam, p).relative < 1e-12


def test_qdiff_lattice_grid(params):
    worst = max(qdiff_residual_lattice(n, k, params).relative for n in range(13) for k in range(13))
    assert worst < 1e-9


# --- dual polynomials ---------------------------------------------------------


def test_dual_series_examples(params):
    a = params.a
    for m in range(8):
        assert dual_poly_series(0, m, params) == 1.0
        assert dual_poly_series(1, m, params) == pytest.approx((1 - mu(m, params)) / a, rel=1e-13)
    for n in range(8):
        assert dual_poly_series(n, 0, params) == 1.0


def test_dual_recur_examples():
    p = QParams(0.5, 0.8)
    for mu_val in (-1.0, 0.0, 2.5, 10.0):
        assert dual_poly_recur(1, mu_val, p) == pytest.approx((1 - mu_val) / 0.8, rel=1e-15)
    assert dual_poly_recur(2, mu(3, P), P) == pytest.approx(dual_poly_series(2, 3, P), rel=1e-10)


def test_dual_recur_at_zero_matches_exact_polynomial():
    q, a = mp.mpf("0.5"), mp.mpf("0.8")
    prev, cur = mp.mpf(0), mp.mpf(1)
    for i in range(4):
        prev, cur = cur, -((0 - q**-i) * cur + (q**-i - 1) * prev) / a
    assert dual_poly_recur(4, 0.0, QParams(0.5, 0.8)) == pytest.approx(float(cur), rel=1e-13)


@pytest.mark.parametrize("method", ["series", "recurrence"])
def test_dual_lattice_against_oracle(params, method):
    q, a = params.q, params.a
    worst = 0.0
    for n in range(13):
        for m in range(13):
            worst = max(worst, rel(dual_poly_lattice(n, m, params, method), d(n, m, q, a)))
    assert worst < 1e-11


@settings(max_examples=40, deadline=None)
@given(
    n=st.integers(0, 8),
    start=st.floats(-5, 5),
    step=st.floats(0.2, 2.0),
    q=st.floats(0.3, 0.8),
    a=st.floats(0.3, 2.5),
)
def test_dual_recur_is_degree_n(n, start, step, q, a):
    p = QParams(q, a)
    vals = [dual_poly_recur(n, start + j * step, p) for j in range(n + 2)]
    diff = math.fsum((-1) ** (n + 1 - j) * math.comb(n + 1, j) * v for j, v in enumerate(vals))
    scale = math.fsum(math.comb(n + 1, j) * abs(v) for j, v in enumerate(vals))
    assert abs(diff) <= 1e-8 * scale


def test_dual_recurrence_residual_grid(params):
    worst = max(dual_recurrence_residual(n, m, params).relative for n in range(13) for m in range(13))
    assert worst < 1e-9


# --- dual functions and duality ---------------------------------------------------


def test_dual_function_examples(params):
    q, a = params.q, params.a
    for n in range(6):
        assert dual_function_F(n, 0, params) == 1.0
    p = QParams(0.5, 0.8)
    assert dual_function_F(2, 3, p) == pytest.approx(alt_q_charlier_lattice(3, 2, p), rel=1e-14)
    assert rel(dual_function_F(2, 3, p), K(3, mp.mpf("0.5") ** 2, "0.5", "0.8")) < 1e-13
    for n in range(8):
        for m in range(8):
            lhs = dual_function_F(n, m, params)
            rhs = (-a) ** m * q ** (m * m) * dual_poly_series(n, m, params)
            assert lhs == pytest.approx(rhs, rel=1e-12)


def test_dual_function_requires_lattice_point():
    with pytest.raises(NonTerminating):
        dual_function_F(1, 1.5, P)


def test_duality_residual_examples():
    r = duality_residual(0, 0, P)
    assert r.residual == 0.0
    for q, a in [(0.5, 1.0), (0.3, 2.5)]:
        p = QParams(q, a)
        r = duality_residual(1, 1, p)
        assert r.rhs == pytest.approx(1 - (1 + a * q) * q, rel=1e-14)
        assert abs(r.residual) < 1e-15


def test_duality_residual_grid(params):
    for m in range(13):
        for n in range(13):
            r = duality_residual(m, n, params)
            assert r.within(1e-9, 1e-13)
            assert r.relative <= 1e-9


# --- inverted base --------------------------------------------------------------


def test_qinv_examples():
    p = QParams(0.6, 1.0)
    for m in range(5):
        assert dual_poly_qinv(0, m, p) == 1.0
    assert dual_poly_qinv(1, 1, p) == pytest.approx(dual_poly_inverted_base(1, 1, p), rel=1e-10)
    q = mp.mpf("0.6")
    ref = phi([q**-3, -(q**3), q**-2], [0, 0], q, q, 2)
    assert dual_poly_qinv(2, 3, p) == pytest.approx(float(ref), rel=1e-13)


def test_qinv_matches_inverted_base(params):
    for n in range(9):
        for m in range(9):
            x, y = dual_poly_qinv(n, m, params), dual_poly_inverted_base(n, m, params)
            assert x == pytest.approx(y, rel=1e-9)


def test_qinv_needs_inverted_parameter():
    # replacing q by 1/q while keeping a does not give the 3-phi-2
    p = QParams(0.5, 0.8)
    literal = _dual_series_log(1, 1, 2.0, 0.8).value
    assert abs(literal - dual_poly_qinv(1, 1, p)) > 0.1


def test_qinv_overflow():
    with pytest.raises(RangeOverflow):
        dual_poly_qinv(2, 700, QParams(0.3, 1.0))
