"""Alternative q-Charlier polynomials K_n(lambda; a; q) and their duals
d_n(mu(m); a; q) on the q-quadratic lattice mu(m) = q**-m - a q**m.

Every family has a series path and a recurrence path.

* ``alt_q_charlier_series`` / ``alt_q_charlier_recur`` accept any real
  lambda and use the 2-phi-1 and the upward three-term recurrence
  directly.
* On the geometric grid lambda = q**k both of those lose all accuracy once
  k < n (the 2-phi-1 cancels catastrophically and the grid solution is the
  minimal solution of the recurrence).  The ``*_lattice`` evaluators take
  the integer index instead and pick a well-conditioned route: the 2-phi-1
  for k >= n, the terminating 3-phi-0 of the dual family for k < n, and a
  forward/backward recurrence matched at the turning index.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .exceptions import InvalidParameters, NonTerminating, RangeOverflow
from .qcore import (
    LOG_MAX,
    LogValue,
    QParams,
    series_terms,
    signed_log_sum,
    terminating_series,
)

__all__ = [
    "LatticePoint",
    "RecurrenceCoeffs",
    "Residual",
    "DualityResidual",
    "mu",
    "lattice",
    "recurrence_coeffs",
    "recurrence_table",
    "alt_q_charlier_series",
    "alt_q_charlier_recur",
    "alt_q_charlier_lattice",
    "alt_q_charlier_lattice_log",
    "alt_q_charlier_lattice_seq",
    "qdiff_residual",
    "qdiff_residual_lattice",
    "dual_poly_series",
    "dual_poly_series_log",
    "dual_poly_recur",
    "dual_poly_lattice",
    "dual_poly_lattice_seq",
    "dual_recurrence_residual",
    "dual_function_F",
    "dual_function_F_log",
    "duality_residual",
    "dual_poly_qinv",
    "dual_poly_inverted_base",
]

BACKWARD_EXTRA = 40
LN2 = math.log(2.0)


@dataclass(frozen=True)
class LatticePoint:
    m: int
    mu: float


@dataclass(frozen=True)
class RecurrenceCoeffs:
    A: np.ndarray
    C: np.ndarray


class Residual(NamedTuple):
    """A functional-equation residual and the magnitude it is judged against."""

    residual: float
    scale: float

    @property
    def relative(self) -> float:
        if self.scale == 0.0:
            return abs(self.residual)
        return abs(self.residual) / self.scale


class DualityResidual(NamedTuple):
    """K_m(q**n) - (-a)**m q**(m*m) d_n(mu(m)) with its two reference sizes.

    ``term_scale`` is the largest term of the 2-phi-1 for K_m, which bounds
    the rounding error of that side.
    """

    residual: float
    rhs: float
    term_scale: float

    def within(self, rtol=1e-9, term_rtol=1e-13) -> bool:
        return abs(self.residual) <= rtol * abs(self.rhs) + term_rtol * self.term_scale

    @property
    def relative(self) -> float:
        denom = abs(self.rhs) + 1e-4 * self.term_scale
        return abs(self.residual) / denom if denom else abs(self.residual)


def _check_index(name, v):
    if int(v) != v or v < 0:
        raise InvalidParameters(f"{name} must be a nonnegative integer, got {v!r}")
    return int(v)


def _qpow_neg(q, m):
    if q < 1.0 and m * -math.log(q) > LOG_MAX:
        raise RangeOverflow(f"q**-{m} overflows binary64")
    return q**-m


def mu(m, params: QParams):
    """Lattice point q**-m - a q**m."""
    m = _check_index("m", m)
    return _qpow_neg(params.q, m) - params.a * params.q**m


def lattice(m_max, params: QParams):
    return [LatticePoint(m, mu(m, params)) for m in range(m_max + 1)]


def recurrence_coeffs(n, params: QParams):
    """(A_n, C_n) of  -A_n K_{n+1} - C_n K_{n-1} + (A_n + C_n) K_n = lambda K_n."""
    n = _check_index("n", n)
    q, a = params.q, params.a
    A = q**n * (1 + a * q**n) / ((1 + a * q ** (2 * n)) * (1 + a * q ** (2 * n + 1)))
    if n == 0:
        return A, 0.0
    C = a * q ** (2 * n - 1) * (1 - q**n) / ((1 + a * q ** (2 * n - 1)) * (1 + a * q ** (2 * n)))
    return A, C


def recurrence_table(n_max, params: QParams) -> RecurrenceCoeffs:
    pairs = [recurrence_coeffs(n, params) for n in range(n_max + 1)]
    return RecurrenceCoeffs(np.array([p[0] for p in pairs]), np.array([p[1] for p in pairs]))


# --- alternative q-Charlier ------------------------------------------------


def _charlier_terms(n, lam, params):
    q, a = params.q, params.a
    return series_terms((_qpow_neg(q, n), -a * q**n), (0.0,), q, q * lam, n)


def alt_q_charlier_series(n, lam, params: QParams):
    """K_n(lam) = 2-phi-1(q**-n, -a q**n; 0; q, q lam)."""
    n = _check_index("n", n)
    return signed_log_sum(*_charlier_terms(n, lam, params)).value


def alt_q_charlier_recur(n, lam, params: QParams):
    """K_n(lam) by upward recurrence from K_0 = 1, K_{-1} = 0."""
    n = _check_index("n", n)
    prev, cur = 0.0, 1.0
    for i in range(n):
        A, C = recurrence_coeffs(i, params)
        prev, cur = cur, ((A + C - lam) * cur - C * prev) / A
    return cur


@lru_cache(maxsize=1 << 16)
def _dual_series_log(n, m, q, a) -> LogValue:
    # q may exceed 1 here (base-inverted evaluation)
    return terminating_series(
        (_qpow_neg(q, m), -a * q**m, _qpow_neg(q, n)),
        (),
        q,
        -(q**n) / a,
        min(n, m),
    )


def _duality_prefactor_log(m, params) -> LogValue:
    """(-a)**m q**(m*m) in log form."""
    l = m * math.log(params.a) + m * m * math.log(params.q)
    return LogValue(-1.0 if m % 2 else 1.0, l, l)


def alt_q_charlier_lattice_log(n, k, params: QParams) -> LogValue:
    """K_n(q**k) from the better-conditioned terminating series."""
    n = _check_index("n", n)
    k = _check_index("k", k)
    return _charlier_lattice_log(n, k, params.q, params.a)


@lru_cache(maxsize=1 << 16)
def _charlier_lattice_log(n, k, q, a) -> LogValue:
    params = QParams(q, a)
    if k >= n:
        return signed_log_sum(*_charlier_terms(n, q**k, params))
    return _duality_prefactor_log(n, params) * _dual_series_log(k, n, q, a)


def _hybrid_recurrence(n_max, turn, forward, backward, extra=BACKWARD_EXTRA):
    """Solution y_0..y_n_max with y_0 = 1 of a three-term recurrence that is
    dominant below ``turn`` and minimal above it.

    ``forward(i, y_i, y_{i-1})`` returns y_{i+1}; ``backward(i, y_i, y_{i+1})``
    returns y_{i-1}.  The forward sweep runs to ``turn``, the backward sweep
    starts ``extra`` steps above ``n_max`` and is rescaled to agree at the
    matching index.  Both sweeps renormalise by exact powers of two and keep
    integer exponents, so no precision is lost to large running offsets.
    Values are returned as (signs, logs).
    """
    mant = np.zeros(n_max + 1)
    expo = np.zeros(n_max + 1, dtype=np.int64)
    mant[0] = 1.0
    turn = min(turn, n_max)
    prev, cur, e = 0.0, 1.0, 0
    for i in range(turn):
        nxt = forward(i, cur, prev)
        if not math.isfinite(nxt):
            raise RangeOverflow("forward recurrence overflowed")
        prev, cur = cur, nxt
        if cur != 0.0:
            cur, shift = math.frexp(cur)
            prev, e = math.ldexp(prev, -shift), e + shift
        mant[i + 1], expo[i + 1] = cur, e

    if turn < n_max:
        top = n_max + extra
        b_mant = np.zeros(n_max + 1)
        b_expo = np.zeros(n_max + 1, dtype=np.int64)
        nxt_, cur, e = 0.0, 1.0, 0
        for i in range(top, max(turn - 1, 0), -1):
            below = backward(i, cur, nxt_)
            if not math.isfinite(below):
                raise RangeOverflow("backward recurrence overflowed")
            nxt_, cur = cur, below
            if cur != 0.0:
                cur, shift = math.frexp(cur)
                nxt_, e = math.ldexp(nxt_, -shift), e + shift
            if i - 1 <= n_max:
                b_mant[i - 1], b_expo[i - 1] = cur, e

        j = turn
        if j >= 1 and mant[j] != 0 and mant[j - 1] != 0:
            lj = math.log(abs(mant[j])) + expo[j] * LN2
            lj1 = math.log(abs(mant[j - 1])) + expo[j - 1] * LN2
            if lj < lj1 - math.log(1e3):
                j -= 1  # avoid matching next to a sign change of the forward solution
        if mant[j] == 0 or b_mant[j] == 0:
            raise RangeOverflow("recurrence matching point vanished")
        ratio = mant[j] / b_mant[j]
        mant[j + 1:] = b_mant[j + 1:] * ratio
        expo[j + 1:] = b_expo[j + 1:] - b_expo[j] + expo[j]

    signs = np.sign(mant)
    with np.errstate(divide="ignore"):
        logs = np.log(np.abs(mant)) + expo * LN2
    logs[signs == 0] = -np.inf
    return signs, logs


def alt_q_charlier_lattice_seq(M, k, params: QParams):
    """(signs, logs) of K_0(q**k) .. K_{M-1}(q**k) by matched recurrence."""
    k = _check_index("k", k)
    if M < 1:
        raise InvalidParameters("M must be positive")
    lam = params.q**k
    coeffs = {}

    def AC(i):
        if i not in coeffs:
            coeffs[i] = recurrence_coeffs(i, params)
        return coeffs[i]

    def forward(i, y, y_prev):
        A, C = AC(i)
        return ((A + C - lam) * y - C * y_prev) / A

    def backward(i, y, y_next):
        A, C = AC(i)
        return ((A + C - lam) * y - A * y_next) / C

    return _hybrid_recurrence(M - 1, k, forward, backward)


def alt_q_charlier_lattice(n, k, params: QParams, method="series"):
    """K_n(q**k) evaluated stably; ``method`` is "series" or "recurrence"."""
    if method == "series":
        return alt_q_charlier_lattice_log(n, k, params).value
    if method == "recurrence":
        n = _check_index("n", n)
        signs, logs = alt_q_charlier_lattice_seq(n + 1, k, params)
        return LogValue(signs[n], logs[n], logs[n]).value
    raise ValueError(f"unknown method {method!r}")


def _qdiff_terms(n, lam, k_lam, k_up, k_down, params):
    q, a = params.q, params.a
    mu_n = _qpow_neg(q, n) - a * q**n
    t1 = mu_n * k_lam
    t2 = a * k_up
    t3 = -k_lam / lam
    t4 = (1.0 - lam) * k_down / lam
    return Residual(math.fsum((t1, t2, t3, t4)), max(abs(t1), abs(t2), abs(t3), abs(t4)))


def qdiff_residual(n, lam, params: QParams) -> Residual:
    """Residual of the q-difference equation in lambda for K_n at real ``lam``:

    (q**-n - a q**n) K(lam) + a K(q lam) - K(lam)/lam + (1 - lam) K(lam/q)/lam
    """
    if lam == 0:
        raise ZeroDivisionError("lambda must be nonzero")
    n = _check_index("n", n)
    q = params.q
    K = lambda x: alt_q_charlier_series(n, x, params)  # noqa: E731
    return _qdiff_terms(n, lam, K(lam), K(q * lam), K(lam / q), params)


def qdiff_residual_lattice(n, k, params: QParams) -> Residual:
    """q-difference residual at lambda = q**k with lattice-stable K values."""
    n = _check_index("n", n)
    k = _check_index("k", k)
    K = lambda j: alt_q_charlier_lattice(n, j, params)  # noqa: E731
    # at k = 0 the K(lam/q) term carries the factor (1 - lam) = 0
    k_down = K(k - 1) if k >= 1 else 0.0
    return _qdiff_terms(n, params.q**k, K(k), K(k + 1), k_down, params)


# --- dual alternative q-Charlier -------------------------------------------


def dual_poly_series_log(n, m, params: QParams) -> LogValue:
    n = _check_index("n", n)
    m = _check_index("m", m)
    return _dual_series_log(n, m, params.q, params.a)


def dual_poly_series(n, m, params: QParams):
    """d_n(mu(m)) = 3-phi-0(q**-m, -a q**m, q**-n; -; q, -q**n / a)."""
    return dual_poly_series_log(n, m, params).value


def dual_poly_recur(n, mu_val, params: QParams):
    """d_n(mu_val) for any real mu_val by upward recurrence from d_0 = 1.

    d_{n+1} = -((mu - q**-n) d_n + q**-n (1 - q**n) d_{n-1}) / a
    """
    n = _check_index("n", n)
    q, a = params.q, params.a
    prev, cur = 0.0, 1.0
    for i in range(n):
        qi = _qpow_neg(q, i)
        prev, cur = cur, -((mu_val - qi) * cur + (qi - 1.0) * prev) / a
    return cur


def dual_poly_lattice_seq(N, m, params: QParams):
    """(signs, logs) of d_0(mu(m)) .. d_{N-1}(mu(m)) by matched recurrence."""
    m = _check_index("m", m)
    if N < 1:
        raise InvalidParameters("N must be positive")
    q, a = params.q, params.a
    mu_m = mu(m, params)

    def forward(i, y, y_prev):
        qi = q**-i
        return -((mu_m - qi) * y + (qi - 1.0) * y_prev) / a

    def backward(i, y, y_next):
        qi = q**i
        return ((1.0 - mu_m * qi) * y - a * qi * y_next) / (1.0 - qi)

    return _hybrid_recurrence(N - 1, m, forward, backward)


def dual_poly_lattice(n, m, params: QParams, method="series"):
    if method == "series":
        return dual_poly_series(n, m, params)
    if method == "recurrence":
        n = _check_index("n", n)
        signs, logs = dual_poly_lattice_seq(n + 1, m, params)
        return LogValue(signs[n], logs[n], logs[n]).value
    raise ValueError(f"unknown method {method!r}")


def dual_recurrence_residual(n, m, params: QParams) -> Residual:
    """Residual of  mu(m) d_n = -a d_{n+1} + q**-n d_n - q**-n (1 - q**n) d_{n-1}
    with series values of d."""
    n = _check_index("n", n)
    q, a = params.q, params.a
    d = lambda j: dual_poly_series(j, m, params) if j >= 0 else 0.0  # noqa: E731
    qn = _qpow_neg(q, n)
    dn = d(n)
    t = (mu(m, params) * dn, a * d(n + 1), -qn * dn, (qn - 1.0) * d(n - 1))
    return Residual(math.fsum(t), max(abs(x) for x in t))


def dual_function_F_log(n, m, params: QParams) -> LogValue:
    """F_n(q**-m) = 2-phi-1(q**-m, -a q**m; 0; q, q**(n+1)) in log form.

    Equal to K_m(q**n); evaluated through the same well-conditioned route.
    """
    return alt_q_charlier_lattice_log(m, n, params)


def dual_function_F(n, m, params: QParams):
    """F_n(x) on x = q**-m; ``m`` is the lattice index of x."""
    if int(m) != m or m < 0:
        raise NonTerminating(f"x must be q**-m for an integer m >= 0, got m={m!r}")
    return dual_function_F_log(n, int(m), params).value


def duality_residual(m, n, params: QParams) -> DualityResidual:
    """K_m(q**n) from the raw 2-phi-1 against (-a)**m q**(m*m) d_n(mu(m))."""
    m = _check_index("m", m)
    n = _check_index("n", n)
    signs, logs = _charlier_terms(m, params.q**n, params)
    lhs = signed_log_sum(signs, logs).value
    rhs = (_duality_prefactor_log(m, params) * dual_poly_series_log(n, m, params)).value
    return DualityResidual(lhs - rhs, rhs, math.exp(max(logs)))


def dual_poly_qinv(n, m, params: QParams):
    """3-phi-2(q**-m, -a q**m, q**-n; 0, 0; q, q)."""
    n = _check_index("n", n)
    m = _check_index("m", m)
    q, a = params.q, params.a
    return terminating_series(
        (_qpow_neg(q, m), -a * q**m, _qpow_neg(q, n)), (0.0, 0.0), q, q, min(n, m)
    ).value


def dual_poly_inverted_base(n, m, params: QParams):
    """The dual 3-phi-0 with base 1/q and parameter 1/a.

    Termwise this equals ``dual_poly_qinv``: substituting q -> 1/q alone sends
    -a q**m to -q**m / a, so the parameter must be inverted as well.
    """
    n = _check_index("n", n)
    m = _check_index("m", m)
    return _dual_series_log(n, m, 1.0 / params.q, 1.0 / params.a).value
