"""q-calculus kernel: q-Pochhammer symbols, the q-exponential and
terminating basic hypergeometric series.

Terminating series are summed from log-scaled terms with exact (fsum)
accumulation, so that series whose individual terms overflow binary64 can
still be evaluated when their sum is representable.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .exceptions import InvalidParameters, NonTerminating, RangeOverflow

__all__ = [
    "QParams",
    "SeriesValue",
    "LogValue",
    "q_pochhammer",
    "q_pochhammer_log",
    "q_pochhammer_inf",
    "q_exponential_Eq",
    "signed_log_sum",
    "series_terms",
    "terminating_series",
    "phi21_zero_c",
    "phi30",
    "phi32_zero_params",
]

LOG_MAX = math.log(1.7976931348623157e308)
TERMINATION_RTOL = 1e-12


@dataclass(frozen=True)
class QParams:
    """The base ``q`` and family parameter ``a`` shared by every routine."""

    q: float
    a: float

    def __post_init__(self):
        q, a = float(self.q), float(self.a)
        if not (math.isfinite(q) and 0.0 < q < 1.0):
            raise InvalidParameters("q must satisfy 0<q<1")
        if not (math.isfinite(a) and a > 0.0):
            raise InvalidParameters("a must be a finite positive number")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "a", a)


@dataclass(frozen=True)
class SeriesValue:
    """Value of a truncated infinite sum or product.

    ``tail_bound`` is an absolute bound on the truncation error; it is 0 for
    sums that terminate exactly.
    """

    value: float
    terms_used: int
    tail_bound: float


class LogValue(NamedTuple):
    """A real number stored as ``sign * exp(log_abs)``.

    For sums, ``log_scale`` is the log of the sum of absolute values of the
    summands, so ``exp(log_scale - log_abs)`` is the summation condition
    number. For products it equals ``log_abs``.
    """

    sign: float
    log_abs: float
    log_scale: float

    @property
    def value(self) -> float:
        if self.sign == 0:
            return 0.0
        if self.log_abs > LOG_MAX:
            raise RangeOverflow(f"|value| = exp({self.log_abs:.1f}) overflows binary64")
        return self.sign * math.exp(self.log_abs)

    @property
    def scale(self) -> float:
        """Sum of absolute values of the summands (may be ``inf``)."""
        if self.log_scale > LOG_MAX:
            return math.inf
        return math.exp(self.log_scale)

    @property
    def condition(self) -> float:
        if self.sign == 0:
            return math.inf
        return math.exp(self.log_scale - self.log_abs)

    def __mul__(self, other):
        if not isinstance(other, LogValue):
            return NotImplemented
        return LogValue(
            self.sign * other.sign,
            self.log_abs + other.log_abs,
            self.log_scale + other.log_scale,
        )


def _log_factor(f):
    if f == 0.0:
        return 0.0, -math.inf
    return math.copysign(1.0, f), math.log(abs(f))


def q_pochhammer(x, q, n):
    """(x; q)_n, the product of (1 - x q**k) for k < n."""
    if n < 0:
        raise InvalidParameters("n must be nonnegative")
    p = 1.0
    for k in range(n):
        p *= 1.0 - x * q**k
    return p


def q_pochhammer_log(x, q, n) -> LogValue:
    """(x; q)_n in sign/log-magnitude form; never overflows."""
    if n < 0:
        raise InvalidParameters("n must be nonnegative")
    sign, log_abs = 1.0, 0.0
    for k in range(n):
        s, l = _log_factor(1.0 - x * q**k)
        if s == 0:
            return LogValue(0.0, -math.inf, -math.inf)
        sign *= s
        log_abs += l
    return LogValue(sign, log_abs, log_abs)


def q_pochhammer_inf(x, q, tol=1e-16) -> SeriesValue:
    """(x; q)_inf, truncated once |x q**k| < tol * (1 - q).

    With r = |x q**k| at the first omitted factor, the omitted product lies
    within a relative factor exp(r / ((1 - q)(1 - r))) of 1.
    """
    if not tol > 0:
        raise InvalidParameters("tol must be positive")
    if not 0.0 < q < 1.0:
        raise InvalidParameters("q must satisfy 0<q<1")
    p = 1.0
    k = 0
    while True:
        r = abs(x * q**k)
        if r < tol * (1.0 - q):
            break
        f = 1.0 - x * q**k
        if f == 0.0:
            return SeriesValue(0.0, k + 1, 0.0)
        p *= f
        k += 1
    bound = r / ((1.0 - q) * (1.0 - r))
    return SeriesValue(p, k, abs(p) * math.expm1(bound))


def q_exponential_Eq(z, q, tol=1e-16) -> SeriesValue:
    """E_q(z) = sum_n z**n q**(n(n+1)/2) / (q; q)_n, which equals (-z q; q)_inf."""
    if not tol > 0:
        raise InvalidParameters("tol must be positive")
    if not 0.0 < q < 1.0:
        raise InvalidParameters("q must satisfy 0<q<1")
    terms = [1.0]
    t = 1.0
    n = 0
    while True:
        ratio = z * q ** (n + 1) / (1.0 - q ** (n + 1))
        t_next = t * ratio
        # ratios shrink monotonically, so once below 1/2 the tail is geometric
        if abs(ratio) < 0.5 and abs(t_next) <= tol * abs(math.fsum(terms)):
            r_next = abs(z) * q ** (n + 2) / (1.0 - q ** (n + 2))
            tail = abs(t_next) / (1.0 - r_next)
            return SeriesValue(math.fsum(terms), len(terms), tail)
        t = t_next
        terms.append(t)
        n += 1
        if t == 0.0:
            return SeriesValue(math.fsum(terms), len(terms), 0.0)


def signed_log_sum(signs: Sequence[float], logs: Sequence[float]) -> LogValue:
    """Sum of ``sign_k * exp(log_k)`` with exact accumulation of scaled terms."""
    live = [(s, l) for s, l in zip(signs, logs) if s != 0]
    if not live:
        return LogValue(0.0, -math.inf, -math.inf)
    top = max(l for _, l in live)
    total = math.fsum(s * math.exp(l - top) for s, l in live)
    scale = math.fsum(math.exp(l - top) for _, l in live)
    log_scale = top + math.log(scale)
    if total == 0.0:
        return LogValue(0.0, -math.inf, log_scale)
    return LogValue(math.copysign(1.0, total), top + math.log(abs(total)), log_scale)


def _check_terminates(upper, q, n):
    for u in upper:
        if abs(u * q**n - 1.0) <= TERMINATION_RTOL * (1.0 + abs(u)):
            return
    raise NonTerminating(
        f"no upper parameter equals q**-{n} (q={q!r}, upper={list(upper)!r})"
    )


def series_terms(upper, lower, q, z, n_terminate):
    """Signs and log-magnitudes of the terms k = 0..n_terminate of an r-phi-s.

    ``lower`` may contain zeros, which contribute (0; q)_k = 1 but still
    count toward s in the convention factor ((-1)**k q**(k(k-1)/2))**(1+s-r).
    """
    if n_terminate < 0:
        raise InvalidParameters("n_terminate must be nonnegative")
    if q <= 0.0 or q == 1.0:
        raise InvalidParameters("base must be positive and different from 1")
    _check_terminates(upper, q, n_terminate)
    expo = 1 + len(lower) - len(upper)
    lower = [b for b in lower if b != 0.0]
    zs, zl = _log_factor(z)
    log_q = math.log(q)
    signs = [1.0]
    logs = [0.0]
    sign, log_t = 1.0, 0.0
    for k in range(n_terminate):
        if zs == 0:
            break
        qk = q**k
        for u in upper:
            s, l = _log_factor(1.0 - u * qk)
            sign *= s
            log_t += l
        for b in lower:
            s, l = _log_factor(1.0 - b * qk)
            sign *= s
            log_t -= l
        s, l = _log_factor(1.0 - q ** (k + 1))
        sign *= s * zs
        log_t += zl - l + expo * k * log_q
        if expo % 2:
            sign = -sign
        if sign == 0:
            break
        signs.append(sign)
        logs.append(log_t)
    return signs, logs


def terminating_series(upper, lower, q, z, n_terminate) -> LogValue:
    """Terminating r-phi-s summed to ``n_terminate`` inclusive, in log form."""
    return signed_log_sum(*series_terms(upper, lower, q, z, n_terminate))


def phi21_zero_c(alpha, beta, q, z, n_terminate):
    """2-phi-1(alpha, beta; 0; q, z) with alpha = q**-n_terminate."""
    if abs(alpha * q**n_terminate - 1.0) > TERMINATION_RTOL * (1.0 + abs(alpha)):
        raise NonTerminating(f"alpha={alpha!r} is not q**-{n_terminate}")
    return terminating_series((alpha, beta), (0.0,), q, z, n_terminate).value


def phi30(alpha, beta, gamma, q, z, n_terminate):
    """3-phi-0(alpha, beta, gamma; -; q, z); each term carries q**(-k(k-1))."""
    return terminating_series((alpha, beta, gamma), (), q, z, n_terminate).value


def phi32_zero_params(alpha, beta, gamma, q, z, n_terminate):
    """3-phi-2(alpha, beta, gamma; 0, 0; q, z)."""
    return terminating_series((alpha, beta, gamma), (0.0, 0.0), q, z, n_terminate).value
