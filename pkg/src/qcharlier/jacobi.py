"""The Jacobi operator I_1, its eigenvector coefficients and the orthogonal
matrix linking the basis |n> to the normalised eigenbasis."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import InvalidParameters, RangeOverflow, TailTooLarge
from .polynomials import (
    alt_q_charlier_lattice_log,
    alt_q_charlier_lattice_seq,
    alt_q_charlier_series,
    dual_function_F_log,
)
from .qcore import LOG_MAX, QParams, SeriesValue, q_pochhammer_inf, q_pochhammer_log

__all__ = [
    "TridiagonalSymmetric",
    "DualityMatrix",
    "jacobi_coeffs",
    "build_truncated_I1",
    "trace_class_check",
    "beta_prefactor_log",
    "beta_coeff",
    "beta_vector",
    "xi_norm_squared",
    "normalization_c",
    "normalization_c_n",
    "duality_matrix",
]


@dataclass(frozen=True)
class TridiagonalSymmetric:
    """Symmetric tridiagonal matrix: ``diag`` has N entries, ``offdiag`` N-1."""

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        d = np.array(self.diag, dtype=float)
        e = np.array(self.offdiag, dtype=float)
        if d.ndim != 1 or e.ndim != 1 or len(e) != len(d) - 1:
            raise InvalidParameters("offdiag must have exactly one entry fewer than diag")
        if not (np.all(np.isfinite(d)) and np.all(np.isfinite(e))):
            raise InvalidParameters("matrix entries must be finite")
        if np.any(e == 0.0):
            raise InvalidParameters("offdiag entries must be nonzero")
        d.setflags(write=False)
        e.setflags(write=False)
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "offdiag", e)

    @property
    def N(self) -> int:
        return len(self.diag)

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)

    def matvec(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        out = self.diag * v
        out[:-1] += self.offdiag * v[1:]
        out[1:] += self.offdiag * v[:-1]
        return out

    def norm_inf(self) -> float:
        row = np.abs(self.diag).copy()
        row[:-1] += np.abs(self.offdiag)
        row[1:] += np.abs(self.offdiag)
        return float(row.max())


@dataclass(frozen=True)
class DualityMatrix:
    """Leading M x N block of the orthogonal matrix (rows m, columns n)."""

    entries: np.ndarray
    params: QParams
    c: float
    method: str = field(default="recurrence")

    @property
    def shape(self):
        return self.entries.shape


def jacobi_coeffs(n, params: QParams):
    """Off-diagonal a_n (negative) and diagonal b_n of I_1."""
    if n < 0:
        raise InvalidParameters("n must be nonnegative")
    q, a = params.q, params.a
    an = -math.sqrt(a * q ** (3 * n + 1)) * math.sqrt((1 - q ** (n + 1)) * (1 + a * q**n)) / (
        (1 + a * q ** (2 * n + 1)) * math.sqrt((1 + a * q ** (2 * n)) * (1 + a * q ** (2 * n + 2)))
    )
    bn = q**n * (
        (1 + a * q**n) / ((1 + a * q ** (2 * n)) * (1 + a * q ** (2 * n + 1)))
        + a * q ** (n - 1) * (1 - q**n) / ((1 + a * q ** (2 * n - 1)) * (1 + a * q ** (2 * n)))
    )
    return an, bn


def build_truncated_I1(N, params: QParams) -> TridiagonalSymmetric:
    """Leading N x N block of I_1."""
    if N < 2:
        raise InvalidParameters("truncation order N must be at least 2")
    coeffs = [jacobi_coeffs(n, params) for n in range(N)]
    return TridiagonalSymmetric(
        np.array([b for _, b in coeffs]), np.array([a for a, _ in coeffs[:-1]])
    )


def trace_class_check(N, params: QParams, tol=1e-12) -> SeriesValue:
    """Partial sum of 2|a_n| + b_n over n < N with a geometric tail estimate.

    The tail uses ratios max(q**1.5, |a_N / a_{N-1}|) and max(q, b_N / b_{N-1});
    raises TailTooLarge when the estimate is not below ``tol``.
    """
    if N < 2:
        raise InvalidParameters("N must be at least 2")
    q = params.q
    coeffs = [jacobi_coeffs(n, params) for n in range(N + 1)]
    total = math.fsum(2 * abs(a) + b for a, b in coeffs[:N])
    (a1, b1), (a2, b2) = coeffs[N - 1], coeffs[N]
    ra = max(q**1.5, abs(a2 / a1))
    rb = max(q, b2 / b1)
    tail = 2 * abs(a2) / (1 - ra) + b2 / (1 - rb)
    if not tail < tol:
        raise TailTooLarge(f"tail estimate {tail:.3e} >= tol {tol:.3e} at N={N}")
    return SeriesValue(total, N, tail)


def beta_prefactor_log(n, params: QParams) -> float:
    """log of [(-a;q)_n (1 + a q**2n) / ((q;q)_n (1 + a) a**n)]**(1/2) q**(-n(n+1)/4)."""
    q, a = params.q, params.a
    num = q_pochhammer_log(-a, q, n).log_abs + math.log1p(a * q ** (2 * n))
    den = q_pochhammer_log(q, q, n).log_abs + math.log1p(a) + n * math.log(a)
    return 0.5 * (num - den) - n * (n + 1) / 4 * math.log(q)


def beta_coeff(n, lam, params: QParams):
    """Eigenvector coefficient beta_n(lam) for any real lam (2-phi-1 route)."""
    k = alt_q_charlier_series(n, lam, params)
    if k == 0.0:
        return 0.0
    log_v = beta_prefactor_log(n, params) + math.log(abs(k))
    if log_v > LOG_MAX:
        raise RangeOverflow(f"beta_{n}({lam!r}) overflows")
    return math.copysign(math.exp(log_v), k)


def beta_vector(N, k, params: QParams) -> np.ndarray:
    """(beta_n(q**k))_{n<N}, the coefficients of the unnormalised eigenvector."""
    vals = [alt_q_charlier_lattice_log(n, k, params) for n in range(N)]
    signs = np.array([v.sign for v in vals])
    logs = np.array([v.log_abs for v in vals])
    pre = np.array([beta_prefactor_log(n, params) for n in range(N)])
    total = logs + pre
    if np.any(total > LOG_MAX):
        raise RangeOverflow("eigenvector coefficient overflows")
    return signs * np.exp(total)


def xi_norm_squared(k, params: QParams, terms=200) -> float:
    """Truncated sum of beta_n(q**k)**2 over n < terms."""
    return math.fsum(beta_vector(terms, k, params) ** 2)


def normalization_c(params: QParams) -> float:
    """c = (-a q; q)_inf ** (-1/2)."""
    return q_pochhammer_inf(-params.a * params.q, params.q).value ** -0.5


def _log_cn_over_c(n, params):
    q, a = params.q, params.a
    return 0.5 * (n * math.log(a) + n * (n + 1) / 2 * math.log(q) - q_pochhammer_log(q, q, n).log_abs)


def normalization_c_n(n, params: QParams) -> float:
    """c_n = c (a**n q**(n(n+1)/2) / (q;q)_n)**(1/2)."""
    if n < 0:
        raise InvalidParameters("n must be nonnegative")
    return normalization_c(params) * math.exp(_log_cn_over_c(n, params))


def duality_matrix(M, N, params: QParams, method="recurrence") -> DualityMatrix:
    """Entries a_mn = c_n beta_m(q**n) for m < M, n < N.

    ``method="recurrence"`` builds each column from the matched three-term
    recurrence for K_m(q**n); ``method="series"`` uses the dual-function
    form with weights (1 + a q**2m) / ((-a q**m; q)_inf (q;q)_m a**m q**(m(m+1)/2))
    and terminating-series values of F_n(q**-m).
    """
    if M < 1 or N < 1:
        raise InvalidParameters("M and N must be positive")
    q, a = params.q, params.a
    c = normalization_c(params)
    col_log = np.array([_log_cn_over_c(n, params) for n in range(N)])
    out = np.empty((M, N))
    if method == "recurrence":
        row_log = np.array([beta_prefactor_log(m, params) for m in range(M)]) + math.log(c)
        for n in range(N):
            signs, logs = alt_q_charlier_lattice_seq(M, n, params)
            out[:, n] = signs * np.exp(np.minimum(logs + row_log + col_log[n], LOG_MAX + 1))
    elif method == "series":
        row_log = np.empty(M)
        for m in range(M):
            tail = q_pochhammer_inf(-a * q**m, q).value
            row_log[m] = 0.5 * (
                math.log1p(a * q ** (2 * m))
                - math.log(tail)
                - q_pochhammer_log(q, q, m).log_abs
                - m * math.log(a)
                - m * (m + 1) / 2 * math.log(q)
            )
        for m in range(M):
            for n in range(N):
                F = dual_function_F_log(n, m, params)
                out[m, n] = F.sign * math.exp(min(F.log_abs + row_log[m] + col_log[n], LOG_MAX + 1))
    else:
        raise ValueError(f"unknown method {method!r}")
    if not np.all(np.isfinite(out)):
        raise RangeOverflow("duality matrix entry overflows")
    return DualityMatrix(out, params, c, method)
