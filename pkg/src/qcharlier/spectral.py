"""Tridiagonal eigensolver and the spectral / orthogonality checks."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import NamedTuple

import numpy as np

from .exceptions import ConvergenceFailure, InvalidParameters, MatchAmbiguity
from .jacobi import TridiagonalSymmetric, build_truncated_I1, duality_matrix
from .polynomials import alt_q_charlier_lattice_log, dual_function_F_log, dual_poly_series_log
from .qcore import QParams, q_pochhammer_inf, q_pochhammer_log

__all__ = [
    "MatchedEigenvalue",
    "SpectrumReport",
    "VerificationReport",
    "SumCheck",
    "eigen_sym_tridiag",
    "spectrum_report",
    "eigvec_vs_beta",
    "orthogonality_primal",
    "orthogonality_dual",
    "orthogonality_F",
    "F_dual_termwise_defect",
    "row_col_orthogonality",
]

EPS = np.finfo(float).eps
MAX_SWEEPS = 30
SUM_CUTOFF = 1e-16
MAX_TERMS = 2000


def eigen_sym_tridiag(T: TridiagonalSymmetric, want_vectors=False):
    """Eigenvalues (descending) and optionally orthonormal eigenvectors (as
    columns) of a symmetric tridiagonal matrix by implicit-shift QL.

    The matrix is reversed before iterating so that its large entries sit in
    the lower right, which is where QL converges first and keeps the small
    eigenvalues accurate for graded matrices such as I_1.
    """
    n = T.N
    d = T.diag[::-1].copy()
    e = np.zeros(n)
    e[: n - 1] = T.offdiag[::-1]
    Z = np.eye(n) if want_vectors else None  # rows hold eigenvector components

    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                if abs(e[m]) <= EPS * (abs(d[m]) + abs(d[m + 1])):
                    break
                m += 1
            if m == l:
                break
            if it == MAX_SWEEPS:
                raise ConvergenceFailure(n - 1 - l, it)
            it += 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            i = m - 1
            deflated = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    deflated = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                if Z is not None:
                    zi, zi1 = Z[i].copy(), Z[i + 1].copy()
                    Z[i + 1] = s * zi + c * zi1
                    Z[i] = c * zi - s * zi1
                i -= 1
            if deflated:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0

    order = np.argsort(-d, kind="stable")
    vals = d[order]
    if Z is None:
        return vals, None
    vecs = Z[order].T[::-1].copy()
    return vals, vecs


class MatchedEigenvalue(NamedTuple):
    k: int
    eigenvalue: float
    target: float
    deviation: float


@dataclass(frozen=True)
class SpectrumReport:
    N: int
    q: float
    a: float
    eigenvalues: np.ndarray
    matched: list
    unmatched_mass: float
    threshold: float
    match_tol: float

    @property
    def max_deviation(self) -> float:
        return max((abs(m.deviation) for m in self.matched), default=math.inf)

    def deviation(self, k) -> float:
        for m in self.matched:
            if m.k == k:
                return abs(m.deviation)
        raise KeyError(k)

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "params": {"q": self.q, "a": self.a},
            "match_tol": self.match_tol,
            "threshold": self.threshold,
            "matched": [m._asdict() for m in self.matched],
            "unmatched_mass": self.unmatched_mass,
            "eigenvalues": [float(x) for x in self.eigenvalues],
        }

    @classmethod
    def from_dict(cls, d) -> "SpectrumReport":
        return cls(
            N=d["N"],
            q=d["params"]["q"],
            a=d["params"]["a"],
            eigenvalues=np.array(d["eigenvalues"]),
            matched=[MatchedEigenvalue(**m) for m in d["matched"]],
            unmatched_mass=d["unmatched_mass"],
            threshold=d["threshold"],
            match_tol=d["match_tol"],
        )

    def __eq__(self, other):
        if not isinstance(other, SpectrumReport):
            return NotImplemented
        return self.to_dict() == other.to_dict()


def spectrum_report(N, params: QParams, k_top=10, match_tol=1e-6) -> SpectrumReport:
    """Match the k_top largest eigenvalues of the N-truncation to 1, q, q**2, ...

    Matching is greedy in descending order.  Eigenvalues above
    10 q**k_top that are not matched contribute to ``unmatched_mass``.
    """
    if k_top < 1 or k_top > N // 4:
        raise InvalidParameters(f"k_top must lie in [1, N/4], got k_top={k_top}, N={N}")
    vals, _ = eigen_sym_tridiag(build_truncated_I1(N, params))
    q = params.q
    targets = q ** np.arange(k_top)
    claimed = {}
    matched = []
    for i in range(k_top):
        ev = vals[i]
        j = int(np.argmin(np.abs(targets - ev)))
        dev = ev - targets[j]
        if abs(dev) > match_tol:
            continue
        if j in claimed:
            raise MatchAmbiguity(
                f"eigenvalues {claimed[j]!r} and {ev!r} both lie within {match_tol} of q**{j}"
            )
        claimed[j] = ev
        matched.append(MatchedEigenvalue(j, float(ev), float(targets[j]), float(dev)))
    threshold = 10 * q**k_top
    matched_vals = set(claimed.values())
    unmatched = math.fsum(abs(v) for v in vals if v > threshold and v not in matched_vals)
    return SpectrumReport(
        N, params.q, params.a, vals, sorted(matched), unmatched, threshold, match_tol
    )


def _align_sign(v):
    idx = np.flatnonzero(np.abs(v) > 1e-13)
    if len(idx) and v[idx[0]] < 0:
        return -v
    return v


def eigvec_vs_beta(N, k, params: QParams) -> float:
    """Max componentwise difference between the eigenvector for the k-th
    largest eigenvalue and column k of the orthogonal matrix."""
    T = build_truncated_I1(N, params)
    _, vecs = eigen_sym_tridiag(T, want_vectors=True)
    col = duality_matrix(N, k + 1, params, method="series").entries[:, k]
    return float(np.max(np.abs(_align_sign(vecs[:, k]) - _align_sign(col))))


@dataclass(frozen=True)
class VerificationReport:
    identity: str
    grid: list
    max_relative_residual: float
    tolerance: float
    details: dict = field(default_factory=dict)
    passed: bool = field(init=False)

    def __post_init__(self):
        r = self.max_relative_residual
        object.__setattr__(self, "passed", bool(r == r and r <= self.tolerance))

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d) -> "VerificationReport":
        report = cls(
            d["identity"],
            [dict(g) for g in d["grid"]],
            d["max_relative_residual"],
            d["tolerance"],
            dict(d.get("details", {})),
        )
        if "passed" in d and d["passed"] != report.passed:
            raise ValueError("stored pass flag disagrees with residual and tolerance")
        return report


# --- orthogonality sums ------------------------------------------------------


class SumCheck(NamedTuple):
    """Truncated weighted sum ``lhs``, its closed form ``rhs`` and the
    diagonal scale sqrt(h_i h_j) used for off-diagonal pairs."""

    lhs: float
    rhs: float
    scale: float
    terms: int

    @property
    def defect(self) -> float:
        return abs(self.lhs - self.rhs) / self.scale


def _weighted_sum(weight_log, f1, f2, peak, terms):
    """Accumulate w_j f1(j) f2(j).  With ``terms=None`` stop once the
    summand bound w_j max(f1**2, f2**2) falls below SUM_CUTOFF times the
    running diagonal scale, after index ``peak``."""
    signs, logs, bounds = [], [], []
    diag1 = diag2 = 0.0
    j = 0
    limit = MAX_TERMS if terms is None else terms
    while j < limit:
        w = weight_log(j)
        g1, g2 = f1(j), f2(j)
        signs.append(g1.sign * g2.sign)
        logs.append(w + g1.log_abs + g2.log_abs)
        b1, b2 = w + 2 * g1.log_abs, w + 2 * g2.log_abs
        diag1 += math.exp(b1) if g1.sign else 0.0
        diag2 += math.exp(b2) if g2.sign else 0.0
        j += 1
        if terms is None and j > peak:
            bound = math.exp(max(b1, b2))
            if bound < SUM_CUTOFF * math.sqrt(diag1 * diag2):
                break
    vals = [s * math.exp(l) for s, l in zip(signs, logs)]
    return math.fsum(vals), np.array(vals), j


def _primal_weight_log(params):
    q, a = params.q, params.a
    return lambda n: n * math.log(a) + n * (n + 1) / 2 * math.log(q) - q_pochhammer_log(q, q, n).log_abs


def _primal_norm(m, params):
    q, a = params.q, params.a
    return (
        q_pochhammer_inf(-a * q**m, q).value
        * a**m
        * math.exp(q_pochhammer_log(q, q, m).log_abs + m * (m + 1) / 2 * math.log(q))
        / (1 + a * q ** (2 * m))
    )


def _dual_norm(n, params):
    q, a = params.q, params.a
    return math.exp(q_pochhammer_log(q, q, n).log_abs - n * math.log(a) - n * (n + 1) / 2 * math.log(q))


def _dual_weight_log(params, form):
    q, a = params.q, params.a
    cache = {}

    def w(m):
        if m not in cache:
            base = (
                math.log1p(a * q ** (2 * m))
                - math.log(q_pochhammer_inf(-a * q**m, q).value)
                - q_pochhammer_log(q, q, m).log_abs
            )
            if form == "d":
                cache[m] = base + m * math.log(a) + m * (3 * m - 1) / 2 * math.log(q)
            else:
                cache[m] = base - m * math.log(a) - m * (m + 1) / 2 * math.log(q)
        return cache[m]

    return w


def orthogonality_primal(m, m2, params: QParams, terms=None) -> SumCheck:
    """sum_n a**n q**(n(n+1)/2) / (q;q)_n K_m(q**n) K_m2(q**n) against
    (-a q**m; q)_inf a**m (q;q)_m q**(m(m+1)/2) / (1 + a q**2m) delta."""
    f1 = lambda n: alt_q_charlier_lattice_log(m, n, params)  # noqa: E731
    f2 = lambda n: alt_q_charlier_lattice_log(m2, n, params)  # noqa: E731
    lhs, _, used = _weighted_sum(_primal_weight_log(params), f1, f2, max(m, m2), terms)
    h1, h2 = _primal_norm(m, params), _primal_norm(m2, params)
    return SumCheck(lhs, h1 if m == m2 else 0.0, math.sqrt(h1 * h2), used)


def _dual_sum(n, n2, params, terms, form):
    if form == "d":
        f = lambda k: lambda m: dual_poly_series_log(k, m, params)  # noqa: E731
    else:
        f = lambda k: lambda m: dual_function_F_log(k, m, params)  # noqa: E731
    # summands peak near m ~ 2 max(n, n2) / 3 for the q**(3m^2/2) weight
    return _weighted_sum(_dual_weight_log(params, form), f(n), f(n2), max(n, n2) + 1, terms)


def orthogonality_dual(n, n2, params: QParams, terms=None) -> SumCheck:
    """sum_m (1 + a q**2m) a**m q**(m(3m-1)/2) / ((-a q**m;q)_inf (q;q)_m)
    d_n(mu(m)) d_n2(mu(m)) against (q;q)_n / (a**n q**(n(n+1)/2)) delta."""
    lhs, _, used = _dual_sum(n, n2, params, terms, "d")
    h1, h2 = _dual_norm(n, params), _dual_norm(n2, params)
    return SumCheck(lhs, h1 if n == n2 else 0.0, math.sqrt(h1 * h2), used)


def orthogonality_F(n, n2, params: QParams, terms=None) -> SumCheck:
    """The same sum written with F_n(q**-m) and weight
    (1 + a q**2m) / (a**m (-a q**m;q)_inf (q;q)_m q**(m(m+1)/2))."""
    lhs, _, used = _dual_sum(n, n2, params, terms, "F")
    h1, h2 = _dual_norm(n, params), _dual_norm(n2, params)
    return SumCheck(lhs, h1 if n == n2 else 0.0, math.sqrt(h1 * h2), used)


def F_dual_termwise_defect(n, n2, params: QParams, terms=None) -> float:
    """Largest relative difference between matching summands of the F-form
    and d-form dual orthogonality sums."""
    _, sd, used = _dual_sum(n, n2, params, terms, "d")
    _, sf, _ = _dual_sum(n, n2, params, used, "F")
    nz = np.maximum(np.abs(sd), np.abs(sf))
    mask = nz > 0
    return float(np.max(np.abs(sd - sf)[mask] / nz[mask]))


def row_col_orthogonality(M, N, params: QParams, lead=10, tolerance=1e-8,
                          method="recurrence") -> VerificationReport:
    """Gram defects of the leading ``lead`` rows and columns of the M x N block."""
    A = duality_matrix(M, N, params, method=method).entries
    rows = A[:lead, :]
    cols = A[:, :lead]
    I = np.eye(lead)
    row_def = float(np.max(np.abs(rows @ rows.T - I)))
    col_def = float(np.max(np.abs(cols.T @ cols - I)))
    col0 = math.fsum(A[:, 0] ** 2)
    return VerificationReport(
        "eq9",
        [{"q": params.q, "a": params.a, "M": M, "N": N, "lead": lead}],
        max(row_def, col_def),
        tolerance,
        {"row_defect": row_def, "col_defect": col_def, "col0_norm_defect": abs(col0 - 1.0)},
    )
