"""Identity checks over (q, a) grids, each producing a VerificationReport.

Every check takes a list of QParams and returns one report whose
``max_relative_residual`` is the worst case over the whole grid.
"""
from __future__ import annotations

import math

from .jacobi import duality_matrix, normalization_c, xi_norm_squared
from .polynomials import (
    dual_poly_inverted_base,
    dual_poly_qinv,
    dual_recurrence_residual,
    duality_residual,
    qdiff_residual_lattice,
)
from .qcore import QParams, q_exponential_Eq, q_pochhammer_inf
from .spectral import (
    F_dual_termwise_defect,
    VerificationReport,
    orthogonality_dual,
    orthogonality_F,
    orthogonality_primal,
    row_col_orthogonality,
)

__all__ = ["IDENTITIES", "DEFAULT_TOLERANCES", "STANDARD_GRID", "run_identity"]

IDENTITIES = ("eq4", "eq9", "eq10", "eq12", "eq13", "eq15", "eq17", "eq18", "eq6norm", "qexp")

DEFAULT_TOLERANCES = {
    "eq4": 1e-9,
    "eq9": 1e-8,
    "eq10": 1e-8,
    "eq12": 1e-8,
    "eq13": 1e-9,
    "eq15": 1e-8,
    "eq17": 1e-9,
    "eq18": 1e-9,
    "eq6norm": 1e-10,
    "qexp": 1e-12,
    "termwise": 1e-10,
    "spectrum": 1e-7,
}

STANDARD_GRID = [(q, a) for q in (0.3, 0.5, 0.7) for a in (0.3, 1.0, 2.5)]


def _pairs(m, m2, limit):
    if m is not None and m2 is not None:
        return [(m, m2)]
    return [(i, j) for i in range(limit + 1) for j in range(limit + 1)]


def _grid_entry(p, **extra):
    return {"q": p.q, "a": p.a, **extra}


def _eq4(p, opts):
    n_max = opts["max_mn"]
    worst = max(
        qdiff_residual_lattice(n, k, p).relative
        for n in range(n_max + 1)
        for k in range(n_max + 1)
    )
    return worst, _grid_entry(p, max_n=n_max, max_k=n_max), {}


def _eq9(p, opts):
    N, lead = opts["N"], opts["lead"]
    r = row_col_orthogonality(N, N, p, lead=lead)
    return r.max_relative_residual, _grid_entry(p, M=N, N=N, lead=lead), r.details


def _sum_check(fn):
    def run(p, opts):
        pairs = _pairs(opts["m"], opts["m2"], opts["lead"])
        worst = 0.0
        terms = 0
        for i, j in pairs:
            s = fn(i, j, p)
            worst = max(worst, s.defect)
            terms = max(terms, s.terms)
        details = {"max_terms": terms}
        if len(pairs) == 1:
            details.update(lhs=s.lhs, rhs=s.rhs)
        return worst, _grid_entry(p, pairs=len(pairs), max_index=max(max(ij) for ij in pairs)), details

    return run


def _eq12(p, opts):
    worst, grid, details = _sum_check(orthogonality_F)(p, opts)
    pairs = _pairs(opts["m"], opts["m2"], opts["lead"])
    details["termwise_defect"] = max(F_dual_termwise_defect(i, j, p) for i, j in pairs)
    return worst, grid, details


def _eq13(p, opts):
    n_max = opts["max_mn"]
    worst = max(
        duality_residual(m, n, p).relative for m in range(n_max + 1) for n in range(n_max + 1)
    )
    return worst, _grid_entry(p, max_mn=n_max), {}


def _eq17(p, opts):
    n_max = opts["max_mn"]
    worst = max(
        dual_recurrence_residual(n, m, p).relative
        for n in range(n_max + 1)
        for m in range(n_max + 1)
    )
    return worst, _grid_entry(p, max_mn=n_max), {}


def _eq18(p, opts):
    n_max = min(opts["max_mn"], 8)
    worst = 0.0
    for n in range(n_max + 1):
        for m in range(n_max + 1):
            x, y = dual_poly_qinv(n, m, p), dual_poly_inverted_base(n, m, p)
            worst = max(worst, abs(x - y) / max(abs(x), abs(y)))
    return worst, _grid_entry(p, max_mn=n_max), {}


def _eq6norm(p, opts):
    N = opts["N"]
    prod = q_pochhammer_inf(-p.a * p.q, p.q).value
    xi = xi_norm_squared(0, p, terms=N)
    col0 = math.fsum(duality_matrix(N, 1, p).entries[:, 0] ** 2)
    xi_def = abs(xi - prod) / prod
    col_def = abs(col0 - 1.0)
    details = {"xi_norm_squared": xi, "product": prod, "c": normalization_c(p),
               "xi_defect": xi_def, "col0_norm_defect": col_def}
    return max(xi_def, col_def), _grid_entry(p, N=N), details


def _qexp(p, opts):
    e = q_exponential_Eq(p.a, p.q)
    prod = q_pochhammer_inf(-p.a * p.q, p.q)
    bound = e.tail_bound + prod.tail_bound
    rel = max(abs(e.value - prod.value) - bound, 0.0) / abs(prod.value)
    return rel, _grid_entry(p, z=p.a), {"series": e.value, "product": prod.value}


_CHECKS = {
    "eq4": _eq4,
    "eq9": _eq9,
    "eq10": _sum_check(orthogonality_primal),
    "eq12": _eq12,
    "eq13": _eq13,
    "eq15": _sum_check(orthogonality_dual),
    "eq17": _eq17,
    "eq18": _eq18,
    "eq6norm": _eq6norm,
    "qexp": _qexp,
}


def run_identity(identity, grid, tolerance=None, N=80, max_mn=12, lead=10, m=None, m2=None,
                 termwise_tolerance=None):
    """Run one named identity over ``grid`` (a sequence of QParams).

    For ``eq12`` the report details also carry the termwise comparison with
    the d_n form and whether it met ``termwise_tolerance``.
    """
    if identity not in _CHECKS:
        raise ValueError(f"unknown identity {identity!r}")
    tol = DEFAULT_TOLERANCES[identity] if tolerance is None else tolerance
    opts = {"N": N, "max_mn": max_mn, "lead": lead, "m": m, "m2": m2}
    worst = 0.0
    entries = []
    details = {}
    for p in grid:
        if not isinstance(p, QParams):
            p = QParams(*p)
        r, entry, d = _CHECKS[identity](p, opts)
        entry["residual"] = r
        entry.update(d)
        entries.append(entry)
        worst = max(worst, r) if r == r else math.nan
    if identity == "eq12":
        tw_tol = DEFAULT_TOLERANCES["termwise"] if termwise_tolerance is None else termwise_tolerance
        tw = max(e["termwise_defect"] for e in entries)
        details.update(termwise_defect=tw, termwise_tolerance=tw_tol, termwise_passed=bool(tw <= tw_tol))
    return VerificationReport(identity, entries, worst, tol, details)
