"""Command-line front end: ``eval``, ``spectrum`` and ``verify``.

Exit codes: 0 success, 1 a check failed, 2 invalid input, 3 numerical
overflow, 4 eigensolver convergence failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from datetime import datetime, timezone

from .exceptions import ConvergenceFailure, InvalidParameters, MatchAmbiguity, RangeOverflow
from .polynomials import (
    alt_q_charlier_lattice,
    alt_q_charlier_recur,
    alt_q_charlier_series,
    dual_function_F,
    dual_poly_lattice,
    dual_poly_recur,
    mu,
)
from .qcore import QParams
from .spectral import spectrum_report
from .verify import DEFAULT_TOLERANCES, IDENTITIES, STANDARD_GRID, run_identity

EXIT_FAILED, EXIT_INVALID, EXIT_OVERFLOW, EXIT_CONVERGENCE = 1, 2, 3, 4

DEFAULTS = {
    "q": None,
    "a": None,
    "N": 80,
    "k_top": 10,
    "match_tol": 1e-6,
    "max_mn": 12,
    "lead": 10,
    "format": "csv",
    "output": None,
    "no_timestamp": False,
}
TOL_KEYS = {f"tol_{name}" for name in DEFAULT_TOLERANCES}
CONFIG_KEYS = set(DEFAULTS) | TOL_KEYS


class UsageError(Exception):
    pass


# --- configuration ----------------------------------------------------------


def read_config(path):
    """Flat ``key = value`` file; blank lines and ``#`` comments ignored."""
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in CONFIG_KEYS:
                raise UsageError(f"{path}:{lineno}: unknown config key {key!r}")
            values[key] = value
    return values


def _floats(text, name):
    try:
        out = [float(s) for s in str(text).split(",") if s.strip()]
    except ValueError:
        raise UsageError(f"--{name} expects a number or comma-separated list, got {text!r}")
    if not out:
        raise UsageError(f"--{name} is empty")
    return out


def _coerce(key, value):
    if value is None or not isinstance(value, str):
        return value
    if key in ("N", "k_top", "max_mn", "lead"):
        return int(value)
    if key == "match_tol" or key in TOL_KEYS:
        return float(value)
    if key == "no_timestamp":
        return value.lower() in ("1", "true", "yes", "on")
    return value


def resolve(args):
    """Merge flags over config-file values over built-in defaults."""
    cfg = read_config(args.config) if args.config else {}
    out = {}
    for key in CONFIG_KEYS:
        flag = getattr(args, key, None)
        if key == "no_timestamp" and flag is False:
            flag = None
        if flag is not None:
            value = flag
        elif key in cfg:
            value = cfg[key]
        elif key in TOL_KEYS:
            value = DEFAULT_TOLERANCES[key[4:]]
        else:
            value = DEFAULTS[key]
        try:
            out[key] = _coerce(key, value)
        except ValueError:
            raise UsageError(f"invalid value for {key}: {value!r}")
    if out["format"] not in ("csv", "json"):
        raise UsageError(f"format must be csv or json, got {out['format']!r}")
    return out


def _grid(cfg, single=False):
    qs = _floats(cfg["q"], "q") if cfg["q"] is not None else None
    as_ = _floats(cfg["a"], "a") if cfg["a"] is not None else None
    if single:
        if qs is None or as_ is None or len(qs) != 1 or len(as_) != 1:
            raise UsageError("this command needs a single --q and --a")
        return [QParams(qs[0], as_[0])]
    if qs is None:
        qs = sorted({q for q, _ in STANDARD_GRID})
    if as_ is None:
        as_ = sorted({a for _, a in STANDARD_GRID})
    return [QParams(q, a) for q in qs for a in as_]


# --- output -----------------------------------------------------------------


def _fmt(x):
    if isinstance(x, bool) or x is None:
        return str(x)
    if isinstance(x, float):
        return "nan" if x != x else format(x, ".17g")
    return str(x)


def render_csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(x) for x in row])
    return buf.getvalue()


def render_json(obj, cfg):
    if not cfg["no_timestamp"]:
        obj = {**obj, "generated_at": datetime.now(timezone.utc).isoformat(timespec="seconds")}
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def emit(text, cfg):
    if cfg["output"]:
        with open(cfg["output"], "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _echo(cfg, grid):
    return {
        "grid": [{"q": p.q, "a": p.a} for p in grid],
        "N": cfg["N"],
        "k_top": cfg["k_top"],
        "match_tol": cfg["match_tol"],
        "max_mn": cfg["max_mn"],
        "lead": cfg["lead"],
        "tolerances": {k[4:]: cfg[k] for k in sorted(TOL_KEYS)},
    }


def _rel_diff(x, y):
    if x == y:
        return 0.0
    return abs(x - y) / max(abs(x), abs(y))


def _lattice_index(lam, q):
    """k if lam == q**k to rounding, else None; lattice points get the
    well-conditioned evaluators."""
    if not lam > 0:
        return None
    k = round(math.log(lam) / math.log(q))
    if k >= 0 and abs(q**k - lam) <= 4e-16 * lam:
        return k
    return None


# --- commands ---------------------------------------------------------------


def cmd_eval(args, cfg):
    (p,) = _grid(cfg, single=True)
    if args.n is None:
        raise UsageError("eval needs --n")
    n = args.n
    if args.family == "charlier":
        if (args.lam is None) == (args.k is None):
            raise UsageError("eval charlier needs exactly one of --lambda or --k")
        k = args.k if args.lam is None else _lattice_index(args.lam, p.q)
        if k is None:
            point, series, recur = args.lam, alt_q_charlier_series(n, args.lam, p), alt_q_charlier_recur(n, args.lam, p)
        else:
            point = p.q**k
            series = alt_q_charlier_lattice(n, k, p, "series")
            recur = alt_q_charlier_lattice(n, k, p, "recurrence")
    elif args.family == "dual":
        if (args.m is None) == (args.mu is None):
            raise UsageError("eval dual needs exactly one of --m or --mu")
        if args.m is not None:
            point = mu(args.m, p)
            series = dual_poly_lattice(n, args.m, p, "series")
            recur = dual_poly_lattice(n, args.m, p, "recurrence")
        else:
            # off the lattice only the recurrence is defined
            point, series, recur = args.mu, math.nan, dual_poly_recur(n, args.mu, p)
    else:
        if args.m is None:
            raise UsageError("eval F needs --m (the point is q**-m)")
        point = p.q ** -args.m
        series = dual_function_F(n, args.m, p)
        recur = alt_q_charlier_lattice(args.m, n, p, "recurrence")
    diff = _rel_diff(series, recur) if series == series else math.nan
    row = {"family": args.family, "n": n, "q": p.q, "a": p.a, "point": point,
           "series": series, "recurrence": recur, "rel_diff": diff}
    if cfg["format"] == "json":
        emit(render_json(row, cfg), cfg)
    else:
        emit(render_csv(list(row), [list(row.values())]), cfg)
    return 0


def cmd_spectrum(args, cfg):
    tol = cfg["tol_spectrum"]
    grid = _grid(cfg)
    reports = [spectrum_report(cfg["N"], p, cfg["k_top"], cfg["match_tol"]) for p in grid]
    ok = all(
        len(r.matched) == cfg["k_top"] and r.max_deviation < tol and r.unmatched_mass < tol
        for r in reports
    )
    if cfg["format"] == "json":
        if len(reports) == 1:
            obj = {**reports[0].to_dict(), "k_top": cfg["k_top"], "tolerance": tol, "passed": ok}
        else:
            obj = {"command": "spectrum", "config": _echo(cfg, grid), "passed": ok,
                   "reports": [r.to_dict() for r in reports]}
        emit(render_json(obj, cfg), cfg)
    else:
        rows = [
            (r.q, r.a, r.N, m.k, m.eigenvalue, m.target, m.deviation)
            for r in reports
            for m in r.matched
        ]
        emit(render_csv(["q", "a", "N", "k", "eigenvalue", "target", "deviation"], rows), cfg)
    return 0 if ok else EXIT_FAILED


def cmd_verify(args, cfg):
    grid = _grid(cfg)
    names = IDENTITIES if args.identity == "all" else (args.identity,)
    reports = [
        run_identity(
            name, grid, cfg[f"tol_{name}"], N=cfg["N"], max_mn=cfg["max_mn"],
            lead=cfg["lead"], m=args.m, m2=args.m2, termwise_tolerance=cfg["tol_termwise"],
        )
        for name in names
    ]
    ok = all(r.passed and r.details.get("termwise_passed", True) for r in reports)
    if cfg["format"] == "json":
        obj = {"command": "verify", "config": _echo(cfg, grid), "passed": ok,
               "reports": [r.to_dict() for r in reports]}
        emit(render_json(obj, cfg), cfg)
    else:
        rows = [(r.identity, len(r.grid), r.max_relative_residual, r.tolerance, r.passed) for r in reports]
        emit(render_csv(["identity", "grid_points", "max_relative_residual", "tolerance", "passed"], rows), cfg)
    return 0 if ok else EXIT_FAILED


# --- parser -----------------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("common options")
    g.add_argument("--q", help="base q, or a comma-separated list")
    g.add_argument("--a", help="parameter a, or a comma-separated list")
    g.add_argument("--N", type=int, help="truncation order (default 80)")
    g.add_argument("--k-top", dest="k_top", type=int, help="eigenvalues to match (default 10)")
    g.add_argument("--match-tol", dest="match_tol", type=float, help="matching tolerance (default 1e-6)")
    g.add_argument("--max-mn", dest="max_mn", type=int, help="largest degree / lattice index (default 12)")
    g.add_argument("--lead", type=int, help="leading block size for sums (default 10)")
    g.add_argument("--format", choices=("csv", "json"))
    g.add_argument("--output", metavar="PATH")
    g.add_argument("--no-timestamp", dest="no_timestamp", action="store_true",
                   help="omit generated_at from JSON output")
    g.add_argument("--config", metavar="PATH", help="flat key = value file")
    for name in DEFAULT_TOLERANCES:
        g.add_argument(f"--tol-{name}", dest=f"tol_{name}", type=float, help=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(prog="qcharlier", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("eval", parents=[common], help="evaluate a polynomial by two paths")
    ev.add_argument("family", choices=("charlier", "dual", "F"))
    ev.add_argument("--n", type=int)
    ev.add_argument("--lambda", dest="lam", type=float)
    ev.add_argument("--k", type=int, help="lattice point lambda = q**k")
    ev.add_argument("--m", type=int, help="lattice index")
    ev.add_argument("--mu", type=float, help="arbitrary real mu (dual only)")
    ev.set_defaults(func=cmd_eval)

    sp = sub.add_parser("spectrum", parents=[common], help="match eigenvalues against q**k")
    sp.set_defaults(func=cmd_spectrum)

    ve = sub.add_parser("verify", parents=[common], help="check identities on a grid")
    ve.add_argument("identity", choices=IDENTITIES + ("all",))
    ve.add_argument("--m", type=int, help="first index of a single sum check")
    ve.add_argument("--m2", type=int, help="second index of a single sum check")
    ve.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve(args)
        return args.func(args, cfg)
    except (UsageError, InvalidParameters, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except RangeOverflow as exc:
        print(f"overflow: {exc}", file=sys.stderr)
        return EXIT_OVERFLOW
    except ConvergenceFailure as exc:
        print(f"convergence failure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except MatchAmbiguity as exc:
        print(f"ambiguous match: {exc}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
