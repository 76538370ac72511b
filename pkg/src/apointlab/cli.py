"""Command-line front end: evaluate, search, cache, and verify.

Exit codes: 0 success, 2 usage or precondition problem, 3 internal
consistency failure (a computation that cannot be trusted), 4 a
verification harness ran fine but its pass criterion failed.

Every output is byte-deterministic for a fixed config and cache state:
floats are serialized with repr (shortest round trip), point rows are
sorted by ordinate, and report files come from the verify serializers.
Caches are plain CSV, the same shape as the export format, so they can
be inspected or edited with ordinary tools.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from importlib.resources import files as resource_files
from pathlib import Path

from . import complexfn as cf
from . import verify as vf
from .apoints import (
    APoint,
    contour_window,
    count_in_rectangle,
    expected_count,
    find_apoints,
    ingest_zero_table,
)
from .dirichlet import lambda_a, lambda_sieve
from .errors import (
    ACaseOne,
    ACaseZero,
    BoundaryTooClose,
    InsufficientCoefficients,
    InsufficientPoints,
    LengthMismatch,
    NearSingularity,
    NonIntegralWinding,
    PoleAtNonpositiveInteger,
    PoleAtOddInteger,
    PoleAtOne,
    QuadratureNotConverged,
    RangeExceeded,
    RefinementDiverged,
    SampleTooCloseToAPoint,
    SeriesTooShort,
    TableError,
    TooSmallT,
    WindowCountMismatch,
    ZeroLeadingCoefficient,
)

__all__ = ["main", "build_parser"]

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INTERNAL = 3
EXIT_VERIFY = 4

_USAGE_ERRORS = (
    PoleAtOddInteger, PoleAtNonpositiveInteger, NearSingularity,
    RangeExceeded, ACaseZero, ACaseOne, ZeroLeadingCoefficient, TooSmallT,
    TableError, InsufficientPoints, SeriesTooShort, InsufficientCoefficients,
    SampleTooCloseToAPoint, BoundaryTooClose, LengthMismatch,
)
_INTERNAL_ERRORS = (
    WindowCountMismatch, NonIntegralWinding, RefinementDiverged,
    QuadratureNotConverged,
)

POINTS_HEADER = "a_re,a_im,beta,gamma,residual"


def _parse_complex(text: str) -> complex:
    parts = text.split(",")
    if len(parts) == 1:
        return complex(float(parts[0]), 0.0)
    if len(parts) == 2:
        return complex(float(parts[0]), float(parts[1]))
    raise ValueError(f"expected re,im but got {text!r}")


def _parse_grid(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _fmt_value(z: complex) -> str:
    """12-decimal print; drops a zero imaginary part."""
    z = complex(z)
    if abs(z.imag) < 5e-13:
        return f"{z.real:.12f}"
    return f"{z.real:.12f},{z.imag:.12f}"


# ---------------------------------------------------------------- caching

def _cache_dir(explicit: str | None) -> Path:
    if explicit:
        return Path(explicit)
    env = os.environ.get("APOINTLAB_CACHE")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "apointlab"


def _cache_key(a: complex, t_max: float, p: cf.EvalParams) -> str:
    raw = f"{a.real!r},{a.imag!r}|0.05,{t_max!r}|{p.cache_key()!r}|points-v1"
    return hashlib.sha256(raw.encode()).hexdigest()[:16]


def _points_to_csv(points) -> str:
    lines = [POINTS_HEADER]
    for q in points:
        lines.append(",".join(repr(float(x)) for x in
                              (q.a.real, q.a.imag, q.beta, q.gamma,
                               q.residual)))
    return "\n".join(lines) + "\n"


def _points_from_csv(text: str, a: complex) -> list[APoint]:
    lines = text.strip().splitlines()
    if not lines or lines[0] != POINTS_HEADER:
        raise ValueError("cache file has an unexpected header")
    out = []
    for line in lines[1:]:
        ar, ai, beta, gamma, residual = (float(x) for x in line.split(","))
        if complex(ar, ai) != a:
            raise ValueError("cache file belongs to a different a")
        out.append(APoint(a=a, beta=beta, gamma=gamma, residual=residual))
    return out


def _cached_points(a: complex, t_max: float, cache: Path,
                   p: cf.EvalParams):
    """Returns (points, csv_path, was_cache_hit)."""
    key = _cache_key(a, t_max, p)
    path = cache / f"apoints_{key}.csv"
    if path.exists():
        return _points_from_csv(path.read_text(), a), path, True
    points = find_apoints(a, t_max, p)
    cache.mkdir(parents=True, exist_ok=True)
    path.write_text(_points_to_csv(points))
    return points, path, False


# ------------------------------------------------------------ subcommands

def _cmd_zeta(args) -> int:
    try:
        print(_fmt_value(cf.zeta(_parse_complex(args.s))))
    except PoleAtOne:
        print("error: pole at s=1", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def _cmd_delta(args) -> int:
    print(_fmt_value(cf.delta(_parse_complex(args.s))))
    return EXIT_OK


def _cmd_psi(args) -> int:
    from .dirichlet import psi
    print(f"{psi(args.x):.12f}")
    return EXIT_OK


def _cmd_lambda_a(args) -> int:
    series = lambda_a(args.n_max, _parse_complex(args.a))
    print("n,lambda_re,lambda_im")
    for n in range(1, len(series) + 1):
        c = series[n]
        print(f"{n},{c.real!r},{c.imag!r}")
    return EXIT_OK


def _cmd_ingest_zeros(args) -> int:
    points = ingest_zero_table(args.zeros_file)
    print(f"{len(points)} ordinates, first {points[0].gamma!r}, "
          f"last {points[-1].gamma!r}")
    return EXIT_OK


def _summary(a: complex, T: float, n: int) -> str:
    est = expected_count(a, T)
    ratio = n / est.main_term if est.main_term else float("inf")
    return (f"{n} points below T={T:g}; main term {est.main_term:.4f} "
            f"(c_a={est.c_a:g}), ratio {ratio:.4f}")


def _cmd_apoints(args) -> int:
    a = _parse_complex(args.a)
    p = cf.DEFAULT_PARAMS
    cache = _cache_dir(args.cache_dir)
    try:
        points, path, hit = _cached_points(a, args.t_max, cache, p)
    except WindowCountMismatch as exc:
        print(f"error: {exc} (window [0, kappa] x (0.05, {args.t_max:g}])",
              file=sys.stderr)
        return EXIT_INTERNAL
    print(path)
    print(f"{'cache hit' if hit else 'computed'}: "
          + _summary(a, args.t_max, len(points)))
    return EXIT_OK


def _cmd_report(args) -> int:
    a = _parse_complex(args.a)
    cache = _cache_dir(args.cache_dir)
    points, _, _ = _cached_points(a, args.t_max, cache, cf.DEFAULT_PARAMS)
    if args.format == "csv":
        sys.stdout.write(_points_to_csv(points))
    else:
        obj = {
            "a_re": a.real,
            "a_im": a.imag,
            "t_max": args.t_max,
            "points": [
                {"beta": q.beta, "gamma": q.gamma, "residual": q.residual}
                for q in points
            ],
        }
        print(json.dumps(obj, sort_keys=True, indent=2))
    return EXIT_OK


# ----------------------------------------------------------------- verify

def _bundled_zero_table():
    return ingest_zero_table(
        resource_files("apointlab") / "data" / "zeta_zeros_2000.txt")


def _zero_points(args):
    if args.zeros_file:
        return ingest_zero_table(args.zeros_file)
    return _bundled_zero_table()


def _emit_report(report, which: str, cache: Path) -> None:
    cache.mkdir(parents=True, exist_ok=True)
    digest = hashlib.sha256(
        vf.report_to_json(report).encode()).hexdigest()[:12]
    base = cache / f"report_{which}_{digest}"
    base.with_suffix(".json").write_text(vf.report_to_json(report) + "\n")
    base.with_suffix(".csv").write_text(vf.report_to_csv(report))
    print(vf.report_to_json(report))
    print(f"wrote {base.with_suffix('.json')} and {base.with_suffix('.csv')}",
          file=sys.stderr)


def _verdict(ok: bool, reason: str) -> int:
    if ok:
        print("PASS", file=sys.stderr)
        return EXIT_OK
    print(f"FAIL: {reason}", file=sys.stderr)
    return EXIT_VERIFY


def _verify_thm2(args, cache: Path) -> int:
    a = _parse_complex(args.a)
    grid = _parse_grid(args.grid)
    if a == 0:
        points = _zero_points(args)
        report = vf.thm2_report(a, grid, mode=args.mode, points=points,
                                workers=args.workers)
    else:
        report = vf.thm2_report(a, grid, mode=args.mode,
                                workers=args.workers)
    _emit_report(report, "thm2", cache)
    exp = report.fitted_exponent
    return _verdict(exp <= 0.8,
                    f"fitted_exponent {exp:.4f} exceeds 0.8")


def _verify_thm1(args, cache: Path) -> int:
    a = _parse_complex(args.a)
    if a == 0:
        print("error: a must be nonzero", file=sys.stderr)
        return EXIT_USAGE
    points = find_apoints(a, args.t_max)
    defect = vf.thm1_identity_check(a, args.t_max, points=points)
    sd = vf.thm1_reflected_sum(a, args.t_max, "delta", points=points)
    sz = vf.thm1_reflected_sum(a, args.t_max, "zeta", points=points)
    gap = abs(sd - sz)
    report = vf.TheoremReport(
        label=f"reflected-sum identity, a={a:g}",
        rows=(vf.ReportRow(T=args.t_max, lhs=sd, main=sz, residual_abs=gap),),
        fitted_exponent=None,
        notes=f"identity defect {defect:.6e}; form gap {gap:.6e}; "
              f"{len(points)} roots",
    )
    _emit_report(report, "thm1", cache)
    worst = max(defect, gap)
    return _verdict(worst <= args.tol,
                    f"defect {worst:.3e} exceeds tolerance {args.tol:g}")


def _verify_gonek(args, cache: Path) -> int:
    T = args.t_max
    coeffs = lambda_sieve(max(16, int(T / (2 * math.pi)) + 1))
    integral, total = vf.gonek_quadrature(coeffs, args.c, args.m, T)
    gap = abs(integral - total)
    # the segment mean only matches the sum up to the lemma's error
    # scale T^(c-1/2) (log T)^(m+1); constant 2 gives working margin
    bound = 2.0 * T ** (args.c - 0.5) * math.log(T) ** (args.m + 1)
    report = vf.TheoremReport(
        label=f"segment mean vs coefficient sum, c={args.c:g} m={args.m}",
        rows=(vf.ReportRow(T=T, lhs=integral, main=total, residual_abs=gap),),
        fitted_exponent=None,
        notes=f"pass bound {bound:.6g} (error-term scale)",
    )
    _emit_report(report, "gonek", cache)
    return _verdict(gap <= bound, f"gap {gap:.4g} exceeds {bound:.4g}")


def _verify_contour(args, cache: Path) -> int:
    a = _parse_complex(args.a)
    w = contour_window(a, args.t_max)
    quad, residues = vf.contour_residue_check(a, w)
    gap = abs(quad - residues)
    report = vf.TheoremReport(
        label=f"boundary integral vs residue sum, a={a:g}",
        rows=(vf.ReportRow(T=args.t_max, lhs=quad, main=residues,
                           residual_abs=gap),),
        fitted_exponent=None,
        notes=f"window [{w.sigma_min:g}, {w.sigma_max:g}] x "
              f"[{w.t_min:g}, {w.t_max:g}]",
    )
    _emit_report(report, "contour", cache)
    return _verdict(gap <= args.tol,
                    f"gap {gap:.3e} exceeds tolerance {args.tol:g}")


def _verify_counts(args, cache: Path) -> int:
    a = _parse_complex(args.a)
    grid = _parse_grid(args.grid) if args.grid else [args.t_max]
    rows = []
    worst = 0.0
    for T in grid:
        n = count_in_rectangle(a, contour_window(a, T))
        est = expected_count(a, T)
        rows.append(vf.ReportRow(T=T, lhs=complex(n), main=complex(est.main_term),
                                 residual_abs=abs(n - est.main_term)))
        worst = max(worst, abs(n / est.main_term - 1.0))
    report = vf.TheoremReport(
        label=f"root count vs main term, a={a:g}",
        rows=tuple(rows),
        fitted_exponent=None,
        notes=f"worst |count/main - 1| = {worst:.4f}; pass band 0.1",
    )
    _emit_report(report, "counts", cache)
    return _verdict(worst <= 0.1, f"count off by {worst:.4f} > 0.1")


def _cmd_verify(args) -> int:
    cache = _cache_dir(args.cache_dir)
    need_a = args.which in ("thm2", "thm1", "contour", "counts")
    if need_a and not args.a:
        print("error: --a is required for this harness", file=sys.stderr)
        return EXIT_USAGE
    if args.which == "thm2":
        if not args.grid:
            print("error: --grid is required for thm2", file=sys.stderr)
            return EXIT_USAGE
        return _verify_thm2(args, cache)
    if args.which == "thm1":
        return _verify_thm1(args, cache)
    if args.which == "gonek":
        return _verify_gonek(args, cache)
    if args.which == "contour":
        return _verify_contour(args, cache)
    return _verify_counts(args, cache)


# ----------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="apointlab",
        description="Roots of zeta(s) = a: evaluation, search, verification.")
    sub = parser.add_subparsers(dest="command", required=True)

    s_zeta = sub.add_parser("zeta", help="evaluate zeta at s")
    s_zeta.add_argument("--s", required=True, metavar="RE,IM")
    s_zeta.set_defaults(func=_cmd_zeta)

    s_delta = sub.add_parser("delta", help="evaluate the reflection factor")
    s_delta.add_argument("--s", required=True, metavar="RE,IM")
    s_delta.set_defaults(func=_cmd_delta)

    s_psi = sub.add_parser("psi", help="Chebyshev prime-power sum")
    s_psi.add_argument("--x", required=True, type=float)
    s_psi.set_defaults(func=_cmd_psi)

    s_lam = sub.add_parser("lambda-a", help="log-derivative coefficients")
    s_lam.add_argument("--a", required=True, metavar="RE,IM")
    s_lam.add_argument("--n-max", required=True, type=int)
    s_lam.set_defaults(func=_cmd_lambda_a)

    s_ap = sub.add_parser("apoints", help="locate roots, cache as CSV")
    s_ap.add_argument("--a", required=True, metavar="RE,IM")
    s_ap.add_argument("--t-max", required=True, type=float)
    s_ap.add_argument("--cache-dir")
    s_ap.set_defaults(func=_cmd_apoints)

    s_ing = sub.add_parser("ingest-zeros", help="validate an ordinate table")
    s_ing.add_argument("--zeros-file", required=True)
    s_ing.set_defaults(func=_cmd_ingest_zeros)

    s_rep = sub.add_parser("report", help="emit cached points, CSV or JSON")
    s_rep.add_argument("--a", required=True, metavar="RE,IM")
    s_rep.add_argument("--t-max", required=True, type=float)
    s_rep.add_argument("--format", choices=("csv", "json"), default="csv")
    s_rep.add_argument("--cache-dir")
    s_rep.set_defaults(func=_cmd_report)

    s_ver = sub.add_parser("verify", help="run a verification harness")
    s_ver.add_argument("which",
                       choices=("thm2", "thm1", "gonek", "contour", "counts"))
    s_ver.add_argument("--a", metavar="RE,IM")
    s_ver.add_argument("--t-max", type=float, default=100.0)
    s_ver.add_argument("--grid", metavar="T1,T2,...")
    s_ver.add_argument("--mode", choices=("psi", "rh"), default="psi")
    s_ver.add_argument("--tol", type=float, default=1e-6)
    s_ver.add_argument("--workers", type=int, default=1)
    s_ver.add_argument("--c", type=float, default=1.25)
    s_ver.add_argument("--m", type=int, choices=(0, 1), default=0)
    s_ver.add_argument("--cache-dir")
    s_ver.add_argument("--zeros-file")
    s_ver.set_defaults(func=_cmd_verify)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except _INTERNAL_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except PoleAtOne:
        print("error: pole at s=1", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
