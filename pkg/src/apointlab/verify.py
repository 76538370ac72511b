"""Identity harnesses: sums over located roots, main terms, contour and
segment quadratures, residual reports with growth-exponent fits.

Every sum over roots runs in ascending-ordinate order through math.fsum,
and report rows are assembled in grid order regardless of worker count,
so serialized output is byte-identical from run to run.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import complexfn as cf
from .apoints import (
    SearchWindow,
    count_in_rectangle,
    _find_roots_in_window,
    find_apoints,
)
from .dirichlet import DirichletSeries, lambda_a, psi
from .errors import (
    ACaseOne,
    ACaseZero,
    InsufficientCoefficients,
    InsufficientPoints,
    QuadratureNotConverged,
    SampleTooCloseToAPoint,
    SeriesTooShort,
    TooSmallT,
)

__all__ = [
    "TheoremReport",
    "ReportRow",
    "QuadratureParams",
    "thm2_sum",
    "thm2_main",
    "thm2_report",
    "thm1_identity_check",
    "thm1_reflected_sum",
    "thm1_growth",
    "gonek_quadrature",
    "contour_residue_check",
    "partfrac_bound_probe",
    "report_to_json",
    "report_to_csv",
]

TWO_PI = 2.0 * math.pi

_MAX_DOUBLINGS = 10
_GL_ORDER = 8
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(_GL_ORDER)


@dataclass(frozen=True)
class ReportRow:
    T: float
    lhs: complex
    main: complex
    residual_abs: float

    def __post_init__(self):
        if abs(self.residual_abs - abs(self.lhs - self.main)) > 1e-9 * (
                1.0 + abs(self.lhs) + abs(self.main)):
            raise ValueError("residual_abs does not match |lhs - main|")


@dataclass(frozen=True)
class TheoremReport:
    label: str
    rows: tuple[ReportRow, ...]
    fitted_exponent: float | None
    notes: str

    def __post_init__(self):
        ts = [r.T for r in self.rows]
        if ts != sorted(ts):
            raise ValueError("report rows must be sorted by T ascending")
        if self.fitted_exponent is not None and len(self.rows) < 3:
            raise ValueError("exponent fit needs at least 3 rows")


@dataclass(frozen=True)
class QuadratureParams:
    panels_per_unit_phase: int = 4
    max_abs_err: float = 1e-8

    def __post_init__(self):
        if self.panels_per_unit_phase <= 0:
            raise ValueError("panels_per_unit_phase must be positive")
        if not self.max_abs_err > 0.0:
            raise ValueError("max_abs_err must be positive")


DEFAULT_QUADRATURE = QuadratureParams()


def _fsum_points(values: np.ndarray) -> complex:
    return complex(math.fsum(values.real), math.fsum(values.imag))


def _point_array(points) -> np.ndarray:
    return np.array([complex(q.beta, q.gamma) for q in points],
                    dtype=np.complex128)


def _coverage(points, points_t_max) -> float:
    """Largest T the supplied root list can be trusted to cover."""
    if points_t_max is not None:
        return float(points_t_max)
    gammas = [q.gamma for q in points]
    if not gammas:
        return 0.0
    top = max(gammas)
    # three mean gaps of slack beyond the last ordinate
    return top + 3.0 * TWO_PI / math.log(max(top, 8.0) / TWO_PI + 2.0)


def _select(points, T: float):
    return [q for q in points if q.gamma < T]


def thm2_sum(a, T: float, points=None, points_t_max: float | None = None,
             p: cf.EvalParams | None = None) -> complex:
    """Sum of delta over the roots of zeta = a with 0 <= beta, 0 < gamma < T.

    `points` may carry precomputed or ingested roots; they must cover
    [0, T] (pass points_t_max when the source guarantees more than its
    largest ordinate). Without `points` a fresh search runs. Summation
    is ascending-gamma compensated, so the result is order-independent.
    """
    a = complex(a)
    p = p or cf.DEFAULT_PARAMS
    if points is None:
        pts = find_apoints(a, T, p)
    else:
        if _coverage(points, points_t_max) < T:
            raise InsufficientPoints(
                f"supplied roots cover T ~ {_coverage(points, points_t_max):.6g},"
                f" need {T:g}")
        pts = _select(points, T)
    if not pts:
        return 0.0 + 0.0j
    return _fsum_points(cf.delta(_point_array(pts), params=p))


def thm2_main(a, T: float, mode: str = "psi") -> complex:
    """Main term a (T/2pi) log(T/2pi e) minus psi(T/2pi) or T/2pi.

    mode "psi" subtracts the Chebyshev function (the unconditional
    form); mode "rh" subtracts T/2pi (the form equivalent to all
    critical-line ordinates sitting at beta = 1/2).
    """
    a = complex(a)
    if T <= TWO_PI * math.e:
        raise TooSmallT(f"main term needs T > 2 pi e = {TWO_PI * math.e:.3f}")
    if mode not in ("psi", "rh"):
        raise ValueError("mode must be 'psi' or 'rh'")
    x = T / TWO_PI
    lead = a * x * math.log(x / math.e)
    return lead - (psi(x) if mode == "psi" else x)


def _fit_exponent(rows) -> float:
    xs = [math.log(r.T) for r in rows]
    ys = [math.log(max(r.residual_abs, 1e-300)) for r in rows]
    n = len(xs)
    xbar = math.fsum(xs) / n
    ybar = math.fsum(ys) / n
    num = math.fsum((x - xbar) * (y - ybar) for x, y in zip(xs, ys))
    den = math.fsum((x - xbar) ** 2 for x in xs)
    return num / den


def _validate_grid(T_grid) -> list[float]:
    grid = [float(t) for t in T_grid]
    if len(grid) < 3:
        raise ValueError("need a grid of at least 3 heights for a report")
    if grid != sorted(grid) or len(set(grid)) != len(grid):
        raise ValueError("grid must be strictly ascending")
    return grid


def thm2_report(a, T_grid, mode: str = "psi", points=None,
                points_t_max: float | None = None, workers: int = 1,
                p: cf.EvalParams | None = None) -> TheoremReport:
    """Residual report: sum of delta at roots vs the main term, per height.

    Roots are searched once up to max(T_grid) unless supplied. Rows are
    evaluated by a thread pool (`workers`) but ordered by the grid, so
    output does not depend on the worker count.
    """
    a = complex(a)
    p = p or cf.DEFAULT_PARAMS
    grid = _validate_grid(T_grid)
    if points is None:
        points = find_apoints(a, grid[-1], p)
        points_t_max = grid[-1]

    def row(T: float) -> ReportRow:
        lhs = thm2_sum(a, T, points=points, points_t_max=points_t_max, p=p)
        main = thm2_main(a, T, mode)
        return ReportRow(T=T, lhs=lhs, main=main,
                         residual_abs=abs(lhs - main))

    if workers <= 1:
        rows = tuple(row(T) for T in grid)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = tuple(pool.map(row, grid))
    npts = len(_select(points, grid[-1]))
    return TheoremReport(
        label=f"delta-sum residue vs main term, a={a:g}",
        rows=rows,
        fitted_exponent=_fit_exponent(rows),
        notes=f"mode={mode}; {npts} roots below T={grid[-1]:g}; "
              "sublinear residual expected (pass band: exponent <= 0.8)",
    )


def _reflected(points) -> np.ndarray:
    return 1.0 - _point_array(points)


def thm1_identity_check(a, T: float, points=None,
                        p: cf.EvalParams | None = None) -> float:
    """Max defect of a * delta(1 - root) = zeta(1 - root) over roots below T.

    The identity is exact (it is the reflection formula evaluated at the
    root), so the returned defect measures pure evaluation error.
    """
    a = complex(a)
    if a == 0:
        raise ACaseZero("the identity degenerates at a = 0")
    p = p or cf.DEFAULT_PARAMS
    pts = _select(points, T) if points is not None else find_apoints(a, T, p)
    if not pts:
        return 0.0
    z = _reflected(pts)
    defect = np.abs(a * cf.delta(z, params=p) - cf.zeta(z, params=p))
    return float(defect.max())


def thm1_reflected_sum(a, T: float, form: str = "delta", points=None,
                       p: cf.EvalParams | None = None) -> complex:
    """Sum over roots below T of delta(1-root), or of zeta(1-root)/a.

    The two forms agree identically; computing both exercises disjoint
    evaluation paths.
    """
    a = complex(a)
    if a == 0:
        raise ACaseZero("reflected sums are for a != 0")
    if form not in ("delta", "zeta"):
        raise ValueError("form must be 'delta' or 'zeta'")
    p = p or cf.DEFAULT_PARAMS
    pts = _select(points, T) if points is not None else find_apoints(a, T, p)
    if not pts:
        return 0.0 + 0.0j
    z = _reflected(pts)
    if form == "delta":
        return _fsum_points(cf.delta(z, params=p))
    return _fsum_points(cf.zeta(z, params=p)) / a


def thm1_growth(a, T_grid, coeffs: DirichletSeries | None = None,
                points=None, p: cf.EvalParams | None = None) -> TheoremReport:
    """Reflected-sum rows against the integer main term.

    lhs = sum of delta(1-root) for gamma < T; main = partial sum of the
    log-derivative coefficients up to T/2pi. The notes record how |lhs|
    compares with T^(b_lower - 1/2) where b_lower is the largest located
    root real part (a growth trend, not an assertion).
    """
    a = complex(a)
    if a == 0:
        raise ACaseZero("growth rows need a != 0")
    if a == 1:
        raise ACaseOne("no coefficient series at a = 1")
    p = p or cf.DEFAULT_PARAMS
    grid = _validate_grid(T_grid)
    need = int(grid[-1] / TWO_PI)
    if coeffs is None:
        coeffs = lambda_a(max(need, 16), a)
    if len(coeffs) < need:
        raise InsufficientCoefficients(
            f"need coefficients to n = {need}, got {len(coeffs)}")
    if points is None:
        points = find_apoints(a, grid[-1], p)

    rows = []
    for T in grid:
        lhs = thm1_reflected_sum(a, T, "delta", points=points, p=p)
        upto = int(T / TWO_PI)
        main = complex(math.fsum(coeffs.values[1:upto + 1].real),
                       math.fsum(coeffs.values[1:upto + 1].imag))
        rows.append(ReportRow(T=T, lhs=lhs, main=main,
                              residual_abs=abs(lhs - main)))
    b_lower = max((q.beta for q in _select(points, grid[-1])), default=0.0)
    trend = ", ".join(
        f"T={r.T:g}: |lhs|={abs(r.lhs):.4g} vs T^(b-1/2)={r.T ** (b_lower - 0.5):.4g}"
        for r in rows)
    return TheoremReport(
        label=f"reflected delta sum vs coefficient sum, a={a:g}",
        rows=tuple(rows),
        fitted_exponent=_fit_exponent(rows),
        notes=f"b_lower={b_lower:.6g}; {trend}",
    )


def _march_panels(t0: float, t1: float, ppup: int, density) -> np.ndarray:
    """Panel edges from t0 to t1, spacing 1/(ppup * density(t))."""
    edges = [t0]
    t = t0
    span = t1 - t0
    while t < t1:
        step = 1.0 / (ppup * max(density(t), 1e-3))
        t = min(t + step, t1)
        edges.append(t)
        if len(edges) > 2_000_000:
            raise QuadratureNotConverged("panel marching exploded")
    out = np.array(edges)
    out[-1] = t1
    return out if span > 0 else np.array([t0, t1])


def _gl_segment(fbatch, z0: complex, z1: complex, edges_u: np.ndarray) -> complex:
    """Gauss-Legendre line integral of fbatch from z0 to z1.

    edges_u are panel edges of the parameter u in [0, 1]; all nodes are
    evaluated in a single batch, summed panel-major (fixed order).
    """
    lo = edges_u[:-1]
    hi = edges_u[1:]
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    u = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    dz = z1 - z0
    vals = fbatch(z0 + u * dz).reshape(-1, _GL_ORDER)
    per_panel = (vals * _GL_WEIGHTS[None, :]).sum(axis=1) * half
    return complex(math.fsum(per_panel.real),
                   math.fsum(per_panel.imag)) * dz


def _refine_quadrature(once, q: QuadratureParams):
    """Run `once(ppup)` with doubling panel density until stable."""
    ppup = q.panels_per_unit_phase
    prev = once(ppup)
    for _ in range(_MAX_DOUBLINGS):
        ppup *= 2
        cur = once(ppup)
        if abs(cur - prev) <= q.max_abs_err:
            return cur, abs(cur - prev)
        prev = cur
    raise QuadratureNotConverged(
        f"quadrature disagreement above {q.max_abs_err:g} after "
        f"{_MAX_DOUBLINGS} refinements")


def _series_eval(series: DirichletSeries, s: np.ndarray) -> np.ndarray:
    """Vectorized partial sum of the series at an array of points."""
    n = np.arange(1, len(series) + 1, dtype=np.float64)
    logn = np.log(n)
    c = series.values[1:]
    keep = c != 0
    if not keep.any():
        return np.zeros(s.shape, dtype=np.complex128)
    e = np.exp(np.multiply.outer(-s, logn[keep]))
    return e @ np.ascontiguousarray(c[keep])


def gonek_quadrature(b: DirichletSeries, c: float, m: int, T: float,
                     q: QuadratureParams = DEFAULT_QUADRATURE,
                     p: cf.EvalParams | None = None):
    """Vertical-segment mean of the reflected delta factor against a series.

    Returns the pair (integral, sum): the line integral
    (1/2pi i) * int_{c+i}^{c+iT} (d/ds)^m delta(1-s) * B(s) ds
    with B the truncated series, against the exact coefficient sum
    sum_{n <= T/2pi} b_n (log n)^m. The derivative is in s, so m = 1
    carries a factor -delta'(1-s); with the derivative taken in the
    argument instead, the sum side would flip to (-log n)^m. No
    assertion is made here; the two are returned for the caller to
    compare.
    """
    if m not in (0, 1):
        raise ValueError("m must be 0 or 1")
    if not T > 1.0:
        raise TooSmallT("segment needs T > 1")
    p = p or cf.DEFAULT_PARAMS
    need = int(T / TWO_PI)
    if len(b) < need:
        raise SeriesTooShort(
            f"series must reach n = {need} to cover the sum side")

    def density(t: float) -> float:
        return math.log(max(t, TWO_PI) / TWO_PI) + 1.0

    def fbatch(s: np.ndarray) -> np.ndarray:
        w = 1.0 - s
        d = cf.delta(w, params=p)
        if m == 1:
            d = -d * cf.delta_log_deriv(w, params=p)  # chain rule in s
        return d * _series_eval(b, s)

    z0 = complex(c, 1.0)
    z1 = complex(c, T)

    def once(ppup: int) -> complex:
        edges_t = _march_panels(1.0, T, ppup, density)
        edges_u = (edges_t - 1.0) / (T - 1.0)
        return _gl_segment(fbatch, z0, z1, edges_u) / (2.0j * math.pi)

    integral, _ = _refine_quadrature(once, q)

    terms = []
    for n in range(1, min(need, len(b)) + 1):
        coeff = complex(b[n])
        if coeff != 0:
            terms.append(coeff * math.log(n) ** m)
    total = complex(math.fsum(t.real for t in terms),
                    math.fsum(t.imag for t in terms))
    return integral, total


def contour_residue_check(a, w: SearchWindow,
                          q: QuadratureParams = DEFAULT_QUADRATURE,
                          p: cf.EvalParams | None = None):
    """Rectangle integral of the counting kernel times delta vs residues.

    Returns (quadrature, residue_sum): the positively oriented boundary
    integral of zeta'/(zeta - a) * delta(s) / (2 pi i) against the sum
    of delta over interior roots (any real part). Cauchy's theorem makes
    them equal; the gap measures quadrature plus location error.
    """
    a = complex(a)
    p = p or cf.DEFAULT_PARAMS
    n = count_in_rectangle(a, w, p)  # also enforces boundary clearance
    if n == 0:
        roots = np.array([], dtype=np.complex128)
    else:
        roots, _ = _find_roots_in_window(a, w, p)
    order = np.argsort(roots.imag, kind="stable")
    residue_sum = (_fsum_points(cf.delta(roots[order], params=p))
                   if len(roots) else 0.0 + 0.0j)

    def fbatch(s: np.ndarray) -> np.ndarray:
        z, dz = cf.zeta_and_deriv(s, params=p)
        return dz / (z - a) * cf.delta(s, params=p)

    corners = [complex(w.sigma_max, w.t_min), complex(w.sigma_max, w.t_max),
               complex(w.sigma_min, w.t_max), complex(w.sigma_min, w.t_min)]

    def once(ppup: int) -> complex:
        total = 0.0 + 0.0j
        for i in range(4):
            z0, z1 = corners[i], corners[(i + 1) % 4]
            length = abs(z1 - z0)
            if length == 0.0:
                continue
            tmax = max(z0.imag, z1.imag)
            dens = math.log(2.0 + tmax) + 1.0
            count = max(4, int(math.ceil(ppup * length * dens)))
            edges_u = np.linspace(0.0, 1.0, count + 1)
            total += _gl_segment(fbatch, z0, z1, edges_u)
        return total / (2.0j * math.pi)

    quadrature, _ = _refine_quadrature(once, q)
    return quadrature, residue_sum


def partfrac_bound_probe(a, sample, p: cf.EvalParams | None = None) -> float:
    """Sup over samples of |zeta'/(zeta-a)| / log(2+|t|)^2.

    A monitored statistic: the ratio should stay O(1) when every sample
    keeps distance 1/log(2+|t|) from all roots, which is enforced.
    """
    a = complex(a)
    p = p or cf.DEFAULT_PARAMS
    pts = np.asarray([complex(z) for z in sample], dtype=np.complex128)
    if pts.size == 0:
        return 0.0
    if np.any(pts.real < -1.0):
        raise ValueError("samples must satisfy Re s >= -1")
    tmax = float(np.abs(pts.imag).max())
    tmin = float(np.abs(pts.imag).min())
    w = SearchWindow(-1.5, max(3.0, pts.real.max() + 0.5),
                     max(0.05, tmin - 2.0), tmax + 2.0)
    roots, _ = _find_roots_in_window(a, w, p)
    floor = 1.0 / np.log(2.0 + np.abs(pts.imag))
    if len(roots):
        dist = np.abs(pts[:, None] - roots[None, :]).min(axis=1)
        bad = dist < floor
        if bad.any():
            k = int(np.argmax(bad))
            raise SampleTooCloseToAPoint(
                f"sample {pts[k]:.6g} within {dist[k]:.3g} of a root "
                f"(floor {floor[k]:.3g})")
    z, dz = cf.zeta_and_deriv(pts, params=p)
    ratio = np.abs(dz / (z - a)) / np.log(2.0 + np.abs(pts.imag)) ** 2
    return float(ratio.max())


def _row_cells(r: ReportRow):
    return [r.T, r.lhs.real, r.lhs.imag, r.main.real, r.main.imag,
            r.residual_abs]


def report_to_json(report: TheoremReport) -> str:
    obj = {
        "label": report.label,
        "rows": [
            {
                "T": r.T,
                "lhs_re": r.lhs.real,
                "lhs_im": r.lhs.imag,
                "main_re": r.main.real,
                "main_im": r.main.imag,
                "residual_abs": r.residual_abs,
            }
            for r in report.rows
        ],
        "fitted_exponent": report.fitted_exponent,
        "notes": report.notes,
    }
    return json.dumps(obj, sort_keys=True, indent=2)


def report_to_csv(report: TheoremReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["T", "lhs_re", "lhs_im", "main_re", "main_im",
                     "residual_abs"])
    for r in report.rows:
        writer.writerow([repr(float(x)) for x in _row_cells(r)])
    return buf.getvalue()
