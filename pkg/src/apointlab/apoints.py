"""Locating and counting the roots of zeta(s) = a in rectangles.

Counting is argument-principle winding: the phase of zeta(s) - a is
tracked along the rectangle boundary with adaptive sample refinement
(every step between consecutive samples is forced under pi/2, so the
sampled polygon cannot wrap unseen), and the total turn divided by 2 pi
is the root count. Location is strip subdivision to winding-one cells
followed by batched Newton polishing.

Everything evaluates zeta through `complexfn` in large vectorised
batches; no randomness anywhere, so repeated runs are bit-identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import complexfn as cf
from .dirichlet import sigma_star
from .errors import (
    BoundaryTooClose,
    NonIntegralWinding,
    NotAscending,
    ParseError,
    RefinementDiverged,
    ResidualTooLarge,
    TooSmallT,
    WindowCountMismatch,
)

__all__ = [
    "APoint",
    "SearchWindow",
    "CountEstimate",
    "count_in_rectangle",
    "find_apoints",
    "expected_count",
    "ingest_zero_table",
    "default_window",
    "contour_window",
    "BoundaryTooClose",
    "NonIntegralWinding",
    "RefinementDiverged",
    "WindowCountMismatch",
    "ParseError",
    "NotAscending",
    "ResidualTooLarge",
    "TooSmallT",
]

TWO_PI = 2.0 * np.pi

BOUNDARY_CLEARANCE = 1e-4   # min |zeta - a| allowed on a counting contour
NEWTON_RESIDUAL = 1e-11     # polish target; well under the 1e-8 contract
DEDUP_DISTANCE = 1e-9

_STEP_CAP = 0.5 * np.pi     # max phase step between adjacent samples
_MIN_GAP = 1e-9             # absolute gap below which refinement gives up
_MAX_ROUNDS = 48
_TABLE_RESIDUAL = 1e-5


@dataclass(frozen=True)
class APoint:
    """One root of zeta(s) = a at beta + i gamma, right half-plane only."""

    a: complex
    beta: float
    gamma: float
    residual: float

    def __post_init__(self):
        if not (self.beta >= 0.0):
            raise ValueError("a-points are restricted to beta >= 0")
        if not (self.gamma > 0.0):
            raise ValueError("a-points are restricted to gamma > 0")
        if not (self.residual >= 0.0):
            raise ValueError("residual must be nonnegative")

    @property
    def s(self) -> complex:
        return complex(self.beta, self.gamma)


@dataclass(frozen=True)
class SearchWindow:
    """Closed rectangle [sigma_min, sigma_max] x [t_min, t_max], t_min > 0."""

    sigma_min: float
    sigma_max: float
    t_min: float
    t_max: float

    def __post_init__(self):
        if not self.sigma_min < self.sigma_max:
            raise ValueError("need sigma_min < sigma_max")
        if not 0.0 < self.t_min <= self.t_max:
            raise ValueError("need 0 < t_min <= t_max")

    @property
    def degenerate(self) -> bool:
        return self.t_min == self.t_max


@dataclass
class CountEstimate:
    """Main-term prediction (T/2pi) log(T/(2 pi e c_a)) for the root count."""

    exact_count: int | None
    main_term: float
    c_a: float


def _phase_track(fbatch, segs, base_counts):
    """Adaptive phase tracking along straight segments.

    fbatch maps an ndarray of points to f-values; segs is a list of
    (z0, z1) directed segments; base_counts the initial samples per
    segment. Returns (per-segment summed phase steps, min |f| seen).
    Refines every gap whose phase step exceeds pi/2; a gap that cannot
    be resolved above the absolute floor means a root sits essentially
    on the contour and raises BoundaryTooClose.
    """
    z0 = np.array([s[0] for s in segs], dtype=np.complex128)
    dz = np.array([s[1] - s[0] for s in segs], dtype=np.complex128)
    taus = [np.linspace(0.0, 1.0, max(2, int(m))) for m in base_counts]

    pts = np.concatenate([z0[k] + taus[k] * dz[k] for k in range(len(segs))])
    vals = fbatch(pts)
    fvs = []
    ofs = 0
    for t in taus:
        fvs.append(vals[ofs:ofs + t.size])
        ofs += t.size

    minabs = float(min(np.min(np.abs(v)) for v in fvs))
    if minabs <= BOUNDARY_CLEARANCE:
        raise BoundaryTooClose(
            f"|zeta - a| = {minabs:.2e} on the contour (clearance "
            f"{BOUNDARY_CLEARANCE:g})")

    for _ in range(_MAX_ROUNDS):
        ref_ids = []
        ref_taus = []
        for k in range(len(segs)):
            fv = fvs[k]
            d = np.angle(fv[1:] * np.conj(fv[:-1]))
            bad = np.abs(d) > _STEP_CAP
            if not bad.any():
                continue
            tau = taus[k]
            gaps = (tau[1:] - tau[:-1])[bad] * abs(dz[k])
            if np.any(gaps < _MIN_GAP):
                raise BoundaryTooClose(
                    "phase step stays above pi/2 at gap < 1e-9; a root is "
                    "on or next to the contour")
            mids = 0.5 * (tau[:-1][bad] + tau[1:][bad])
            ref_ids.append(np.full(mids.size, k, dtype=np.int64))
            ref_taus.append(mids)
        if not ref_ids:
            break
        ids = np.concatenate(ref_ids)
        nts = np.concatenate(ref_taus)
        nvals = fbatch(z0[ids] + nts * dz[ids])
        m = float(np.min(np.abs(nvals)))
        minabs = min(minabs, m)
        if minabs <= BOUNDARY_CLEARANCE:
            raise BoundaryTooClose(
                f"|zeta - a| = {minabs:.2e} on the contour (clearance "
                f"{BOUNDARY_CLEARANCE:g})")
        for k in np.unique(ids):
            pick = ids == k
            tau = np.concatenate([taus[k], nts[pick]])
            fv = np.concatenate([fvs[k], nvals[pick]])
            order = np.argsort(tau, kind="stable")
            taus[k] = tau[order]
            fvs[k] = fv[order]
    else:
        raise NonIntegralWinding("phase refinement did not settle")

    phases = [float(np.sum(np.angle(fv[1:] * np.conj(fv[:-1])))) for fv in fvs]
    return phases, minabs


def _base_density_t(t: float) -> float:
    """Samples per unit t along vertical contour pieces."""
    return max(2.0, 1.3 * math.log(2.0 + t))


def _base_density_sigma(t: float) -> float:
    """Samples per unit sigma along horizontal contour pieces."""
    return max(4.0, 1.0 * math.log(2.0 + t))


def _rect_phases(fbatch, w: SearchWindow, scale: float = 1.0):
    """Total winding of fbatch around the rectangle boundary, in turns."""
    bl = complex(w.sigma_min, w.t_min)
    br = complex(w.sigma_max, w.t_min)
    tr = complex(w.sigma_max, w.t_max)
    tl = complex(w.sigma_min, w.t_max)
    segs = [(bl, br), (br, tr), (tr, tl), (tl, bl)]
    width = w.sigma_max - w.sigma_min
    height = w.t_max - w.t_min
    counts = [
        math.ceil(scale * width * _base_density_sigma(w.t_min)) + 2,
        math.ceil(scale * height * _base_density_t(w.t_max)) + 2,
        math.ceil(scale * width * _base_density_sigma(w.t_max)) + 2,
        math.ceil(scale * height * _base_density_t(w.t_max)) + 2,
    ]
    phases, _ = _phase_track(fbatch, segs, counts)
    return sum(phases) / TWO_PI


def _round_winding(value: float, tol: float = 0.25) -> int:
    n = int(round(value))
    if abs(value - n) > tol:
        raise NonIntegralWinding(
            f"winding {value:.6f} is not within {tol} of an integer")
    return n


def _make_fbatch(a: complex, p: cf.EvalParams):
    def fbatch(pts: np.ndarray) -> np.ndarray:
        return cf.zeta(pts, params=p) - a
    return fbatch


def count_in_rectangle(a, w: SearchWindow, p: cf.EvalParams | None = None) -> int:
    """Number of roots of zeta(s) = a strictly inside w, with multiplicity.

    Winding-number count with a doubled-density confirmation pass; the
    two densities must agree on the same integer. Degenerate windows
    (empty interior) count zero by convention.
    """
    p = p or cf.DEFAULT_PARAMS
    a = complex(a)
    if w.degenerate:
        return 0
    fbatch = _make_fbatch(a, p)
    w1 = _round_winding(_rect_phases(fbatch, w, scale=1.0))
    w2 = _round_winding(_rect_phases(fbatch, w, scale=2.0))
    if w1 != w2:
        raise NonIntegralWinding(
            f"winding disagrees between densities: {w1} vs {w2}")
    if w1 < 0:
        raise NonIntegralWinding(
            f"negative winding {w1}: a pole is inside the window")
    return w1


def default_window(a, T: float) -> SearchWindow:
    """Search rectangle [0, kappa(a)] x [0.05, T].

    kappa bounds the rightmost possible root: 2 for a = 0 (the classical
    zero-free half-plane), sigma_star(a) + 0.5 otherwise (to the right of
    sigma_star the defining series keeps |zeta - a| away from 0), and 4
    for a = 1 where the sigma_star equation degenerates.
    """
    a = complex(a)
    if a == 0:
        kappa = 2.0
    elif a == 1:
        kappa = 4.0
    else:
        kappa = sigma_star(a) + 0.5
    if T <= 0.05:
        raise TooSmallT("window height must exceed t_min = 0.05")
    return SearchWindow(0.0, kappa, 0.05, T)


def contour_window(a, T: float, delta: float = 0.5) -> SearchWindow:
    """Counting rectangle [-delta, kappa(a)] x [1, T].

    Counting-formula and residue checks use this window: roots with
    slightly negative real part (they exist, e.g. a ~ 2 near t = 9.9)
    belong to the count, while find_apoints deliberately reports only
    the right half-plane. t starts at 1 so the pole at s = 1 and
    everything on the real axis stays outside.
    """
    right = default_window(a, T)
    if T <= 1.0:
        raise TooSmallT("counting window needs T > 1")
    return SearchWindow(-float(delta), right.sigma_max, 1.0, T)


_JITTER = (0.5, 0.41, 0.63, 0.29, 0.71, 0.47)


def _slab_windings(fbatch, w: SearchWindow, h: float):
    """Partition w into horizontal slabs and return per-slab windings.

    All slab edges are tracked in one batch: K+1 shared horizontals plus
    2K short verticals. Internal cut lines that fall foul of the
    clearance are nudged and the whole pass retried.
    """
    for attempt in range(len(_JITTER)):
        nslab = max(1, math.ceil((w.t_max - w.t_min) / h))
        cuts = w.t_min + (w.t_max - w.t_min) * np.arange(nslab + 1) / nslab
        cuts[0] = w.t_min
        cuts[-1] = w.t_max
        if attempt:
            jit = (_JITTER[attempt] - 0.5) * (cuts[1] - cuts[0])
            cuts[1:-1] = cuts[1:-1] + jit
        segs = []
        counts = []
        dsig = _base_density_sigma(w.t_max)
        width = w.sigma_max - w.sigma_min
        for t in cuts:
            segs.append((complex(w.sigma_min, t), complex(w.sigma_max, t)))
            counts.append(math.ceil(width * dsig) + 2)
        dt = _base_density_t(w.t_max)
        for i in range(nslab):
            lo, hi = cuts[i], cuts[i + 1]
            for sig in (w.sigma_min, w.sigma_max):
                segs.append((complex(sig, lo), complex(sig, hi)))
                counts.append(math.ceil((hi - lo) * dt) + 2)
        try:
            phases, _ = _phase_track(fbatch, segs, counts)
        except BoundaryTooClose:
            if attempt == len(_JITTER) - 1:
                raise
            continue
        horiz = phases[:nslab + 1]
        verts = phases[nslab + 1:]
        windings = []
        for i in range(nslab):
            left = verts[2 * i]
            right = verts[2 * i + 1]
            turn = (horiz[i] + right - horiz[i + 1] - left) / TWO_PI
            windings.append(_round_winding(turn, tol=0.05))
        cells = [(SearchWindow(w.sigma_min, w.sigma_max,
                               float(cuts[i]), float(cuts[i + 1])), c)
                 for i, c in enumerate(windings) if c > 0]
        return cells
    raise BoundaryTooClose("could not place slab cuts clear of roots")


def _bisect_cell(fbatch, cell: SearchWindow):
    """Split a cell across its wider side, dodging roots on the cut line."""
    tall = (cell.t_max - cell.t_min) >= (cell.sigma_max - cell.sigma_min)
    for frac in _JITTER:
        if tall:
            mid = cell.t_min + frac * (cell.t_max - cell.t_min)
            lo = SearchWindow(cell.sigma_min, cell.sigma_max, cell.t_min, mid)
            hi = SearchWindow(cell.sigma_min, cell.sigma_max, mid, cell.t_max)
        else:
            mid = cell.sigma_min + frac * (cell.sigma_max - cell.sigma_min)
            lo = SearchWindow(cell.sigma_min, mid, cell.t_min, cell.t_max)
            hi = SearchWindow(mid, cell.sigma_max, cell.t_min, cell.t_max)
        try:
            counts = [_cell_winding(fbatch, c) for c in (lo, hi)]
        except BoundaryTooClose:
            continue
        return list(zip((lo, hi), counts))
    raise BoundaryTooClose("no clear cut line found inside a cell")


def _cell_winding(fbatch, cell: SearchWindow) -> int:
    return _round_winding(_rect_phases(fbatch, cell, scale=1.0), tol=0.05)


def _isolate(fbatch, w: SearchWindow, h: float):
    """Reduce w to a list of winding-one cells."""
    cells = _slab_windings(fbatch, w, h)
    singles = []
    pending = [(c, n, 0) for c, n in cells]
    while pending:
        cell, n, depth = pending.pop()
        if n == 1:
            singles.append(cell)
            continue
        if depth >= _MAX_ROUNDS:
            raise RefinementDiverged(
                f"cell at t ~ {cell.t_min:.3f} would not separate")
        for sub, m in _bisect_cell(fbatch, cell):
            if m > 0:
                pending.append((sub, m, depth + 1))
    return singles


def _newton_polish(a: complex, cells, p: cf.EvalParams, fbatch):
    """Batched Newton from each cell centre.

    Early iterates may wander well outside their cell; correctness comes
    from the final containment check (the converged root must lie in its
    winding-one cell), and any cell whose iteration converged elsewhere
    or not at all is re-bisected and retried from a smaller start.
    """
    a = complex(a)
    roots = []
    todo = list(cells)
    t_hi = max(c.t_max for c in cells) + 50.0 if cells else 0.0
    for _ in range(5):
        if not todo:
            break
        # seed each cell from whichever of several interior probes sits
        # deepest in the basin; slab cells are wide in sigma and a centre
        # start can face a nearly flat or saddle-ridden stretch
        nprobe = 8
        offs = (np.arange(nprobe) + 0.5) / nprobe
        probes = np.concatenate([
            c.sigma_min + offs * (c.sigma_max - c.sigma_min)
            + 0.5j * (c.t_min + c.t_max) for c in todo])
        fit = np.abs(cf.zeta(probes, params=p) - a).reshape(len(todo), nprobe)
        z = probes.reshape(len(todo), nprobe)[
            np.arange(len(todo)), np.argmin(fit, axis=1)]
        ok = np.zeros(z.shape, dtype=bool)
        stuck = np.zeros(z.shape, dtype=bool)
        for _ in range(60):
            act = ~(ok | stuck)
            if not act.any():
                break
            zv, dzv = cf.zeta_and_deriv(z[act], params=p)
            f = zv - a
            done = np.abs(f) <= NEWTON_RESIDUAL
            znew = z[act] - np.where(done, 0.0, f / dzv)
            # loose safety box: anything straying this far has left every
            # basin of interest and only risks out-of-range evaluations
            esc = ((znew.real < -12.0) | (znew.real > 64.0)
                   | (znew.imag < 0.01) | (znew.imag > t_hi))
            z[act] = np.where(esc, z[act], znew)
            idx = np.nonzero(act)[0]
            ok[idx[done]] = True
            stuck[idx[esc & ~done]] = True
        retry = []
        for i, c in enumerate(todo):
            inside = (ok[i]
                      and c.sigma_min - 1e-7 <= z[i].real <= c.sigma_max + 1e-7
                      and c.t_min - 1e-7 <= z[i].imag <= c.t_max + 1e-7)
            if inside:
                roots.append(complex(z[i]))
                continue
            for sub, m in _bisect_cell(fbatch, c):
                if m == 1:
                    retry.append(sub)
                elif m > 1:
                    raise RefinementDiverged(
                        "winding-one cell split into a multi-root cell")
        todo = retry
    if todo:
        raise RefinementDiverged(f"{len(todo)} cells never converged")
    if roots:
        rz = np.array(roots)
        residuals = np.abs(cf.zeta(rz, params=p) - a)
        bad = residuals > 1e-8
        if bad.any():
            raise RefinementDiverged(
                f"{int(bad.sum())} polished roots exceed the residual bound")
        return rz, residuals
    return np.array([], dtype=np.complex128), np.array([], dtype=np.float64)


def _find_roots_in_window(a, w: SearchWindow, p: cf.EvalParams,
                          granularity: float | None = None):
    """Raw located roots (complex array, residuals) inside w, any beta."""
    a = complex(a)
    p = p or cf.DEFAULT_PARAMS
    h = granularity or 0.5 / math.log(max(w.t_max, 8.0))
    fbatch = _make_fbatch(a, p)
    cells = _isolate(fbatch, w, h)
    roots, residuals = _newton_polish(a, cells, p, fbatch)
    order = np.lexsort((roots.real, roots.imag))
    roots = roots[order]
    residuals = residuals[order] if len(roots) else residuals
    # deduplicate: distinct cells converging to one root means a winding
    # mismatch, surfaced below rather than silently dropped
    keep = np.ones(roots.shape, dtype=bool)
    for i in range(1, len(roots)):
        if abs(roots[i] - roots[i - 1]) < DEDUP_DISTANCE:
            keep[i] = False
    roots, residuals = roots[keep], residuals[keep]
    if len(roots) != len(cells):
        raise WindowCountMismatch(
            f"isolated {len(cells)} cells but located {len(roots)} distinct roots")
    return roots, residuals


def find_apoints(a, T: float, p: cf.EvalParams | None = None,
                 granularity: float | None = None) -> list[APoint]:
    """All roots of zeta(s) = a with 0 <= beta <= kappa(a), 0.05 < gamma <= T.

    Sorted by gamma ascending. The located roots are checked against the
    per-cell winding counts; any shortfall raises WindowCountMismatch.
    Residuals are |zeta(root) - a| after Newton polish, at most 1e-8 and
    typically near 1e-12.
    """
    a = complex(a)
    p = p or cf.DEFAULT_PARAMS
    w = default_window(a, T)
    roots, residuals = _find_roots_in_window(a, w, p, granularity)
    return [
        APoint(a=a, beta=float(max(r.real, 0.0)), gamma=float(r.imag),
               residual=float(res))
        for r, res in zip(roots, residuals)
    ]


def expected_count(a, T: float) -> CountEstimate:
    """Main term (T/2pi) log(T/(2 pi e c_a)) of the counting formula.

    c_a = 1 except c_1 = 2. The caller fills exact_count.
    """
    a = complex(a)
    c = 2.0 if a == 1 else 1.0
    if T <= TWO_PI * np.e * c:
        raise TooSmallT(
            f"main term needs T > 2 pi e c_a = {TWO_PI * np.e * c:.3f}")
    main = (T / TWO_PI) * math.log(T / (TWO_PI * np.e * c))
    return CountEstimate(exact_count=None, main_term=main, c_a=c)


def ingest_zero_table(path, p: cf.EvalParams | None = None) -> list[APoint]:
    """Load critical-line zero ordinates from a text file.

    One positive decimal per line, strictly ascending; blank lines and
    `#` comments are skipped. Every ordinate is re-verified on the line:
    |zeta(1/2 + i gamma)| must not exceed 1e-5, otherwise the offending
    line is rejected (ResidualTooLarge with its line number).
    """
    p = p or cf.DEFAULT_PARAMS
    gammas = []
    lines = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            text = raw.strip()
            if not text or text.startswith("#"):
                continue
            try:
                g = float(text)
            except ValueError:
                raise ParseError(f"not a decimal ordinate: {text!r}", lineno) from None
            if not math.isfinite(g) or g <= 0.0:
                raise ParseError(f"ordinate must be positive, got {text!r}", lineno)
            if gammas and g <= gammas[-1]:
                raise NotAscending(f"{g} follows {gammas[-1]}", lineno)
            gammas.append(g)
            lines.append(lineno)
    if not gammas:
        return []
    garr = np.array(gammas)
    residuals = np.abs(cf.zeta(0.5 + 1j * garr, params=p))
    bad = np.nonzero(residuals > _TABLE_RESIDUAL)[0]
    if bad.size:
        i = int(bad[0])
        raise ResidualTooLarge(
            f"|zeta(1/2 + {gammas[i]}i)| = {residuals[i]:.2e} > {_TABLE_RESIDUAL:g}",
            lines[i])
    return [
        APoint(a=0j, beta=0.5, gamma=float(g), residual=float(r))
        for g, r in zip(garr, residuals)
    ]
