"""Evaluation core: zeta, zeta', log-gamma, and the functional-equation
factor delta with its logarithmic derivative.

All arithmetic is float64. The zeta evaluator is Euler-Maclaurin with an
adaptive truncation point and an explicit alternating-envelope remainder
bound; delta and delta'/delta are computed in log space from gamma-function
identities so nothing overflows on the ranges the rest of the package walks
(|Im s| up to a few thousand). Every public function accepts a scalar or an
array_like of points and mirrors the shape on output.

Conventions used throughout:

    delta(s) = 2 (2 pi)^(s-1) sin(pi s / 2) Gamma(1 - s),

so that zeta(s) = delta(s) zeta(1 - s), |delta(1/2 + it)| = 1, and
|delta(sigma + it)| ~ (|t| / 2 pi)^(1/2 - sigma). (A variant with
(2 pi)^(-s) circulates in the literature; it is a typo - it fails the
functional equation at s = -1.) All functions here commute with complex
conjugation by construction: inputs are canonicalised to the upper half
plane and results conjugated back, so f(conj(s)) == conj(f(s)) exactly.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import digamma as _digamma
from scipy.special import loggamma as _loggamma
from scipy.special import zeta as _real_zeta

from .errors import (
    NearSingularity,
    PoleAtNonpositiveInteger,
    PoleAtOddInteger,
    PoleAtOne,
    RangeExceeded,
)

__all__ = [
    "EvalParams",
    "PARAMS_VERSION",
    "zeta",
    "zeta_deriv",
    "zeta_and_deriv",
    "log_gamma",
    "delta",
    "delta_log_deriv",
    "PoleAtOne",
    "RangeExceeded",
    "PoleAtNonpositiveInteger",
    "PoleAtOddInteger",
    "NearSingularity",
]

TWO_PI = 2.0 * np.pi
LOG_TWO_PI = float(np.log(2.0 * np.pi))
LOG_TWO = float(np.log(2.0))

# Hard ceiling on |Im s|; past T_FULL_ACCURACY the remainder bound is still
# tracked but may exceed target_abs_err, which is reported via a warning.
T_LIMIT = 1.0e4
T_FULL_ACCURACY = 2000.0

# Version stamp for anything that caches values produced with EvalParams.
PARAMS_VERSION = 1

_POLE_RADIUS = 1e-12      # refusal radius around s = 1 and Gamma poles
_ODD_POLE_RADIUS = 1e-8   # refusal radius around delta poles s = 1, 3, 5, ...
_SINGULAR_RADIUS = 1e-6   # refusal radius for delta'/delta singularities

_MAX_BERNOULLI = 60


@dataclass(frozen=True)
class EvalParams:
    """Knobs for the evaluation core.

    em_cutoff        floor for the Euler-Maclaurin truncation point N (the
                     effective N grows with |Im s| to keep the remainder
                     under target_abs_err)
    bernoulli_order  number of Euler-Maclaurin correction terms available
    target_abs_err   absolute error budget per evaluation
    quadrature_panel Gauss-Legendre nodes per panel for contour work
    """

    em_cutoff: int = 32
    bernoulli_order: int = 24
    target_abs_err: float = 1e-10
    quadrature_panel: int = 8

    def __post_init__(self):
        if self.em_cutoff < 8:
            raise ValueError("em_cutoff must be at least 8")
        if not 1 <= self.bernoulli_order <= _MAX_BERNOULLI:
            raise ValueError(f"bernoulli_order must be in 1..{_MAX_BERNOULLI}")
        if not 0.0 < self.target_abs_err <= 1e-6:
            raise ValueError("target_abs_err must be in (0, 1e-6]")
        if not 2 <= self.quadrature_panel <= 64:
            raise ValueError("quadrature_panel must be in 2..64")

    def cache_key(self) -> tuple:
        return (PARAMS_VERSION, self.em_cutoff, self.bernoulli_order,
                repr(self.target_abs_err), self.quadrature_panel)


DEFAULT_PARAMS = EvalParams()


def _bernoulli_ratios(kmax: int) -> np.ndarray:
    """C[k] = B_{2k} / (2k)! for k = 1..kmax (C[0] unused).

    Via B_{2k}/(2k)! = (-1)^(k+1) * 2 * zeta(2k) / (2 pi)^(2k), which stays
    in float64 range where the raw Bernoulli numbers would not.
    """
    k = np.arange(0, kmax + 1, dtype=np.float64)
    out = np.zeros(kmax + 1)
    out[1:] = (np.where(np.arange(1, kmax + 1) % 2 == 1, 1.0, -1.0)
               * 2.0 * _real_zeta(2.0 * k[1:], 1.0)
               * np.exp(-2.0 * k[1:] * LOG_TWO_PI))
    return out


_C = _bernoulli_ratios(_MAX_BERNOULLI + 1)   # one extra term for the bound


def _as_points(s) -> tuple[np.ndarray, bool]:
    arr = np.asarray(s, dtype=np.complex128)
    scalar = arr.ndim == 0
    return np.atleast_1d(arr), scalar


def _validate_zeta_points(s: np.ndarray) -> None:
    if not np.all(np.isfinite(s)):
        raise ValueError("evaluation points must be finite")
    if np.any(np.abs(s - 1.0) <= _POLE_RADIUS):
        raise PoleAtOne("zeta has a pole at s = 1")
    if np.any(np.abs(s.imag) > T_LIMIT):
        raise RangeExceeded(f"|Im s| beyond supported range {T_LIMIT:g}")


def _em_N(tmax: float, p: EvalParams) -> int:
    # 0.75 keeps the correction-tail bound under 1e-10 through t = 2000,
    # including the derivative tail with its extra log N factor
    n = max(p.em_cutoff, int(np.ceil(0.75 * (tmax + 16.0))))
    # round up to a coarse grid so nearby points share one log table
    if n <= 512:
        step = 64
    else:
        step = 256
    return step * ((n + step - 1) // step)


# Cap on elements of the (points x terms) work matrix per chunk (~60 MB).
_CHUNK_ELEMS = 4_000_000


def _em_batch(s: np.ndarray, N: int, p: EvalParams, want_deriv: bool):
    """Euler-Maclaurin at shared truncation N.

    Valid for Re s > -1 away from s = 1; callers route points with
    Re s < 0 and |s| > 1/2 through the functional equation instead.
    Returns (zeta, deriv_or_None, value_bound, deriv_bound_or_None);
    the bounds track the truncated correction tail only.
    """
    n = np.arange(1.0, float(N))
    logn = np.log(n)
    z = np.empty(s.shape, dtype=np.complex128)
    dz = np.empty(s.shape, dtype=np.complex128) if want_deriv else None
    rbz = np.empty(s.shape, dtype=np.float64)
    rbd = np.empty(s.shape, dtype=np.float64) if want_deriv else None

    logN = float(np.log(N))
    step = max(1, _CHUNK_ELEMS // N)
    for lo in range(0, s.size, step):
        sl = slice(lo, lo + step)
        sb = s[sl]
        E = np.exp(np.multiply.outer(-sb, logn))
        main = E.sum(axis=1)
        dmain = -(E * logn).sum(axis=1) if want_deriv else None
        del E

        sm1 = sb - 1.0
        Ns = np.exp(-sb * logN)              # N^-s
        Npow = Ns * N                        # N^(1-s)
        bpole = Npow / sm1

        # Correction tail: T_k = C_k * P_k * N^-s with the scaled rising
        # factorial P_k = (s)_{2k-1} N^(1-2k); g_k = dP_k/ds carried as its
        # own recurrence so s = 0 stays finite. g and the stopping rule are
        # maintained whether or not the caller wants the derivative, which
        # keeps the zeta output bit-identical between the two modes.
        P = sb / N
        g = np.full(sb.shape, 1.0 / N, dtype=np.complex128)
        tP = np.zeros_like(sb)
        tg = np.zeros_like(sb)
        invN2 = 1.0 / (N * N)
        kmax = p.bernoulli_order
        cutoff = max(5e-17, 2e-3 * p.target_abs_err)
        k_used = kmax
        absNs = np.abs(Ns)
        for k in range(1, kmax + 1):
            tP += _C[k] * P
            tg += _C[k] * g
            u = (sb + (2 * k - 1)) * (sb + 2 * k) * invN2
            g = g * u + P * (2.0 * sb + (4 * k - 1)) * invN2
            P = P * u
            # everything still to come is bounded by the next term's size
            nxt = abs(_C[k + 1]) * (np.abs(P) * (logN + 1.0) + np.abs(g)) * absNs
            if np.max(nxt) < cutoff:
                k_used = k
                break

        # alternating-envelope remainder bound for the truncated tail
        kk = k_used
        ratio = np.abs(sb + (2 * kk + 1)) / (sb.real + (2 * kk + 1))
        bound = abs(_C[kk + 1]) * np.abs(P) * absNs * ratio

        z[sl] = main + bpole + 0.5 * Ns + Ns * tP
        rbz[sl] = bound
        if want_deriv:
            dz[sl] = (dmain
                      - bpole * (logN + 1.0 / sm1)
                      - 0.5 * logN * Ns
                      + Ns * (tg - logN * tP))
            rbd[sl] = (bound * (logN + 1.0)
                       + abs(_C[kk + 1]) * np.abs(g) * absNs * ratio)
    return z, dz, rbz, rbd


def _em_routed(s: np.ndarray, p: EvalParams, want_deriv: bool):
    """Bucket points by truncation length and run the shared-N batches."""
    z = np.empty(s.shape, dtype=np.complex128)
    dz = np.empty(s.shape, dtype=np.complex128) if want_deriv else None
    rbz = np.empty(s.shape, dtype=np.float64)
    rbd = np.empty(s.shape, dtype=np.float64) if want_deriv else None
    tabs = np.abs(s.imag)
    Nreq = np.array([_em_N(t, p) for t in tabs], dtype=np.int64)
    for Nb in np.unique(Nreq):
        idx = np.nonzero(Nreq == Nb)[0]
        zb, dzb, rbzb, rbdb = _em_batch(s[idx], int(Nb), p, want_deriv)
        z[idx] = zb
        rbz[idx] = rbzb
        if want_deriv:
            dz[idx] = dzb
            rbd[idx] = rbdb
    return z, dz, rbz, rbd


def _zeta_core(s: np.ndarray, p: EvalParams, want_deriv: bool):
    """zeta (and optionally zeta') for validated points, Im s >= 0.

    Points with Re s < 0 and |s| > 1/2 go through the functional equation;
    the rest are summed directly.
    """
    z = np.empty(s.shape, dtype=np.complex128)
    dz = np.empty(s.shape, dtype=np.complex128) if want_deriv else None
    rbz = np.empty(s.shape, dtype=np.float64)
    rbd = np.empty(s.shape, dtype=np.float64) if want_deriv else None

    refl = (s.real < 0.0) & (np.abs(s) > 0.5)
    if np.any(~refl):
        idx = np.nonzero(~refl)[0]
        zb, dzb, rbzb, rbdb = _em_routed(s[idx], p, want_deriv)
        z[idx] = zb
        rbz[idx] = rbzb
        if want_deriv:
            dz[idx] = dzb
            rbd[idx] = rbdb
    if np.any(refl):
        idx = np.nonzero(refl)[0]
        sr = s[idx]
        w = 1.0 - sr                          # Re w > 1
        zw, dzw, rbzw, rbdw = _em_routed(w, p, want_deriv)
        dl = _delta_core(sr)
        z[idx] = dl * zw
        rbz[idx] = rbzw * np.abs(dl)
        if want_deriv:
            ld = _dld_core(sr)
            dz[idx] = dl * (ld * zw - dzw)
            # error in zw enters zeta' through the ld term, error in dzw
            # directly; keeping them separate avoids inflating the value
            # bound by the full (1 + |ld|) factor
            rbd[idx] = np.abs(dl) * (np.abs(ld) * rbzw + rbdw)
    return z, dz, rbz, rbd


def _report_degradation(s: np.ndarray, z: np.ndarray, rbz: np.ndarray,
                        rbd: np.ndarray | None, p: EvalParams) -> None:
    # target_abs_err is an absolute budget for O(1) values; where the
    # functional-equation factor makes |zeta| huge the best achievable is
    # the same budget relative to the value, so scale before comparing.
    if not rbz.size:
        return
    scale = np.maximum(1.0, np.abs(z))
    worst = float(np.max(rbz / scale))
    if rbd is not None:
        worst = max(worst, float(np.max(rbd / scale)))
    if worst > p.target_abs_err:
        tmax = float(np.max(np.abs(s.imag)))
        warnings.warn(
            f"zeta remainder bound {worst:.3e} exceeds target "
            f"{p.target_abs_err:.1e} (|t| up to {tmax:.1f}); "
            "values are returned but degraded",
            stacklevel=3,
        )


def _check_finite(*arrays) -> None:
    for a in arrays:
        if a is not None and not np.all(np.isfinite(a)):
            raise ArithmeticError("non-finite value escaped an evaluation")


def _conj_canonical(s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    flip = s.imag < 0.0
    return np.where(flip, np.conj(s), s), flip


def _conj_restore(v: np.ndarray, flip: np.ndarray) -> np.ndarray:
    return np.where(flip, np.conj(v), v)


def zeta(s, params: EvalParams | None = None):
    """Riemann zeta at s (scalar or array_like of complex)."""
    p = params or DEFAULT_PARAMS
    pts, scalar = _as_points(s)
    _validate_zeta_points(pts)
    up, flip = _conj_canonical(pts)
    z, _, rbz, _ = _zeta_core(up, p, want_deriv=False)
    _report_degradation(pts, z, rbz, None, p)
    _check_finite(z)
    out = _conj_restore(z, flip)
    return complex(out[0]) if scalar else out


def zeta_deriv(s, params: EvalParams | None = None):
    """zeta'(s) (scalar or array_like of complex)."""
    return zeta_and_deriv(s, params)[1]


def zeta_and_deriv(s, params: EvalParams | None = None):
    """(zeta(s), zeta'(s)) in one pass; the pair shares all the heavy work."""
    p = params or DEFAULT_PARAMS
    pts, scalar = _as_points(s)
    _validate_zeta_points(pts)
    up, flip = _conj_canonical(pts)
    z, dz, rbz, rbd = _zeta_core(up, p, want_deriv=True)
    _report_degradation(pts, z, rbz, rbd, p)
    _check_finite(z, dz)
    zo = _conj_restore(z, flip)
    do = _conj_restore(dz, flip)
    if scalar:
        return complex(zo[0]), complex(do[0])
    return zo, do


def log_gamma(s):
    """Principal log Gamma (continuous off the cut along (-inf, 0])."""
    pts, scalar = _as_points(s)
    if not np.all(np.isfinite(pts)):
        raise ValueError("evaluation points must be finite")
    near_int = np.abs(pts - np.round(pts.real)) <= _POLE_RADIUS
    if np.any(near_int & (np.round(pts.real) <= 0.0)):
        raise PoleAtNonpositiveInteger("Gamma has poles at 0, -1, -2, ...")
    out = _loggamma(pts)
    _check_finite(out)
    return complex(out[0]) if scalar else out


def _log_sin_upper(z: np.ndarray) -> np.ndarray:
    """log sin z for Im z >= 0, stable as Im z grows.

    sin z = (i/2) e^{-iz} (1 - e^{2iz}), and |e^{2iz}| <= 1 here.
    """
    return (-LOG_TWO + 0.5j * np.pi) - 1j * z + np.log1p(-np.exp(2j * z))


def _delta_core(s: np.ndarray) -> np.ndarray:
    """delta(s) for Im s >= 0, poles already excluded by the caller."""
    out = np.empty(s.shape, dtype=np.complex128)
    strip = s.imag < 0.35
    if np.any(~strip):
        sb = s[~strip]
        logd = (LOG_TWO + (sb - 1.0) * LOG_TWO_PI
                + _log_sin_upper(0.5 * np.pi * sb)
                + _loggamma(1.0 - sb))
        if np.any(logd.real > 700.0):
            raise RangeExceeded("delta overflows float64 at this point")
        out[~strip] = np.exp(logd)
    if np.any(strip):
        # near the real axis the log-sin/log-gamma split degenerates at the
        # integers, so use whichever product form is regular for the half
        sb = s[strip]
        v = np.empty(sb.shape, dtype=np.complex128)
        leftm = sb.real < 0.75
        if np.any(leftm):
            sl = sb[leftm]
            # regular for Re s < 1: Gamma(1-s) has no pole, sin supplies
            # the trivial zeros at s = 0, -2, -4, ...
            v[leftm] = np.exp((sl - 1.0) * LOG_TWO_PI + _loggamma(1.0 - sl)) \
                * 2.0 * np.sin(0.5 * np.pi * sl)
        if np.any(~leftm):
            sr = sb[~leftm]
            # regular for Re s > 0 away from odd integers
            logd = sr * LOG_TWO_PI - LOG_TWO - _loggamma(sr)
            v[~leftm] = np.exp(logd) / np.cos(0.5 * np.pi * sr)
        out[strip] = v
    return out


def _dld_core(s: np.ndarray) -> np.ndarray:
    """delta'(s)/delta(s) for Im s >= 0, singular set already excluded.

    Two algebraically identical forms, chosen per half plane so that the
    digamma and the half-angle trig term are each evaluated away from
    their poles:

        Re s <= 1/2:  log 2pi + (pi/2) cot(pi s/2) - psi(1 - s)
        Re s >  1/2:  log 2pi + (pi/2) tan(pi s/2) - psi(s)
    """
    out = np.empty(s.shape, dtype=np.complex128)
    w = np.exp(1j * np.pi * s)               # e^{2i(pi s/2)}, |w| <= 1
    left = s.real <= 0.5
    if np.any(left):
        sl = s[left]
        cot = 1j * (w[left] + 1.0) / (w[left] - 1.0)
        out[left] = LOG_TWO_PI + 0.5 * np.pi * cot - _digamma(1.0 - sl)
    if np.any(~left):
        sr = s[~left]
        tan = -1j * (w[~left] - 1.0) / (w[~left] + 1.0)
        out[~left] = LOG_TWO_PI + 0.5 * np.pi * tan - _digamma(sr)
    return out


def _validate_delta_points(s: np.ndarray) -> None:
    if not np.all(np.isfinite(s)):
        raise ValueError("evaluation points must be finite")
    if np.any(np.abs(s.imag) > T_LIMIT):
        raise RangeExceeded(f"|Im s| beyond supported range {T_LIMIT:g}")
    m = np.round(s.real)
    dist = np.abs(s - m)
    odd_pole = (m >= 1.0) & (np.mod(m, 2.0) == 1.0) & (dist <= _ODD_POLE_RADIUS)
    if np.any(odd_pole):
        raise PoleAtOddInteger("delta has poles at s = 1, 3, 5, ...")


def delta(s, params: EvalParams | None = None):
    """Functional-equation factor delta(s) = zeta(s)/zeta(1-s).

    delta(s) = 2 (2 pi)^(s-1) sin(pi s/2) Gamma(1-s); computed in log space
    so |t| in the thousands stays finite. Poles at s = 1, 3, 5, ... raise
    PoleAtOddInteger.
    """
    del params
    pts, scalar = _as_points(s)
    _validate_delta_points(pts)
    up, flip = _conj_canonical(pts)
    v = _delta_core(up)
    _check_finite(v)
    out = _conj_restore(v, flip)
    return complex(out[0]) if scalar else out


def delta_log_deriv(s, params: EvalParams | None = None):
    """delta'(s)/delta(s).

    Singular exactly where delta has a zero or pole: s in {1, 3, 5, ...}
    (poles) and {0, -2, -4, ...} (trivial zeros). Points within 1e-6 of
    that set raise NearSingularity.
    """
    del params
    pts, scalar = _as_points(s)
    if not np.all(np.isfinite(pts)):
        raise ValueError("evaluation points must be finite")
    if np.any(np.abs(pts.imag) > T_LIMIT):
        raise RangeExceeded(f"|Im s| beyond supported range {T_LIMIT:g}")
    m = np.round(pts.real)
    dist = np.abs(pts - m)
    singular = ((m >= 1.0) & (np.mod(m, 2.0) == 1.0)     # poles of delta
                | (m <= 0.0) & (np.mod(m, 2.0) == 0.0))  # zeros of delta
    if np.any(singular & (dist <= _SINGULAR_RADIUS)):
        raise NearSingularity(
            "delta'/delta is singular at odd positive and even nonpositive integers")
    up, flip = _conj_canonical(pts)
    v = _dld_core(up)
    _check_finite(v)
    out = _conj_restore(v, flip)
    return complex(out[0]) if scalar else out
