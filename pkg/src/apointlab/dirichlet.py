"""Integer-side arithmetic: von Mangoldt sieve, Chebyshev psi, Dirichlet
series convolution and inversion, generalized von Mangoldt coefficients,
ordered-factorization counts, and abscissa estimates.

Series are truncated at a fixed length N; every operation is exact
arithmetic on coefficient tables (float rounding only), no analytic
smoothing anywhere.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np

from .errors import (
    ACaseOne,
    ACaseZero,
    LengthMismatch,
    ZeroLeadingCoefficient,
)

__all__ = [
    "DirichletSeries",
    "AbscissaEstimate",
    "lambda_sieve",
    "psi",
    "dirichlet_product",
    "dirichlet_inverse",
    "lambda_a",
    "dk_star",
    "reciprocal_via_dkstar",
    "sigma_star",
    "b_a_estimate",
    "LengthMismatch",
    "ZeroLeadingCoefficient",
    "ACaseOne",
    "ACaseZero",
]

_A_TOL = 1e-12           # refusal radius around the degenerate cases a=0, a=1
_SIGMA_STAR_MAX_TARGET = 1e3


class DirichletSeries:
    """Coefficients c_n of an ordinary Dirichlet series, n = 1..N.

    Internally padded with an unused slot at index 0 so that values[n]
    is the coefficient of n^(-s). `coeffs` exposes the 1-based sequence
    (coeffs[0] belongs to n=1).
    """

    __slots__ = ("values",)

    def __init__(self, values: np.ndarray):
        v = np.asarray(values, dtype=np.complex128)
        if v.ndim != 1 or v.size < 2:
            raise ValueError("need a padded coefficient array of length N+1 >= 2")
        self.values = v
        self.values[0] = 0.0

    @classmethod
    def from_coeffs(cls, coeffs) -> "DirichletSeries":
        c = np.asarray(coeffs, dtype=np.complex128)
        if c.ndim != 1 or c.size < 1:
            raise ValueError("need at least the n=1 coefficient")
        return cls(np.concatenate([[0.0], c]))

    @classmethod
    def identity(cls, N: int) -> "DirichletSeries":
        v = np.zeros(N + 1, dtype=np.complex128)
        v[1] = 1.0
        return cls(v)

    @classmethod
    def zeta_coeffs(cls, N: int) -> "DirichletSeries":
        v = np.ones(N + 1, dtype=np.complex128)
        v[0] = 0.0
        return cls(v)

    @classmethod
    def zeta_deriv_coeffs(cls, N: int) -> "DirichletSeries":
        v = np.zeros(N + 1, dtype=np.complex128)
        n = np.arange(1, N + 1, dtype=np.float64)
        v[1:] = -np.log(n)
        return cls(v)

    @classmethod
    def zeta_minus_a(cls, N: int, a: complex) -> "DirichletSeries":
        v = np.ones(N + 1, dtype=np.complex128)
        v[0] = 0.0
        v[1] = 1.0 - complex(a)
        return cls(v)

    @property
    def coeffs(self) -> np.ndarray:
        return self.values[1:]

    def __len__(self) -> int:
        return self.values.size - 1

    def __getitem__(self, n: int) -> complex:
        if not 1 <= n <= len(self):
            raise IndexError(f"coefficient index {n} outside 1..{len(self)}")
        return complex(self.values[n])

    def partial_sum(self, s: complex, upto: int | None = None) -> complex:
        """sum_{n <= upto} c_n n^(-s), exact truncation, fixed order."""
        N = len(self) if upto is None else min(int(upto), len(self))
        if N < 1:
            return 0.0 + 0.0j
        n = np.arange(1, N + 1, dtype=np.float64)
        terms = self.values[1:N + 1] * np.exp(-complex(s) * np.log(n))
        return complex(math.fsum(terms.real), math.fsum(terms.imag))


@dataclass(frozen=True)
class AbscissaEstimate:
    """Bracket for the convergence abscissa of the a-point Dirichlet series.

    lower: empirical sup of located root real parts; upper and
    absolute_upper: the sigma_star bound (convergence cannot fail to the
    right of it); provably_equal: set for real a > 1 where lower and
    upper are known to coincide exactly.
    """

    lower: float
    upper: float
    absolute_upper: float
    provably_equal: bool = False

    def __post_init__(self):
        if self.lower > self.upper + 1e-12:
            raise ValueError("abscissa bracket inverted: lower > upper")


def lambda_sieve(N: int) -> DirichletSeries:
    """Von Mangoldt coefficients: log p at n = p^k, else 0."""
    if N < 1:
        raise ValueError("N must be >= 1")
    lam = np.zeros(N + 1, dtype=np.float64)
    if N >= 2:
        flags = np.ones(N + 1, dtype=bool)
        flags[:2] = False
        for i in range(2, math.isqrt(N) + 1):
            if flags[i]:
                flags[i * i::i] = False
        primes = np.nonzero(flags)[0]
        lam[primes] = np.log(primes.astype(np.float64))
        for q in primes[primes <= math.isqrt(N)]:
            logq = math.log(q)
            pk = int(q) * int(q)
            while pk <= N:
                lam[pk] = logq
                pk *= int(q)
    return DirichletSeries(lam.astype(np.complex128))


# psi cache: cumulative sums of the sieve, grown on demand, shared read-only
_psi_lock = threading.Lock()
_psi_cumsum = np.zeros(1, dtype=np.float64)


def psi(x: float) -> float:
    """Chebyshev psi(x) = sum of Lambda(n) for n <= x; exact partial sum."""
    if not x >= 0.0:
        raise ValueError("psi needs x >= 0")
    n = int(math.floor(x))
    if n < 2:
        return 0.0
    global _psi_cumsum
    if n >= _psi_cumsum.size:
        with _psi_lock:
            if n >= _psi_cumsum.size:
                size = max(1024, 1 << (n.bit_length() + 1))
                lam = lambda_sieve(size).values.real
                _psi_cumsum = np.cumsum(lam)
    return float(_psi_cumsum[n])


def _convolve(fv: np.ndarray, gv: np.ndarray) -> np.ndarray:
    """Dirichlet convolution of padded value arrays (index 0 unused)."""
    N = fv.size - 1
    out = np.zeros(N + 1, dtype=np.complex128)
    nz = np.nonzero(fv)[0]
    for d in nz:
        if d == 0:
            continue
        lim = N // d
        out[d::d] += fv[d] * gv[1:lim + 1]
    return out


def dirichlet_product(f: DirichletSeries, g: DirichletSeries) -> DirichletSeries:
    """Coefficientwise Dirichlet convolution (f*g)[n] = sum_{d|n} f[d] g[n/d]."""
    if len(f) != len(g):
        raise LengthMismatch(f"series lengths differ: {len(f)} vs {len(g)}")
    return DirichletSeries(_convolve(f.values, g.values))


def dirichlet_inverse(f: DirichletSeries) -> DirichletSeries:
    """Inverse under Dirichlet convolution, truncated at the same length.

    Geometric (Neumann) series in h = identity - f/f[1]: h has no n=1
    term so h*h*...*h (k factors) vanishes below n = 2^k and the series
    is exact after floor(log2 N) rounds.
    """
    f1 = complex(f.values[1])
    if f1 == 0:
        raise ZeroLeadingCoefficient(
            "series has no n=1 coefficient; its reciprocal is not an "
            "ordinary Dirichlet series (the a = 1 degeneracy)")
    N = len(f)
    h = -(f.values / f1)
    h[0] = 0.0
    h[1] = 0.0
    acc = np.zeros(N + 1, dtype=np.complex128)
    acc[1] = 1.0
    total = acc.copy()
    for _ in range(max(1, int(math.log2(max(N, 2))) + 1)):
        acc = _convolve(acc, h)
        if not acc.any():
            break
        total += acc
    return DirichletSeries(total / f1)


def lambda_a(N: int, a: complex) -> DirichletSeries:
    """Coefficients of zeta'(s)/(zeta(s) - a) as a Dirichlet series.

    For a = 0 this is exactly -Lambda(n), taken from the sieve so the
    sign identity holds without roundoff; for general a != 1 it is the
    convolution of the zeta' coefficients (-log n) with the inverse of
    the (zeta - a) coefficients.
    """
    a = complex(a)
    if abs(a - 1.0) < _A_TOL:
        raise ACaseOne("the a = 1 series has no n=1 term; not supported")
    if a == 0:
        return DirichletSeries(-lambda_sieve(N).values)
    inv = dirichlet_inverse(DirichletSeries.zeta_minus_a(N, a))
    return dirichlet_product(DirichletSeries.zeta_deriv_coeffs(N), inv)


def dk_star(N: int, K: int) -> np.ndarray:
    """Table of ordered factorizations into factors > 1.

    Returns an int64 array of shape (K+1, N+1); entry [k][n] counts the
    ordered ways to write n as a product of exactly k factors, all > 1.
    Row 0 is the convolution identity. Column 0 is unused padding.
    """
    if N < 1 or K < 0:
        raise ValueError("need N >= 1 and K >= 0")
    table = np.zeros((K + 1, N + 1), dtype=np.int64)
    table[0, 1] = 1
    for k in range(1, K + 1):
        prev = table[k - 1]
        cur = table[k]
        for d in range(2, N + 1):
            lim = N // d
            cur[d::d] += prev[1:lim + 1]
    return table


def reciprocal_via_dkstar(N: int, a: complex, K: int) -> DirichletSeries:
    """Coefficients of 1/(zeta(s) - a) from the factorization expansion.

    coeffs[n] = -sum_{k <= K} d_k*(n) / (a-1)^(k+1). Exact once
    K >= log2(N) since d_k*(n) = 0 for k > log2(n).
    """
    a = complex(a)
    if abs(a - 1.0) < _A_TOL:
        raise ACaseOne("expansion is in powers of 1/(a-1); undefined at a = 1")
    table = dk_star(N, K)
    out = np.zeros(N + 1, dtype=np.complex128)
    w = 1.0 / (a - 1.0)
    factor = w
    for k in range(K + 1):
        out -= factor * table[k]
        factor *= w
    out[0] = 0.0
    return DirichletSeries(out)


def sigma_star(a: complex) -> float:
    """The unique sigma > 1 with zeta(sigma) - 1 = |a - 1|.

    Plain bisection on the strictly decreasing map sigma -> zeta(sigma)-1.
    To the right of sigma_star the series zeta(s) - a is bounded away
    from zero, so no roots live there.
    """
    from . import complexfn as cf

    a = complex(a)
    target = abs(a - 1.0)
    if target < _A_TOL:
        raise ACaseOne("sigma_star undefined at a = 1")
    if target > _SIGMA_STAR_MAX_TARGET:
        raise ValueError(
            f"|a-1| = {target:.3g} outside supported range (residual "
            "guarantee breaks near the pole)")

    def gap(sigma: float) -> float:
        return cf.zeta(complex(sigma)).real - 1.0 - target

    lo = 1.0 + 1e-9
    hi = 2.0
    while gap(hi) > 0.0:
        hi *= 2.0
        if hi > 128.0:
            raise ArithmeticError("sigma_star bracket search ran away")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if gap(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def b_a_estimate(a: complex, apts) -> AbscissaEstimate:
    """Bracket the convergence abscissa of sum Lambda_a(n) n^(-s).

    lower is the empirical sup of located root real parts (0 when none
    are supplied), upper and absolute_upper the sigma_star bound. For
    real a > 1 the bracket provably collapses: convergence fails at
    sigma_star itself, so the flag is set.
    """
    a = complex(a)
    if abs(a) < _A_TOL:
        raise ACaseZero("b_0 is the classical case; estimate not defined here")
    if abs(a - 1.0) < _A_TOL:
        raise ACaseOne("no Dirichlet series at a = 1")
    ss = sigma_star(a)
    lower = 0.0
    for pt in apts:
        lower = max(lower, float(pt.beta))
    return AbscissaEstimate(
        lower=lower,
        upper=ss,
        absolute_upper=ss,
        provably_equal=(a.imag == 0.0 and a.real > 1.0),
    )
