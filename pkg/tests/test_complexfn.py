"""Evaluation-core tests.

Expected values marked "oracle" below were computed once with mpmath
(v1.3.0, dps=30; the large-t delta pair at dps=40) and frozen. mpmath is
an arbitrary-precision implementation sharing no code with this package,
so these are independent cross-checks, not round-trips. Closed forms
(pi^2/6 and friends) are asserted directly.
"""

import math

import numpy as np
import pytest

from apointlab import complexfn as cf
from apointlab.complexfn import (
    EvalParams,
    NearSingularity,
    PoleAtNonpositiveInteger,
    PoleAtOddInteger,
    PoleAtOne,
    RangeExceeded,
    delta,
    delta_log_deriv,
    log_gamma,
    zeta,
    zeta_and_deriv,
    zeta_deriv,
)

# mpmath oracle: zeta at scattered points of the working range
ZETA_ORACLE = [
    (0.5 + 25j, complex(0.0049845933640356754, -0.014012301962583383)),
    (2 + 100j, complex(1.190780408775217, -0.053890959354260458)),
    (0.1 + 700j, complex(-4.3320877910643316, -2.4582628429366893)),
    (1.5 + 1500j, complex(0.62457174349155797, -0.20020574709061771)),
    (-2.5 + 30j, complex(-104.12779822104208, 16.692591553446933)),
    (3.5 + 0.1j, complex(1.1261433591057394, -0.011286567624188876)),
    (0.25 + 3j, complex(0.48529811855785337, -0.058985755815927158)),
]

# mpmath oracle: zeta'
ZETA_DERIV_ORACLE = [
    (0.5 + 25j, complex(1.2852719698398148, 0.46810887095363083)),
    (2 + 100j, complex(-0.1563455855448513, 0.029333617539996342)),
    (0.1 + 700j, complex(24.053057316114853, 7.1743186238065473)),
    (-1.5 + 12j, complex(-1.5179226843230497, 1.7758032736285938)),
    (2 + 0j, complex(-0.93754825431584375, 0.0)),
]

# mpmath oracle: delta via the ratio zeta(s)/zeta(1-s), i.e. through the
# functional equation itself rather than any gamma-product formula
DELTA_ORACLE_RATIO = [
    (0.3 + 40j, complex(-0.38416086166997728, -1.3961297012706955)),
    (-1.2 + 300j, complex(-172.72410448230827, 693.65057917004986)),
    (0.5 + 9.5j, complex(0.99752406228651629, 0.070325992061302403)),
    (1.8 + 0.2j, complex(-14.513310052949806, -3.1139932211406725)),
]

# mpmath oracle: delta at large t (gamma formula, dps=40)
DELTA_ORACLE_LARGE_T = [
    (0.5 + 1000j, complex(-0.74492782487880573, 0.66714506347670095)),
    (-0.3 + 1500j, complex(-17.169976834217786, -77.992346503160598)),
]

# mpmath oracle: delta'/delta via zeta'(s)/zeta(s) + zeta'(1-s)/zeta(1-s)
DLD_ORACLE = [
    (0.5 - 200j, complex(-3.4604392584674672, 0.0)),
    (0.3 + 40j, complex(-1.8509888449861864, -0.0050002187945918444)),
    (2.5 + 15j, complex(-0.87880822102850478, 0.13259927546583737)),
    (-3.3 + 7j, complex(-0.23681317643640589, -0.49789514811642855)),
]


class TestZeta:
    def test_closed_forms(self):
        assert zeta(2.0) == pytest.approx(np.pi**2 / 6, abs=1e-13)
        assert zeta(4.0) == pytest.approx(np.pi**4 / 90, abs=1e-13)
        assert zeta(0.0) == pytest.approx(-0.5, abs=1e-14)
        assert zeta(-1.0) == pytest.approx(-1.0 / 12.0, abs=1e-13)
        assert zeta(-3.0) == pytest.approx(1.0 / 120.0, abs=1e-13)

    def test_trivial_zeros(self):
        for s in (-2.0, -4.0, -6.0, -8.0):
            assert abs(zeta(s)) < 1e-13

    def test_matches_plain_series_at_high_sigma(self):
        # independent route: the defining Dirichlet sum, no acceleration
        s = 8.0 + 5.0j
        n = np.arange(1, 200_000, dtype=np.float64)
        direct = np.sum(n ** (-8.0) * np.exp(-5.0j * np.log(n)))
        assert zeta(s) == pytest.approx(direct, abs=1e-12)

    def test_oracle_points(self):
        for s, want in ZETA_ORACLE:
            got = zeta(s)
            assert got == pytest.approx(want, abs=5e-11), s

    def test_array_shape_and_scalar_type(self):
        pts = np.array([2.0 + 0j, 0.5 + 25j])
        out = zeta(pts)
        assert out.shape == pts.shape and out.dtype == np.complex128
        assert isinstance(zeta(2.0), complex)

    def test_conjugate_symmetry_is_exact(self):
        rng = np.random.default_rng(11)
        s = rng.uniform(-2, 3, 40) + 1j * rng.uniform(0.5, 1200, 40)
        assert np.array_equal(zeta(np.conj(s)), np.conj(zeta(s)))
        z1, d1 = zeta_and_deriv(np.conj(s))
        z2, d2 = zeta_and_deriv(s)
        assert np.array_equal(z1, np.conj(z2))
        assert np.array_equal(d1, np.conj(d2))

    def test_pole_and_range_errors(self):
        with pytest.raises(PoleAtOne):
            zeta(1.0)
        with pytest.raises(PoleAtOne):
            zeta(1.0 + 1e-13j)
        with pytest.raises(RangeExceeded):
            zeta(0.5 + 2e4j)
        with pytest.raises(ValueError):
            zeta(complex(np.nan, 1.0))

    def test_degradation_is_warned_not_silent(self):
        weak = EvalParams(bernoulli_order=2, target_abs_err=1e-10)
        with pytest.warns(UserWarning, match="remainder bound"):
            zeta(0.2 + 1800j, params=weak)


class TestZetaDeriv:
    def test_closed_form_at_zero(self):
        # zeta'(0) = -log(2 pi)/2
        assert zeta_deriv(0.0) == pytest.approx(-0.5 * np.log(2 * np.pi), abs=1e-12)

    def test_oracle_points(self):
        for s, want in ZETA_DERIV_ORACLE:
            assert zeta_deriv(s) == pytest.approx(want, abs=5e-10), s

    def test_against_central_difference(self):
        # five-point stencil on zeta itself: consistency of the two routes
        h = 1e-3
        for s in (0.5 + 21j, 2.2 + 77j, -0.7 + 33j):
            st = np.array([s - 2 * h, s - h, s + h, s + 2 * h])
            z = zeta(st)
            fd = (z[0] - 8 * z[1] + 8 * z[2] - z[3]) / (12 * h)
            assert zeta_deriv(s) == pytest.approx(fd, abs=5e-9), s

    def test_pair_matches_separate_calls(self):
        s = np.array([0.5 + 25j, 1.5 + 400j, -1.0 + 9j])
        z, d = zeta_and_deriv(s)
        assert np.array_equal(z, zeta(s))
        assert np.array_equal(d, zeta_deriv(s))


class TestLogGamma:
    def test_matches_factorials(self):
        for n in range(1, 8):
            assert log_gamma(float(n + 1)) == pytest.approx(
                np.log(float(math.factorial(n))), abs=1e-12)

    def test_reflection_closed_form(self):
        # Gamma(1/2) = sqrt(pi)
        assert log_gamma(0.5) == pytest.approx(0.5 * np.log(np.pi), abs=1e-13)

    def test_pole_error(self):
        for s in (0.0, -1.0, -5.0):
            with pytest.raises(PoleAtNonpositiveInteger):
                log_gamma(s)

    def test_vertical_continuity(self):
        # principal branch: continuous along Re s = -1.5 off the real axis
        t = np.linspace(0.1, 30, 500)
        v = log_gamma(-1.5 + 1j * t)
        steps = np.abs(np.diff(v))
        assert steps.max() < 1.0


class TestDelta:
    def test_closed_forms(self):
        assert delta(-1.0) == pytest.approx(-1.0 / (2 * np.pi**2), abs=1e-14)
        assert delta(2.0) == pytest.approx(-2.0 * np.pi**2, abs=1e-10)
        assert delta(0.5) == pytest.approx(1.0, abs=1e-13)

    def test_oracle_via_functional_equation_ratio(self):
        for s, want in DELTA_ORACLE_RATIO:
            assert delta(s) == pytest.approx(want, rel=1e-11), s

    def test_oracle_large_t(self):
        for s, want in DELTA_ORACLE_LARGE_T:
            assert delta(s) == pytest.approx(want, rel=1e-11), s

    def test_unit_modulus_on_critical_line(self):
        t = np.linspace(0.5, 1900, 700)
        mod = np.abs(delta(0.5 + 1j * t))
        assert np.max(np.abs(mod - 1.0)) < 1e-10

    def test_modulus_growth_rate(self):
        # |delta(sigma+it)| = (t/2pi)^(1/2-sigma) (1 + O(1/t))
        for sigma in (-0.5, 0.0, 0.25, 0.75, 1.5):
            t = np.linspace(40, 1500, 90)
            mod = np.abs(delta(sigma + 1j * t))
            predicted = (t / (2 * np.pi)) ** (0.5 - sigma)
            assert np.max(np.abs(mod / predicted - 1.0)) < 0.01, sigma

    def test_reciprocal_symmetry(self):
        # delta(s) * delta(1-s) = 1
        rng = np.random.default_rng(3)
        s = rng.uniform(-2, 3, 30) + 1j * rng.uniform(0.4, 900, 30)
        prod = delta(s) * delta(1 - s)
        assert np.max(np.abs(prod - 1.0)) < 1e-10

    def test_functional_equation_residual(self):
        rng = np.random.default_rng(5)
        s = rng.uniform(0.0, 1.0, 60) + 1j * rng.uniform(0.5, 1500, 60)
        r = zeta(s) - delta(s) * zeta(1 - s)
        assert np.max(np.abs(r)) < 1e-9

    def test_pole_errors(self):
        for s in (1.0, 3.0, 5.0, 3.0 + 1e-9j):
            with pytest.raises(PoleAtOddInteger):
                delta(s)

    def test_regular_just_off_poles(self):
        # within range but outside the refusal radius: finite and large
        v = delta(3.0 + 1e-6j)
        assert np.isfinite(v.real) and np.isfinite(v.imag)
        assert abs(v) > 1e4

    def test_axis_strip_seam_continuity(self):
        # the evaluation switches formula at |Im s| = 0.35
        for sigma in (-1.3, 0.2, 0.9, 2.4):
            below = delta(sigma + (0.35 - 1e-9) * 1j)
            above = delta(sigma + (0.35 + 1e-9) * 1j)
            assert below == pytest.approx(above, rel=1e-7), sigma


class TestDeltaLogDeriv:
    def test_large_t_main_term(self):
        # -log(t/2pi) + error < 0.01 at s = 0.5 - 200i
        got = delta_log_deriv(0.5 - 200j)
        assert abs(got - (-np.log(200 / (2 * np.pi)))) < 0.01

    def test_oracle_points(self):
        for s, want in DLD_ORACLE:
            assert delta_log_deriv(s) == pytest.approx(want, abs=1e-10), s

    def test_against_log_difference(self):
        # independent route: centered difference of log delta
        h = 1e-5
        for s in (0.3 + 12j, 1.7 + 48j, -2.2 + 5j):
            fd = (np.log(delta(s + h)) - np.log(delta(s - h))) / (2 * h)
            assert delta_log_deriv(s) == pytest.approx(fd, abs=1e-8), s

    def test_half_plane_form_seam(self):
        t = np.linspace(0.7, 300, 41)
        a = delta_log_deriv(0.5 - 1e-9 + 1j * t)
        b = delta_log_deriv(0.5 + 1e-9 + 1j * t)
        assert np.max(np.abs(a - b)) < 1e-6

    def test_singularity_guard(self):
        for s in (1.0, 3.0, 0.0, -2.0, -4.0, 3.0 + 5e-7j, -2.0 + 1e-8j):
            with pytest.raises(NearSingularity):
                delta_log_deriv(s)

    def test_regular_at_positive_even_integers(self):
        # delta is finite and nonzero at s = 2, so the log-derivative exists
        v = delta_log_deriv(2.0)
        fd = (np.log(delta(2 + 1e-6)) - np.log(delta(2 - 1e-6))) / 2e-6
        assert v == pytest.approx(fd, abs=1e-6)

    def test_conjugate_symmetry(self):
        s = np.array([0.3 + 40j, 2.5 + 15j, -3.3 + 7j])
        assert np.array_equal(delta_log_deriv(np.conj(s)),
                              np.conj(delta_log_deriv(s)))


class TestEvalParams:
    def test_defaults(self):
        p = EvalParams()
        assert p.em_cutoff == 32
        assert p.bernoulli_order == 24
        assert p.target_abs_err == 1e-10
        assert p.quadrature_panel == 8

    def test_validation(self):
        with pytest.raises(ValueError):
            EvalParams(em_cutoff=2)
        with pytest.raises(ValueError):
            EvalParams(bernoulli_order=0)
        with pytest.raises(ValueError):
            EvalParams(target_abs_err=0.5)
        with pytest.raises(ValueError):
            EvalParams(quadrature_panel=1)

    def test_cache_key_distinguishes(self):
        assert EvalParams().cache_key() != EvalParams(em_cutoff=48).cache_key()
