"""Harness-level checks: sums against main terms, quadratures against
residue/coefficient sums, report assembly and serialization.

Expected values marked "oracle" were computed once with mpmath (v1.3.0,
dps=40 for the segment integrals, dps=25 for the zero sum) and frozen.
Most other assertions are identities (Cauchy's theorem, reflection at a
root, exact coefficient sums) where the two sides travel disjoint code
paths, so no external value is needed.
"""

import json
import math
import random

import numpy as np
import pytest

from apointlab import verify as vf
from apointlab.apoints import SearchWindow, contour_window, find_apoints
from apointlab.dirichlet import DirichletSeries, lambda_a, lambda_sieve, psi
from apointlab.errors import (
    ACaseOne,
    ACaseZero,
    InsufficientCoefficients,
    InsufficientPoints,
    SampleTooCloseToAPoint,
    SeriesTooShort,
    TooSmallT,
)

TWO_PI = 2.0 * math.pi

# mpmath oracle: (1/2pi i) int_{0.6+i}^{0.6+30i} (d/ds)^m delta(1-s) 2^(-s) ds,
# the single-coefficient segment integral at both derivative orders.
GONEK_SINGLE_M0 = complex(1.1723814081207432597, 0.0072461313913922651803)
GONEK_SINGLE_M1 = complex(0.85909905149218413389, -0.030224479318347180793)

# mpmath oracle: sum of delta over the 29 zeta zeros with gamma < 100
SUM_DELTA_ZEROS_100 = complex(-13.686949606836434261, 0.037245729951875425431)


def single_coeff_series(n: int, length: int = 8) -> DirichletSeries:
    v = np.zeros(length + 1, dtype=np.complex128)
    v[n] = 1.0
    return DirichletSeries(v)


@pytest.fixture(scope="module")
def a2_300():
    return find_apoints(2 + 0j, 300.0)


@pytest.fixture(scope="module")
def sample_report(zero_table):
    return vf.thm2_report(0j, [100.0, 200.0, 400.0], points=zero_table)


class TestThm2Sum:
    def test_empty_below_first_zero(self):
        assert vf.thm2_sum(0j, 10.0) == 0j

    def test_zero_sum_against_oracle(self, zero_table):
        # table ordinates carry 9 decimals, so ~1e-9 noise is inherent
        got = vf.thm2_sum(0j, 100.0, points=zero_table)
        assert abs(got - SUM_DELTA_ZEROS_100) < 5e-9

    def test_zero_sum_oracle_fresh_search(self, zeros_100):
        got = vf.thm2_sum(0j, 100.0, points=zeros_100)
        assert abs(got - SUM_DELTA_ZEROS_100) < 1e-10

    def test_order_independent(self, zero_table):
        straight = vf.thm2_sum(0j, 400.0, points=zero_table)
        shuffled = list(zero_table)
        random.Random(11).shuffle(shuffled)
        # fsum is exactly rounded, so even a shuffled list must agree bitwise
        assert vf.thm2_sum(0j, 400.0, points=shuffled,
                           points_t_max=2000.0) == straight

    def test_coverage_guard(self, zero_table):
        with pytest.raises(InsufficientPoints):
            vf.thm2_sum(0j, 2100.0, points=zero_table)

    def test_explicit_coverage_override(self, zero_table):
        # caller vouches for coverage; selection still uses gamma < T
        a = vf.thm2_sum(0j, 1999.0, points=zero_table)
        b = vf.thm2_sum(0j, 1999.0, points=zero_table, points_t_max=2050.0)
        assert a == b

    def test_fresh_search_matches_table(self, zero_table, zeros_100):
        assert abs(vf.thm2_sum(0j, 100.0, points=zeros_100)
                   - vf.thm2_sum(0j, 100.0, points=zero_table)) < 1e-8


class TestThm2Main:
    def test_rejects_small_t(self):
        with pytest.raises(TooSmallT):
            vf.thm2_main(0j, 17.0)

    def test_accepts_just_above(self):
        vf.thm2_main(0j, 17.1)

    def test_modes_differ_by_psi_minus_x(self):
        T = 300.0
        x = T / TWO_PI
        gap = vf.thm2_main(2 + 0j, T, "psi") - vf.thm2_main(2 + 0j, T, "rh")
        assert abs(gap - (x - psi(x))) < 1e-12

    def test_a_zero_main_is_minus_psi(self):
        T = 200.0
        assert vf.thm2_main(0j, T, "psi") == -psi(T / TWO_PI)

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            vf.thm2_main(0j, 100.0, "exact")


class TestThm2Report:
    def test_rows_track_main_term(self, zero_table):
        rep = vf.thm2_report(0j, [200.0, 500.0, 1000.0, 2000.0],
                             points=zero_table)
        for row in rep.rows:
            # residual lives on the sqrt(T) scale, main on T log T
            assert row.residual_abs < 1.5 * math.sqrt(row.T)
            assert row.residual_abs < 0.1 * abs(row.main)

    def test_fitted_exponent_sublinear(self, zero_table):
        rep = vf.thm2_report(0j, [200.0, 500.0, 1000.0, 1500.0, 2000.0],
                             points=zero_table)
        assert rep.fitted_exponent < 0.8

    def test_exponent_matches_manual_fit(self, zero_table):
        rep = vf.thm2_report(0j, [100.0, 300.0, 900.0], points=zero_table)
        xs = np.log([r.T for r in rep.rows])
        ys = np.log([r.residual_abs for r in rep.rows])
        slope = np.polyfit(xs, ys, 1)[0]
        assert abs(rep.fitted_exponent - slope) < 1e-9

    def test_grid_too_short(self, zero_table):
        with pytest.raises(ValueError):
            vf.thm2_report(0j, [100.0, 200.0], points=zero_table)

    def test_grid_not_ascending(self, zero_table):
        with pytest.raises(ValueError):
            vf.thm2_report(0j, [300.0, 200.0, 400.0], points=zero_table)
        with pytest.raises(ValueError):
            vf.thm2_report(0j, [200.0, 200.0, 400.0], points=zero_table)

    def test_worker_count_does_not_change_bytes(self, zero_table):
        grid = [150.0, 450.0, 1100.0, 1900.0]
        solo = vf.thm2_report(0j, grid, points=zero_table, workers=1)
        pooled = vf.thm2_report(0j, grid, points=zero_table, workers=4)
        assert vf.report_to_json(solo) == vf.report_to_json(pooled)
        assert vf.report_to_csv(solo) == vf.report_to_csv(pooled)

    def test_notes_carry_mode(self, zero_table):
        rep = vf.thm2_report(0j, [100.0, 200.0, 300.0], mode="rh",
                             points=zero_table)
        assert "mode=rh" in rep.notes


class TestThm1Identity:
    def test_defect_is_evaluation_noise(self, apoints_a2_100):
        d = vf.thm1_identity_check(2 + 0j, 100.0, points=apoints_a2_100)
        assert d < 1e-9

    def test_rejects_a_zero(self, zeros_100):
        with pytest.raises(ACaseZero):
            vf.thm1_identity_check(0j, 100.0, points=zeros_100)

    def test_empty_range(self, apoints_a2_100):
        assert vf.thm1_identity_check(2 + 0j, 5.0, points=apoints_a2_100) == 0.0


class TestThm1ReflectedSum:
    def test_forms_agree(self, apoints_a2_100):
        sd = vf.thm1_reflected_sum(2 + 0j, 100.0, "delta",
                                   points=apoints_a2_100)
        sz = vf.thm1_reflected_sum(2 + 0j, 100.0, "zeta",
                                   points=apoints_a2_100)
        assert abs(sd - sz) < 1e-6

    def test_complex_a_forms_agree(self):
        pts = find_apoints(1j, 60.0)
        sd = vf.thm1_reflected_sum(1j, 60.0, "delta", points=pts)
        sz = vf.thm1_reflected_sum(1j, 60.0, "zeta", points=pts)
        assert abs(sd - sz) < 1e-6

    def test_bad_form(self, apoints_a2_100):
        with pytest.raises(ValueError):
            vf.thm1_reflected_sum(2 + 0j, 100.0, "chi", points=apoints_a2_100)

    def test_rejects_a_zero(self):
        with pytest.raises(ACaseZero):
            vf.thm1_reflected_sum(0j, 100.0)


class TestThm1Growth:
    def test_main_equals_coefficient_partial_sums(self, a2_300):
        grid = [60.0, 150.0, 300.0]
        coeffs = lambda_a(64, 2 + 0j)
        rep = vf.thm1_growth(2 + 0j, grid, coeffs=coeffs, points=a2_300)
        for row in rep.rows:
            # partial_sum at s=0 is the plain coefficient sum, separate path
            want = coeffs.partial_sum(0.0, upto=int(row.T / TWO_PI))
            assert abs(row.main - want) < 1e-10

    def test_lhs_tracks_main(self, a2_300):
        rep = vf.thm1_growth(2 + 0j, [60.0, 150.0, 300.0], points=a2_300)
        for row in rep.rows:
            assert row.residual_abs < 0.25 * abs(row.main)

    def test_short_coefficients_rejected(self, a2_300):
        with pytest.raises(InsufficientCoefficients):
            vf.thm1_growth(2 + 0j, [60.0, 150.0, 300.0],
                           coeffs=lambda_a(20, 2 + 0j), points=a2_300)

    def test_degenerate_a(self):
        with pytest.raises(ACaseZero):
            vf.thm1_growth(0j, [60.0, 150.0, 300.0])
        with pytest.raises(ACaseOne):
            vf.thm1_growth(1 + 0j, [60.0, 150.0, 300.0])

    def test_notes_record_trend(self, a2_300):
        rep = vf.thm1_growth(2 + 0j, [60.0, 150.0, 300.0], points=a2_300)
        assert "b_lower=" in rep.notes


class TestGonekQuadrature:
    def test_single_coefficient_oracle_m0(self):
        integral, total = vf.gonek_quadrature(
            single_coeff_series(2), 0.6, 0, 30.0)
        assert total == 1.0
        assert abs(integral - GONEK_SINGLE_M0) < 1e-6

    def test_single_coefficient_oracle_m1(self):
        integral, total = vf.gonek_quadrature(
            single_coeff_series(2), 0.6, 1, 30.0)
        assert abs(total - math.log(2)) < 1e-15
        assert abs(integral - GONEK_SINGLE_M1) < 1e-6

    def test_leading_coefficient_only(self):
        # n=1 sits below every cutoff with T >= 2pi; log(1)^m kills m=1
        _, s0 = vf.gonek_quadrature(single_coeff_series(1), 0.75, 0, 10.0)
        _, s1 = vf.gonek_quadrature(single_coeff_series(1), 0.75, 1, 10.0)
        assert s0 == 1.0
        assert s1 == 0.0

    def test_von_mangoldt_tracks_psi(self):
        b = lambda_sieve(32)
        integral, total = vf.gonek_quadrature(b, 1.25, 0, 50.0)
        assert total == pytest.approx(psi(50.0 / TWO_PI), abs=1e-12)
        # discrepancy far below the T^(c-1/2) log T scale (~73 here)
        assert abs(integral - total) < 5.0

    def test_series_too_short(self):
        with pytest.raises(SeriesTooShort):
            vf.gonek_quadrature(single_coeff_series(2, length=4), 0.6, 0, 50.0)

    def test_bad_m(self):
        with pytest.raises(ValueError):
            vf.gonek_quadrature(single_coeff_series(2), 0.6, 2, 30.0)

    def test_small_t(self):
        with pytest.raises(TooSmallT):
            vf.gonek_quadrature(single_coeff_series(2), 0.6, 0, 1.0)


class TestContourResidueCheck:
    def test_a2_window(self):
        q, r = vf.contour_residue_check(2 + 0j, contour_window(2 + 0j, 50.0))
        assert abs(q - r) < 1e-8
        assert abs(r) > 1.0  # nonempty window really exercised

    def test_zeros_window(self):
        w = SearchWindow(-0.5, 2.0, 1.0, 30.0)
        q, r = vf.contour_residue_check(0j, w)
        assert abs(q - r) < 1e-8

    def test_empty_window(self):
        w = SearchWindow(-0.5, 2.0, 1.0, 10.0)
        q, r = vf.contour_residue_check(0j, w)
        assert r == 0j
        assert abs(q) < 1e-8

    def test_left_roots_counted(self):
        # the rectangle dips to sigma = -0.5 and picks up the root near
        # -0.458 + 9.91i, which right-half-plane searches exclude
        w = SearchWindow(-0.5, 2.3, 9.0, 11.0)
        q, r = vf.contour_residue_check(2 + 0j, w)
        assert abs(q - r) < 1e-8
        assert abs(r) > 0.1


class TestPartfracBoundProbe:
    def test_ratio_order_one(self):
        sample = [complex(0.5, t) for t in (10.3, 20.7, 33.1, 47.9)]
        ratio = vf.partfrac_bound_probe(2 + 0j, sample)
        assert 0.0 < ratio < 5.0

    def test_too_close_to_root(self):
        with pytest.raises(SampleTooCloseToAPoint):
            vf.partfrac_bound_probe(0j, [complex(0.5, 14.1347)])

    def test_left_of_strip(self):
        with pytest.raises(ValueError):
            vf.partfrac_bound_probe(2 + 0j, [complex(-1.5, 20.0)])

    def test_empty_sample(self):
        assert vf.partfrac_bound_probe(2 + 0j, []) == 0.0


class TestReportTypes:
    def test_row_residual_consistency(self):
        with pytest.raises(ValueError):
            vf.ReportRow(T=10.0, lhs=1 + 0j, main=0j, residual_abs=2.0)

    def test_report_rows_sorted(self):
        r1 = vf.ReportRow(T=10.0, lhs=0j, main=0j, residual_abs=0.0)
        r2 = vf.ReportRow(T=20.0, lhs=0j, main=0j, residual_abs=0.0)
        with pytest.raises(ValueError):
            vf.TheoremReport(label="x", rows=(r2, r1),
                             fitted_exponent=None, notes="")

    def test_fit_needs_three_rows(self):
        r1 = vf.ReportRow(T=10.0, lhs=0j, main=0j, residual_abs=0.0)
        with pytest.raises(ValueError):
            vf.TheoremReport(label="x", rows=(r1,), fitted_exponent=0.5,
                             notes="")

    def test_quadrature_params_validation(self):
        with pytest.raises(ValueError):
            vf.QuadratureParams(panels_per_unit_phase=0)
        with pytest.raises(ValueError):
            vf.QuadratureParams(max_abs_err=0.0)


class TestSerialization:
    def test_csv_header(self, sample_report):
        first = vf.report_to_csv(sample_report).splitlines()[0]
        assert first == "T,lhs_re,lhs_im,main_re,main_im,residual_abs"

    def test_csv_round_trip(self, sample_report):
        lines = vf.report_to_csv(sample_report).splitlines()
        assert len(lines) == 1 + len(sample_report.rows)
        for line, row in zip(lines[1:], sample_report.rows):
            cells = [float(x) for x in line.split(",")]
            assert cells[0] == row.T
            assert cells[1] == row.lhs.real
            assert cells[5] == row.residual_abs

    def test_json_round_trip(self, sample_report):
        obj = json.loads(vf.report_to_json(sample_report))
        assert obj["label"] == sample_report.label
        assert len(obj["rows"]) == len(sample_report.rows)
        assert obj["rows"][0]["lhs_re"] == sample_report.rows[0].lhs.real
        assert obj["fitted_exponent"] == sample_report.fitted_exponent

    def test_repeated_calls_identical(self, sample_report):
        assert vf.report_to_json(sample_report) == vf.report_to_json(sample_report)
        assert vf.report_to_csv(sample_report) == vf.report_to_csv(sample_report)
