import math

import numpy as np
import pytest

from walkcount.errors import DomainError
from walkcount.fourier import (
    EIGHT_OVER_PI_SQ,
    FourierState,
    appendix_a_suite,
    aux_cos_ratio,
    aux_cos_taylor_gap,
    aux_sin_gap,
    boundary_prob,
    f_curve,
    f_of_w,
    f_pi,
    f_pi_bound,
    fourier_amplitude_table,
    fourier_state,
    overlap_sq,
)
from walkcount.circuit import qft
from walkcount.qstate import inner


class TestFourierState:

    def test_two_dimensional_states(self):
        np.testing.assert_allclose(fourier_state(2, 0).amps, np.array([1, 1]) / math.sqrt(2))
        np.testing.assert_allclose(fourier_state(2, 1).amps, np.array([1, -1]) / math.sqrt(2), atol=1e-15)

    def test_f8_2_amplitudes_are_powers_of_i(self):
        expected = np.array([1j ** ell for ell in range(8)]) / math.sqrt(8)
        np.testing.assert_allclose(fourier_state(8, 2).amps, expected, atol=1e-15)

    @pytest.mark.parametrize("p", [1, 2, 3, 4])
    def test_integer_states_are_qft_columns(self, p):
        P = 2 ** p
        for j in range(P):
            np.testing.assert_allclose(fourier_state(P, j).amps, qft(p).entries[:, j], atol=1e-12)

    def test_unit_norm_for_real_omega(self):
        for omega in (0.0, 0.3, 1.5, 7.99):
            assert fourier_state(8, omega).norm() == pytest.approx(1.0, abs=1e-12)

    def test_amplitude_table(self):
        rows = fourier_amplitude_table(8, 1.5)
        assert len(rows) == 8
        assert rows[0] == pytest.approx((0, 1 / math.sqrt(8), 0.0))
        assert [ell for ell, _, _ in rows] == list(range(8))

    def test_omega_out_of_range(self):
        with pytest.raises(DomainError):
            FourierState(4, 5.0)
        with pytest.raises(DomainError):
            FourierState(0, 0.0)


class TestOverlap:

    def test_same_state(self):
        assert overlap_sq(8, 1.3, 1.3) == 1.0

    def test_distinct_integers_are_orthogonal(self):
        assert overlap_sq(8, 1, 2) == pytest.approx(0.0, abs=1e-15)
        assert abs(inner(fourier_state(8, 1), fourier_state(8, 2))) == pytest.approx(0.0, abs=1e-12)

    def test_half_offset(self):
        assert overlap_sq(8, 1, 1.5) == pytest.approx(1 / (64 * math.sin(math.pi / 16) ** 2), rel=1e-12)
        assert overlap_sq(8, 1, 1.5) == pytest.approx(0.41054, abs=1e-5)

    def test_aliased_difference_uses_limit(self):
        assert overlap_sq(8, 0, 8) == pytest.approx(1.0, abs=1e-12)

    def test_matches_brute_force_inner_products(self):
        gen = np.random.default_rng(7)
        worst = 0.0
        for _ in range(200):
            P = int(gen.integers(1, 65))
            omega, omega_prime = gen.uniform(0, P, size=2)
            brute = abs(inner(fourier_state(P, omega), fourier_state(P, omega_prime))) ** 2
            worst = max(worst, abs(overlap_sq(P, omega, omega_prime) - brute))
        assert worst < 1e-10

    def test_rejects_empty_dimension(self):
        with pytest.raises(DomainError):
            overlap_sq(0, 0.0, 0.0)


class TestBoundaryProbability:

    def test_integer_omega(self):
        assert boundary_prob(8, 3) == pytest.approx(1.0, abs=1e-12)
        assert boundary_prob(8, 8) == pytest.approx(1.0, abs=1e-12)

    def test_two_dimensional_is_flat(self):
        for omega in (0.1, 0.5, 1.7):
            assert boundary_prob(2, omega) == pytest.approx(1.0, abs=1e-12)

    def test_half_point(self):
        expected = 2 / (64 * math.sin(math.pi / 16) ** 2)
        assert boundary_prob(8, 1.5) == pytest.approx(expected, rel=1e-12)
        assert boundary_prob(8, 1.5) == pytest.approx(0.82108, abs=1e-5)

    def test_wraps_past_last_outcome(self):
        assert boundary_prob(8, 7.5) == pytest.approx(boundary_prob(8, 1.5), rel=1e-12)

    def test_lower_bound_over_grids(self):
        for P in range(2, 65):
            for omega in np.linspace(0, P, 97):
                assert boundary_prob(P, float(omega)) >= EIGHT_OVER_PI_SQ - 1e-12


class TestBoundaryFunction:

    def test_single_outcome_is_two(self):
        for w in (0.1, 0.5, 0.9):
            assert f_of_w(1, w) == pytest.approx(2.0, abs=1e-12)

    def test_two_outcomes_is_one(self):
        for w in (0.1, 0.5, 0.9):
            assert f_of_w(2, w) == pytest.approx(1.0, abs=1e-12)

    def test_three_outcomes_at_half(self):
        assert f_of_w(3, 0.5) == pytest.approx(8 / 9, rel=1e-12)

    def test_symmetry_about_half(self):
        for P in (3, 8, 30):
            for w in (0.125, 0.25, 0.375):
                assert f_of_w(P, w) == pytest.approx(f_of_w(P, 1 - w), rel=1e-12)

    def test_shifted_form_drops_normalization(self):
        for P in (3, 8, 30):
            for theta in (-1.2, -0.3, 0.0, 0.7, 1.5):
                assert f_pi(P, theta) == pytest.approx(P ** 2 * f_of_w(P, 0.5 + theta / math.pi), rel=1e-10)

    def test_shifted_bound_is_attained_at_zero(self):
        for P in (1, 3, 16):
            assert f_pi(P, 0.0) == pytest.approx(f_pi_bound(P), rel=1e-12)

    def test_domains(self):
        with pytest.raises(DomainError):
            f_of_w(3, 0.0)
        with pytest.raises(DomainError):
            f_of_w(3, 1.0)
        with pytest.raises(DomainError):
            f_pi(3, math.pi / 2)

    @pytest.mark.parametrize("P", [3, 4, 7, 30, 64])
    def test_curve_minimum_at_half(self, P):
        curve = f_curve(P, resolution=1e-4)
        assert abs(curve.argmin - 0.5) <= 1e-4
        assert curve.minimum >= EIGHT_OVER_PI_SQ

    def test_three_outcome_curve_minimum(self):
        curve = f_curve(3)
        assert curve.argmin == pytest.approx(0.5)
        assert curve.minimum == pytest.approx(8 / 9, rel=1e-12)


class TestAuxiliaryInequalities:

    def test_sin_chord(self):
        theta = np.linspace(0, math.pi / 2, 201)
        for P in (1, 3, 17):
            assert np.all(aux_sin_gap(P, theta) >= -1e-15)

    def test_cos_ratio(self):
        theta = np.linspace(-math.pi / 2 + 1e-3, math.pi / 2 - 1e-3, 401)
        assert np.all(aux_cos_ratio(theta) >= 1 - 1e-12)
        assert aux_cos_ratio(0.0) == pytest.approx(1.0)

    def test_cos_taylor(self):
        theta = np.linspace(0, math.pi / 2, 201)
        assert np.all(aux_cos_taylor_gap(theta) >= -1e-12)


class TestAppendixSuite:

    def test_suite_passes(self):
        report = appendix_a_suite(list(range(3, 65)), resolution=1e-3)
        assert report.passed
        assert report.violations == []
        assert len(report.rows) == 62 * 7

    def test_flat_cases_skip_argmin(self):
        report = appendix_a_suite([1, 2], resolution=1e-3)
        assert report.passed
        assert "argmin" not in {row.check for row in report.rows}

    def test_three_outcome_minimum_row(self):
        report = appendix_a_suite([3], resolution=1e-3)
        row = next(r for r in report.rows if r.check == "min_bound")
        assert row.lhs == pytest.approx(8 / 9, rel=1e-12)
        assert row.lhs >= 0.81057

    def test_csv_rows(self):
        report = appendix_a_suite([4], resolution=1e-3)
        rows = report.csv_rows()
        assert all(len(r) == 6 and r[0] == 4 and r[5] == 1 for r in rows)

    def test_coarse_resolution_rejected(self):
        with pytest.raises(DomainError):
            appendix_a_suite([3], resolution=1e-2)
