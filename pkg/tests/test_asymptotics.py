import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from dtcm import asymptotics as asy
from dtcm.exact import ModelParams, forward_distribution, inverse_distribution
from dtcm.qspecial import q_pochhammer_infinite

from helpers import mp_q_pochhammer_infinite


def params(g, ns, nb=0):
    return ModelParams(g=g, nb=nb, ns=ns)


class TestDomainGuards:
    def test_nonzero_boson_count_rejected(self):
        for fn in (
            asy.forward_continuous_curve,
            asy.forward_gaussian,
            asy.inverse_gaussian,
            asy.forward_largeg_euler,
            asy.comparison_altland_forward,
            asy.comparison_itin_forward,
            asy.comparison_inverse_linear,
        ):
            with pytest.raises(ValueError):
                fn(params(0.2, 10, nb=1))

    def test_zero_coupling_rejected(self):
        with pytest.raises(ValueError):
            asy.forward_gaussian(params(0.0, 10))

    def test_regime_labels(self):
        assert asy.coupling_regime(params(0.001, 400)) == "weak"
        assert asy.coupling_regime(params(0.3, 400)) == "strong"


class TestForwardContinuous:
    def test_log_derivative_satisfies_recursion_rhs(self):
        # analytic derivative of the implemented closed form against the
        # continuum midpoint rule of the exact one-step recursion
        p = params(0.2, 15)
        for nu in np.linspace(0.5, 14.5, 100):
            assert abs(
                asy.forward_continuous_log_derivative(p, nu) - asy.forward_ode_rhs(p, nu)
            ) < 1e-10

    def test_numeric_derivative_cross_check(self):
        # central differences of the actual normalized curve, catching any
        # transcription slip the analytic derivative would share
        p = params(0.2, 15)
        curve = asy.forward_continuous_curve(p)
        h = 1e-5
        for nu in (2.0, 7.3, 12.0):
            numeric = (curve.log_density(nu + h) - curve.log_density(nu - h)) / (2 * h)
            assert abs(numeric - asy.forward_ode_rhs(p, nu)) < 1e-8

    def test_normalized_over_integer_grid(self):
        for g in (0.05, 0.15, 0.4):
            grid = asy.forward_continuous_curve(params(g, 15)).grid()
            assert np.all(grid >= 0.0)
            assert abs(grid.sum() - 1.0) < 1e-8

    def test_normalization_constant_positive_finite(self):
        for g in (0.05, 0.1, 0.2, 0.35, 0.5):
            curve = asy.forward_continuous_curve(params(g, 15))
            assert math.isfinite(curve.log_norm)

    @pytest.mark.parametrize("ns,g", [(150, 0.05), (150, 0.1), (400, 0.05), (400, 0.1)])
    def test_argmax_tracks_exact(self, ns, g):
        p = params(g, ns)
        exact_mode = forward_distribution(p).argmax()
        cont_mode = asy.forward_continuous_curve(p).argmax()
        assert abs(cont_mode - exact_mode) <= 2

    def test_density_value_accessor(self):
        p = params(0.1, 15)
        curve = asy.forward_continuous_curve(p)
        assert_allclose(asy.forward_continuous(p, 7.0), curve.density(7.0), rtol=1e-15)


class TestForwardGaussian:
    def test_closed_forms(self):
        p = params(0.25, 30)
        x = p.x.x
        summary = asy.forward_gaussian(p)
        assert_allclose(summary.mean, 30 - math.log(1 - x) / math.log(x), rtol=1e-12)
        assert_allclose(summary.variance, -x / ((1 - x) * math.log(x)), rtol=1e-12)

    def test_strong_coupling_mean_approaches_full_flip(self):
        p = params(3.0, 20)
        assert_allclose(asy.forward_gaussian(p).mean, 20.0, atol=1e-9)

    def test_variance_positive(self):
        for g in (0.01, 0.1, 0.5, 1.5):
            assert asy.forward_gaussian(params(g, 12)).variance > 0.0

    def test_boundary_flag(self):
        # weak coupling pushes the fitted mean below zero; value is
        # reported unclipped with the domain flag cleared
        weak = asy.forward_gaussian(params(0.05, 15))
        assert weak.mean < 0.0 and not weak.within_domain
        strong = asy.forward_gaussian(params(0.3, 15))
        assert strong.within_domain


class TestInverseContinuous:
    def test_log_ratio_property_at_midpoints(self):
        p = params(0.2, 20)
        curve = asy.inverse_continuous_curve(p)
        h = 1e-5
        for nu in (0.0, 3.0, 9.5, 16.0):
            numeric = (curve.log_density(nu + 0.5 + h) - curve.log_density(nu + 0.5 - h)) / (
                2 * h
            )
            assert abs(numeric - asy.inverse_ode_rhs(p, nu)) < 1e-8

    def test_argmax_tracks_exact_large_s(self):
        p = params(0.15, 400)
        exact_mode = inverse_distribution(p).argmax()
        cont_mode = asy.inverse_continuous_curve(p).argmax()
        assert abs(cont_mode - exact_mode) <= 1

    def test_density_nonnegative_and_normalized(self):
        curve = asy.inverse_continuous_curve(params(0.2, 20))
        grid = curve.grid()
        assert np.all(grid >= 0.0)
        assert abs(grid.sum() - 1.0) < 1e-8

    def test_radicand_domain_error(self):
        # x**(2S+1) > sqrt(5) - 2 makes the square root imaginary
        with pytest.raises(ValueError, match="not positive"):
            asy.inverse_continuous_curve(params(0.05, 2))


class TestInverseGaussian:
    def test_closed_forms(self):
        p = params(0.12, 40)
        x = p.x.x
        u = x**40
        summary = asy.inverse_gaussian(p)
        assert_allclose(summary.mean, -math.log(2 - u) / math.log(x), rtol=1e-12)
        assert_allclose(
            summary.variance, -((1 - u) ** 2) / ((2 - u) ** 2 * math.log(x)), rtol=1e-12
        )

    def test_strong_coupling_mean_vanishes(self):
        assert asy.inverse_gaussian(params(2.5, 40)).mean < 0.03

    def test_linear_law_is_its_limit(self):
        # once x**2S is negligible the fitted mean is exactly log2/(2 pi g^2)
        p = params(0.4, 400)
        assert_allclose(
            asy.inverse_gaussian(p).mean, asy.comparison_inverse_linear(p), rtol=1e-12
        )

    @pytest.mark.parametrize("g", [0.05, 0.1, 0.15])
    def test_mean_within_five_percent_of_exact(self, g):
        p = params(g, 400)
        exact_mean = inverse_distribution(p).mean()
        assert abs(asy.inverse_gaussian(p).mean - exact_mean) / exact_mean < 0.05


class TestEulerLimit:
    def test_distribution_normalized_and_matches_exact_strong_coupling(self):
        p = params(0.3, 400)
        dist = asy.forward_largeg_euler(p)
        assert dist.normalization_error() < 1e-12
        assert_allclose(
            dist.probabilities(), forward_distribution(p).probabilities(), atol=1e-12
        )

    def test_offset_mean_series(self):
        # independent slow evaluation of sum_j x^j/(1 - x^j)
        p = params(0.3, 400)
        x = p.x.x
        expected = sum(x**j / (1 - x**j) for j in range(1, 400))
        assert_allclose(asy.euler_offset_mean(p), expected, rtol=1e-13)

    def test_offset_mean_vanishes_at_strong_coupling(self):
        assert asy.euler_offset_mean(params(3.0, 100)) < 1e-20

    def test_boson_yield_against_exact(self):
        for g in (0.3, 0.5, 1.0):
            p = params(g, 400)
            assert abs(asy.forward_largeg_mean(p) - forward_distribution(p).mean()) < 1e-2

    def test_truncated_tail_is_negligible_in_regime(self):
        for g in (0.1, 0.3, 0.5):
            assert abs(asy.euler_truncated_tail(params(g, 400))) < 1e-9


class TestInverseLargeG:
    def test_nu_zero_is_infinite_product(self):
        p = params(0.8, 100)
        x = p.x.x
        assert_allclose(asy.inverse_largeg(p, 0), q_pochhammer_infinite(x, x), rtol=1e-12)
        assert_allclose(asy.inverse_largeg(p, 0), mp_q_pochhammer_infinite(x, x), rtol=1e-12)

    def test_total_mass_near_one(self):
        p = params(0.8, 100)
        total = sum(asy.inverse_largeg(p, nu) for nu in range(7))
        assert abs(total - 1.0) < 1e-3

    def test_matches_exact_distribution(self):
        p = params(0.8, 100)
        exact_probs = inverse_distribution(p).probabilities()
        for nu in range(5):
            assert abs(asy.inverse_largeg(p, nu) - exact_probs[nu]) < 1e-3


class TestComparisonFormulas:
    def test_altland_vanishes_at_weak_coupling(self):
        assert asy.comparison_altland_forward(params(1e-9, 400)) < 1e-12

    def test_altland_monotone_on_weak_domain(self):
        values = [
            asy.comparison_altland_forward(params(g, 400))
            for g in (0.0002, 0.0005, 0.001, 0.0015, 0.002, 0.0025)
        ]
        assert all(a < b for a, b in zip(values, values[1:]))

    def test_altland_tracks_exact_within_envelope(self):
        # calibrated envelope: deviation is a flat -0.25% across the weak
        # coupling domain at S=200
        for g in (0.0005, 0.001, 0.0015, 0.002, 0.0025):
            p = params(g, 400)
            rel = (asy.comparison_altland_forward(p) - forward_distribution(p).mean()) / (
                forward_distribution(p).mean()
            )
            assert -0.0030 < rel < -0.0020

    def test_itin_close_to_euler_mean(self):
        p = params(0.3, 400)
        assert abs(asy.comparison_itin_forward(p) - asy.forward_largeg_mean(p)) <= 1.0

    def test_itin_saturates_at_strong_coupling(self):
        assert_allclose(asy.comparison_itin_forward(params(25.0, 400)), 400.0, rtol=1e-3)

    def test_itin_tracks_exact_in_regime(self):
        # within its g > 1/(2S) regime, but far enough in that the Euler
        # tail has left the boundary: at g = 0.1, S = 200 the agreement is
        # a few 1e-3 relative (at g = 0.05 the formula is ~17% off)
        p = params(0.1, 400)
        exact_mean = forward_distribution(p).mean()
        assert abs(asy.comparison_itin_forward(p) - exact_mean) / exact_mean < 0.05

    def test_inverse_linear_value(self):
        p = params(0.5, 400)
        assert_allclose(
            asy.comparison_inverse_linear(p), math.log(2) / (2 * math.pi * 0.25), rtol=1e-12
        )

    def test_inverse_linear_slope_against_exact(self):
        # the linear-in-1/g**2 law holds where n_b >> 1; regression over
        # g in [0.05, 0.10] at S = 200 recovers the slope to ~0.2%
        gs = np.arange(0.05, 0.10001, 0.005)
        n_b = np.array([inverse_distribution(params(g, 400)).mean() for g in gs])
        x = 1.0 / gs**2
        slope, _ = np.polyfit(x, n_b, 1)
        expected = math.log(2) / (2 * math.pi)
        assert abs(slope - expected) / expected < 0.05
