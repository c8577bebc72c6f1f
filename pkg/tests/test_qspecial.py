import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from dtcm.logdomain import log1mexp
from dtcm.qspecial import (
    QBinomialDistSpec,
    QParam,
    log_q_binomial,
    log_q_pochhammer,
    q_binomial,
    q_binomial_distribution,
    q_digamma,
    q_pochhammer,
    q_pochhammer_infinite,
)

from helpers import mp_q_digamma, mp_q_pochhammer_infinite

X_EXP_MINUS_2PI = math.exp(-2.0 * math.pi)


class TestQParam:
    def test_from_coupling(self):
        x = QParam.from_coupling(1.0)
        assert x.log_x == -2.0 * math.pi
        assert x.x == X_EXP_MINUS_2PI

    def test_zero_coupling_is_unit(self):
        x = QParam.from_coupling(0.0)
        assert x.x == 1.0 and x.log_x == 0.0 and x.is_unit

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            QParam(1.5, math.log(1.5))
        with pytest.raises(ValueError):
            QParam(0.0, -math.inf)
        with pytest.raises(ValueError):
            QParam.from_coupling(-0.1)


class TestLog1mexp:
    def test_matches_extended_precision(self):
        from mpmath import mp, mpf

        t = np.array([-0.1, -0.5, -1.0, -3.0, -20.0, -50.0])
        expected = [float(mp.log(1 - mp.e ** mpf(str(v)))) for v in t]
        assert_allclose(log1mexp(t), expected, rtol=1e-14)

    def test_zero_gives_neg_inf(self):
        assert log1mexp(0.0) == -math.inf

    def test_near_zero_no_cancellation(self):
        # 1 - e^t ~ -t for tiny |t|; the naive form would return -inf
        t = -1e-300
        assert_allclose(log1mexp(t), math.log(1e-300), rtol=1e-12)

    def test_positive_rejected(self):
        with pytest.raises(ValueError):
            log1mexp(0.5)


class TestQPochhammer:
    def test_empty_product(self):
        assert q_pochhammer(0.3, 0.5, 0) == 1.0

    def test_single_factor(self):
        assert q_pochhammer(0.3, 0.5, 1) == 0.7

    def test_four_factors_exact_binary(self):
        # (1-0.5)(1-0.25)(1-0.125)(1-0.0625), every factor exact in binary
        assert q_pochhammer(0.5, 0.5, 4) == 0.3076171875

    def test_negative_order_rejected(self):
        with pytest.raises(ValueError):
            q_pochhammer(0.5, 0.5, -1)


class TestLogQPochhammer:
    def test_single_factor(self):
        assert_allclose(
            log_q_pochhammer(math.log(0.3), math.log(0.5), 1),
            -0.35667494393873237891,
            rtol=1e-15,
        )

    def test_all_factors_near_one(self):
        assert abs(log_q_pochhammer(-1000.0, -1.0, 5)) < 1e-300

    def test_matches_linear_domain(self):
        assert_allclose(
            math.exp(log_q_pochhammer(math.log(0.5), math.log(0.5), 4)),
            0.3076171875,
            rtol=1e-14,
        )

    def test_zero_factor_returns_neg_inf(self):
        assert log_q_pochhammer(0.0, math.log(0.5), 3) == -math.inf

    def test_positive_log_rejected(self):
        with pytest.raises(ValueError):
            log_q_pochhammer(0.1, -1.0, 2)
        with pytest.raises(ValueError):
            log_q_pochhammer(-1.0, 0.1, 2)

    @pytest.mark.parametrize("a", [0.1, 0.5, 0.9, 0.99])
    @pytest.mark.parametrize("q", [0.1, 0.5, 0.9])
    @pytest.mark.parametrize("k", [0, 1, 2, 5, 20, 100])
    def test_agreement_with_linear(self, a, q, k):
        linear = q_pochhammer(a, q, k)
        if linear > 1e-280:
            assert_allclose(
                math.exp(log_q_pochhammer(math.log(a), math.log(q), k)), linear, rtol=1e-12
            )


class TestQPochhammerInfinite:
    def test_zero_argument(self):
        assert q_pochhammer_infinite(0.0, 0.5) == 1.0

    def test_half_half(self):
        expected = mp_q_pochhammer_infinite(0.5, 0.5)
        assert_allclose(expected, 0.28878809508660242128, rtol=1e-15)
        assert_allclose(q_pochhammer_infinite(0.5, 0.5, 1e-15), expected, rtol=1e-13)

    def test_strong_coupling_value(self):
        # a = q = exp(-2 pi): dominated by the first factor, off from 1 - a
        # only at order a**2 ~ 3.5e-6
        x = X_EXP_MINUS_2PI
        expected = mp_q_pochhammer_infinite(x, x)
        got = q_pochhammer_infinite(x, x, 1e-15)
        assert_allclose(got, expected, rtol=1e-13)
        assert abs(got - (1.0 - x)) < 2.0 * x * x

    def test_truncation_is_limit_of_finite_orders(self):
        # truncation index for tol=1e-14 at (0.6, 0.7) is ~93; any finite
        # order past it agrees with the infinite product to ~tol relative
        a, q, tol = 0.6, 0.7, 1e-14
        limit = q_pochhammer_infinite(a, q, tol)
        for k in (100, 150, 300):
            assert_allclose(q_pochhammer(a, q, k), limit, rtol=1e-12)

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            q_pochhammer_infinite(0.5, 0.5, 0.0)
        with pytest.raises(ValueError):
            q_pochhammer_infinite(0.5, 1.0)
        with pytest.raises(ValueError):
            q_pochhammer_infinite(1.0, 0.5)


class TestQBinomial:
    def test_k_zero_is_one(self):
        for x in (0.1, 0.5, 0.999):
            assert q_binomial(5, 0, QParam.from_x(x)) == 1.0

    def test_hand_expanded_value(self):
        # (1-x^3)(1-x^4)/((1-x)(1-x^2)) at x=1/2 -> 2.1875
        assert_allclose(q_binomial(4, 2, QParam.from_x(0.5)), 2.1875, rtol=1e-14)

    def test_unit_limit_is_binomial(self):
        assert q_binomial(6, 3, QParam.from_coupling(0.0)) == 20.0

    def test_near_unit_converges_to_binomial(self):
        # the leading deviation is ~ k(n-k)/2 * (1-x), so at x = 1 - 1e-6
        # the 1e-4 band holds for k(n-k) < 200
        x = QParam.from_x(1.0 - 1e-6)
        for n, k in ((6, 3), (20, 7), (15, 5)):
            assert_allclose(q_binomial(n, k, x), math.comb(n, k), rtol=1e-4)

    def test_symmetry_is_exact(self):
        for xval in (0.2, 0.77, 0.999):
            x = QParam.from_x(xval)
            for n in (1, 7, 40, 200):
                for k in range(n + 1):
                    assert log_q_binomial(n, k, x) == log_q_binomial(n, n - k, x)

    def test_value_at_least_one(self):
        for xval in (0.05, 0.5, 0.95):
            x = QParam.from_x(xval)
            for n in (3, 17, 60):
                for k in range(n + 1):
                    assert q_binomial(n, k, x) >= 1.0

    @pytest.mark.parametrize("xval", [0.15, 0.6, 0.95])
    def test_pascal_recursion(self, xval):
        # [n k] = [n-1 k-1] + x^k [n-1 k], checked in log domain up to n=200
        x = QParam.from_x(xval)
        for n in (2, 10, 50, 200):
            for k in range(1, n):
                lhs = log_q_binomial(n, k, x)
                rhs = np.logaddexp(
                    log_q_binomial(n - 1, k - 1, x),
                    k * x.log_x + log_q_binomial(n - 1, k, x),
                )
                assert abs(math.expm1(rhs - lhs)) < 1e-12

    def test_k_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            q_binomial(3, 4, QParam.from_x(0.5))
        with pytest.raises(ValueError):
            q_binomial(3, -1, QParam.from_x(0.5))


class TestQDigamma:
    def test_half_at_one(self):
        got = q_digamma(0.5, 1.0, 1e-14)
        assert_allclose(got, mp_q_digamma(0.5, 1.0), rtol=1e-13)
        assert_allclose(got, -0.42052903435604577978, rtol=1e-13)

    def test_point_nine_at_two(self):
        got = q_digamma(0.9, 2.0, 1e-12)
        assert_allclose(got, 0.39698370336706542699, rtol=1e-11)

    def test_fractional_argument(self):
        assert_allclose(q_digamma(0.5, 0.25, 1e-14), mp_q_digamma(0.5, 0.25), rtol=1e-12)

    def test_small_base_limit(self):
        # as q -> 0 the value collapses to q log q + q -> 0
        q = 1e-12
        got = q_digamma(q, 1.0, 1e-20)
        assert abs(got) < 1e-10
        assert_allclose(got, math.log(q) * q / (1 - q) - math.log1p(-q), rtol=1e-6)

    def test_domain_errors(self):
        for bad in (0.0, -0.5, 1.0, 1.5):
            with pytest.raises(ValueError):
                q_digamma(bad, 1.0)
        with pytest.raises(ValueError):
            q_digamma(0.5, 0.0)
        with pytest.raises(ValueError):
            q_digamma(0.5, 1.0, -1e-3)


class TestQBinomialDistribution:
    def test_two_point_hand_case(self):
        dist = q_binomial_distribution(QBinomialDistSpec(n=1, tau=0.3, q=0.5))
        assert_allclose(dist.probabilities(), [0.7, 0.3], rtol=1e-14)
        assert_allclose(dist.total(), 1.0, rtol=1e-14)

    def test_tau_one_is_point_mass(self):
        for n in (1, 5, 40):
            dist = q_binomial_distribution(QBinomialDistSpec(n=n, tau=1.0, q=0.5))
            probs = dist.probabilities()
            assert probs[n] == 1.0
            assert np.all(probs[:n] == 0.0)

    def test_unit_q_is_binomial(self):
        n, tau = 9, 0.35
        dist = q_binomial_distribution(QBinomialDistSpec(n=n, tau=tau, q=1.0))
        expected = [
            math.comb(n, k) * tau**k * (1 - tau) ** (n - k) for k in range(n + 1)
        ]
        assert_allclose(dist.probabilities(), expected, rtol=1e-12)

    @pytest.mark.parametrize(
        "n,tau,q",
        [(10, 0.35, 0.5), (100, 0.9, 0.99), (10_000, 0.9, 0.999), (10_000, 0.2, 0.5)],
    )
    def test_normalization(self, n, tau, q):
        dist = q_binomial_distribution(QBinomialDistSpec(n=n, tau=tau, q=q))
        assert dist.normalization_error() < 1e-12
        assert np.all(dist.probabilities() >= 0.0)

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            QBinomialDistSpec(n=-1, tau=0.5, q=0.5)
        with pytest.raises(ValueError):
            QBinomialDistSpec(n=3, tau=0.0, q=0.5)
        with pytest.raises(ValueError):
            QBinomialDistSpec(n=3, tau=0.5, q=1.5)
