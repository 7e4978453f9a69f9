import math

import numpy as np
import pytest

import oracles
from dpconv.divergences import (
    BinaryDistributionPair,
    RenyiOrder,
    chi_alpha_binary,
    chi_inverse,
    chi_of_gamma,
    gaussian_delta_eps,
    gaussian_renyi,
    hockey_stick_binary,
    kl_binary,
    renyi_binary,
)

RNG = np.random.default_rng(20240811)


class TestTypes:
    def test_pair_validation(self):
        BinaryDistributionPair(0.0, 1.0)
        with pytest.raises(ValueError):
            BinaryDistributionPair(-0.1, 0.5)
        with pytest.raises(ValueError):
            BinaryDistributionPair(0.5, 1.1)

    def test_order_validation(self):
        RenyiOrder(1.5)
        with pytest.raises(ValueError):
            RenyiOrder(1.0)
        with pytest.raises(ValueError):
            RenyiOrder(1.0 + 1e-12)  # alpha - 1 below the supported gap


class TestHockeyStick:
    def test_identical(self):
        assert hockey_stick_binary(BinaryDistributionPair(0.3, 0.3), 1.0) == 0.0

    def test_direct_sum(self):
        assert hockey_stick_binary(BinaryDistributionPair(0.5, 0.25), 1.0) == pytest.approx(0.25)

    def test_exponential_lambda(self):
        val = hockey_stick_binary(BinaryDistributionPair(0.9, 0.1), math.e)
        assert val == pytest.approx(0.62817181715409548, abs=1e-6)

    def test_negative_lambda(self):
        with pytest.raises(ValueError):
            hockey_stick_binary(BinaryDistributionPair(0.5, 0.5), -0.1)

    def test_lambda_one_is_total_variation(self):
        for _ in range(200):
            p, q = RNG.uniform(0, 1, 2)
            pair = BinaryDistributionPair(p, q)
            assert hockey_stick_binary(pair, 1.0) == pytest.approx(abs(p - q), abs=1e-14)

    def test_range(self):
        for _ in range(200):
            p, q = RNG.uniform(0, 1, 2)
            lam = RNG.uniform(0, 5)
            val = hockey_stick_binary(BinaryDistributionPair(p, q), lam)
            assert max(0.0, 1.0 - lam) - 1e-14 <= val <= 1.0 + 1e-14


class TestChiAlpha:
    def test_identical(self):
        assert chi_alpha_binary(BinaryDistributionPair(0.4, 0.4), 2.0) == pytest.approx(0.0, abs=1e-14)

    def test_direct(self):
        val = chi_alpha_binary(BinaryDistributionPair(0.75, 0.5), 2.0)
        assert val == pytest.approx(0.25, abs=1e-12)

    def test_renyi_roundtrip(self):
        # D_alpha = log(1 + (alpha-1) chi^alpha)/(alpha-1) on random pairs
        for _ in range(300):
            a, b = RNG.uniform(0.01, 0.99, 2)
            alpha = float(np.exp(RNG.uniform(np.log(1.1), np.log(64.0))))
            chi = chi_alpha_binary(BinaryDistributionPair(a, b), alpha)
            d = renyi_binary(a, b, alpha)
            assert d == pytest.approx(math.log1p((alpha - 1.0) * chi) / (alpha - 1.0), abs=1e-12)

    def test_infinite_when_support_mismatch(self):
        assert chi_alpha_binary(BinaryDistributionPair(0.5, 0.0), 2.0) == math.inf
        assert chi_alpha_binary(BinaryDistributionPair(0.5, 1.0), 2.0) == math.inf


class TestRenyiBinary:
    def test_identical(self):
        assert renyi_binary(0.3, 0.3, 5.0) == pytest.approx(0.0, abs=1e-14)

    def test_direct(self):
        assert renyi_binary(0.75, 0.5, 2.0) == pytest.approx(math.log(1.25), abs=1e-12)

    def test_nondecreasing_in_order(self):
        assert renyi_binary(0.75, 0.5, 3.0) >= renyi_binary(0.75, 0.5, 2.0)
        for _ in range(100):
            a, b = RNG.uniform(0.01, 0.99, 2)
            d2 = renyi_binary(a, b, 1.5)
            d3 = renyi_binary(a, b, 4.0)
            assert d3 >= d2 - 1e-12

    def test_nonnegative_zero_iff_equal(self):
        for _ in range(200):
            a, b = RNG.uniform(0.01, 0.99, 2)
            val = renyi_binary(a, b, 2.5)
            assert val >= -1e-15
            if abs(a - b) > 1e-3:
                assert val > 0.0

    @pytest.mark.parametrize("a,b", [(0.0, 0.5), (1.0, 0.5), (0.5, 0.0), (0.5, 1.0)])
    def test_endpoints_rejected(self, a, b):
        with pytest.raises(ValueError):
            renyi_binary(a, b, 2.0)


class TestKlBinary:
    def test_identical(self):
        assert kl_binary(0.2, 0.2) == 0.0

    def test_known_value(self):
        assert kl_binary(0.5, 0.25) == pytest.approx(0.14384103622589046, abs=1e-6)

    def test_symmetric_instance(self):
        assert kl_binary(0.5, 0.75) == pytest.approx(0.14384103622589046, abs=1e-6)

    def test_endpoints_rejected(self):
        with pytest.raises(ValueError):
            kl_binary(0.0, 0.5)


class TestChiBijection:
    def test_zero(self):
        assert chi_of_gamma(3.0, 0.0) == 0.0
        assert chi_inverse(2.0, 0.0) == 0.0

    def test_known_values(self):
        assert chi_of_gamma(2.0, math.log(2.0)) == pytest.approx(1.0, abs=1e-14)
        assert chi_inverse(2.0, 1.0) == pytest.approx(math.log(2.0), abs=1e-14)
        assert chi_inverse(3.0, (math.e ** 2 - 1.0) / 2.0) == pytest.approx(1.0, abs=1e-14)

    def test_roundtrip(self):
        # chi overflows the double exponent range once (alpha-1)*gamma > ~709;
        # beyond that both directions saturate consistently at +inf
        for alpha in (1.1, 2.0, 8.0, 64.0):
            for gamma in np.linspace(0.0, 50.0, 26):
                g = float(gamma)
                chi = chi_of_gamma(alpha, g)
                if (alpha - 1.0) * g > 709.0:
                    assert chi == math.inf and chi_inverse(alpha, chi) == math.inf
                else:
                    assert chi_inverse(alpha, chi) == pytest.approx(g, abs=1e-12, rel=1e-12)

    def test_strictly_increasing(self):
        gammas = np.linspace(0.0, 10.0, 50)
        vals = [chi_of_gamma(2.0, float(g)) for g in gammas]
        assert all(b > a for a, b in zip(vals, vals[1:]))


class TestGaussianForms:
    def test_renyi_values(self):
        assert gaussian_renyi(1.0, 2.0) == pytest.approx(1.0)
        assert gaussian_renyi(1e6, 2.0) <= 1e-11
        assert gaussian_renyi(20.0, 2.0) == pytest.approx(0.0025)

    def test_renyi_domain(self):
        with pytest.raises(ValueError):
            gaussian_renyi(0.0, 2.0)

    def test_delta_eps_values(self):
        assert gaussian_delta_eps(1.0, 0.0) == pytest.approx(0.38292492254802621, abs=1e-9)
        assert gaussian_delta_eps(1.0, 1.0) == pytest.approx(0.12693673750664395, abs=1e-5)
        assert gaussian_delta_eps(100.0, 1.0) <= 1e-6

    def test_delta_eps_monotone(self):
        eps_grid = np.linspace(0.0, 6.0, 40)
        vals = [gaussian_delta_eps(1.0, float(e)) for e in eps_grid]
        assert all(b <= a + 1e-15 for a, b in zip(vals, vals[1:]))
        sigma_grid = np.linspace(0.3, 5.0, 40)
        vals = [gaussian_delta_eps(float(s), 1.0) for s in sigma_grid]
        assert all(b <= a + 1e-15 for a, b in zip(vals, vals[1:]))

    def test_delta_eps_range(self):
        for s in (0.5, 1.0, 3.0):
            for e in (0.0, 0.5, 2.0):
                assert 0.0 <= gaussian_delta_eps(s, e) < 1.0

    def test_monte_carlo_hockey_stick(self):
        # the closed form is the hockey-stick supremum for the Gaussian pair
        sigma, eps, n = 1.0, 0.5, 10_000_000
        mc, se = oracles.mc_gaussian_hockey_stick(sigma, eps, n, seed=7)
        exact = gaussian_delta_eps(sigma, eps)
        assert abs(mc - exact) <= 3.0 * se


def test_data_processing_merge_to_point():
    # merging both outcomes yields identical point masses: divergence 0 <= original
    for _ in range(100):
        a, b = RNG.uniform(0.01, 0.99, 2)
        assert renyi_binary(a, b, 3.0) >= 0.0
