import math
import unittest

import numpy as np

from alpha_dirichlet.service.alpha_fit_service import AlphaFitService
from alpha_dirichlet.service.asymptotic_service import (ASYMPTOTIC1, ASYMPTOTIC2,
                                                        AsymptoticService,
                                                        CoalescingParams)
from alpha_dirichlet.service.dirichlet_service import (DirichletParams,
                                                       DirichletService)
from alpha_dirichlet.service.simplex_service import SimplexService
from alpha_dirichlet.service.simulation_service import (COALESCING, SimConfig,
                                                        SimulationService)
from alpha_dirichlet.utils.response_error import DegenerateDataError, DomainError

C = (0.1, 0.3, -0.4)
ALPHAS = (0.04, 0.02, 0.01)


def coalescing_sample(alpha, n, seed, b=1.0, c=C):
    cfg = SimConfig(mode=COALESCING, alpha_grid=(alpha,), n=n, seed=seed, b=b, c=c)
    return SimulationService.simulate_dataset(cfg, alpha)


class TestCoalescingParams(unittest.TestCase):

    def test_induced_shapes(self):
        shapes = AsymptoticService.coalescing_to_gamma(CoalescingParams(0.1, 1.0, C))
        np.testing.assert_allclose(shapes.gamma, [101.0, 103.0, 96.0], rtol=1e-13)
        self.assertAlmostEqual(shapes.gamma_plus, 300.0, places=10)

    def test_invalid(self):
        for alpha, b, c in ((0.1, 1.0, (0.1, 0.2, 0.3)),
                            (0.1, 0.0, C),
                            (0.0, 1.0, C),
                            (3.0, 1.0, C),
                            (0.1, 1.0, (0.0,))):
            with self.assertRaises(DomainError):
                CoalescingParams(alpha, b, c)

    def test_normalize_moves_mean_into_b(self):
        b_star, c_star = AsymptoticService.normalize_params(0.1, 1.0, (1.0, 1.0, 1.0))
        self.assertAlmostEqual(b_star, 1.1, places=14)
        np.testing.assert_allclose(c_star, 0.0, atol=1e-15)

    def test_normalize_keeps_shapes(self):
        c = np.array([0.4, -0.1, 0.9])
        b_star, c_star = AsymptoticService.normalize_params(-0.2, 2.0, c)
        self.assertAlmostEqual(c_star.sum(), 0.0, places=14)
        np.testing.assert_allclose(
            AsymptoticService.coalescing_to_gamma(CoalescingParams(-0.2, b_star, c_star)).gamma,
            2.0 / 0.04 * (1.0 - 0.2 * c), rtol=1e-12)

    def test_normalize_rejects_nonpositive_factor(self):
        with self.assertRaises(DomainError):
            AsymptoticService.normalize_params(-1.0, 1.0, (2.0, 2.0))


class TestSampleCumulants(unittest.TestCase):

    def test_symmetric_row(self):
        k = AsymptoticService.sample_cumulants([1.0, 2.0, 3.0])
        self.assertAlmostEqual(k.k1, 2.0)
        self.assertAlmostEqual(k.k2, 2.0 / 3.0)
        self.assertAlmostEqual(k.k3, 0.0)

    def test_skewed_row(self):
        k = AsymptoticService.sample_cumulants([0.0, 0.0, 3.0])
        self.assertAlmostEqual(k.k1, 1.0)
        self.assertAlmostEqual(k.k2, 2.0)
        self.assertAlmostEqual(k.k3, 2.0)

    def test_rows(self):
        k = AsymptoticService.sample_cumulants([[1.0, 2.0, 3.0], [0.0, 0.0, 3.0]])
        np.testing.assert_allclose(k.k3, [0.0, 2.0], atol=1e-15)

    def test_needs_two_entries(self):
        with self.assertRaises(DomainError):
            AsymptoticService.sample_cumulants([1.0])


class TestEstimators(unittest.TestCase):

    def test_c_hat_of_uniform_rows(self):
        np.testing.assert_allclose(AsymptoticService.estimate_c_hat([[0.25] * 4] * 3),
                                   0.0, atol=1e-15)

    def test_c_hat_mirrored_rows(self):
        c_hat = AsymptoticService.estimate_c_hat([[0.2, 0.3, 0.5], [0.5, 0.3, 0.2]])
        self.assertAlmostEqual(c_hat[0], c_hat[2], places=14)
        self.assertAlmostEqual(c_hat.sum(), 0.0, places=14)
        expected = math.log(0.3) - (2 * math.log(0.2) + 2 * math.log(0.5)
                                    + 2 * math.log(0.3)) / 6.0
        self.assertAlmostEqual(c_hat[1], expected, places=14)

    def test_b_hat_scales_with_residuals(self):
        data = DirichletService.sample(DirichletParams([3.0, 4.0, 5.0, 6.0]), 40, seed=31)
        squared = SimplexService.closure(data ** 2)
        self.assertAlmostEqual(AsymptoticService.estimate_b_hat(squared),
                               AsymptoticService.estimate_b_hat(data) / 4.0,
                               delta=1e-10 * AsymptoticService.estimate_b_hat(data))

    def test_b_hat_of_replicated_rows(self):
        with self.assertRaises(DegenerateDataError):
            AsymptoticService.estimate_b_hat([[0.2, 0.3, 0.5]] * 5)

    def test_b_hat_needs_two_rows(self):
        with self.assertRaises(DomainError):
            AsymptoticService.estimate_b_hat([[0.2, 0.3, 0.5]])

    def test_asymptotic1_recovers_coalescing_truth(self):
        data = coalescing_sample(0.05, 5000, seed=32)
        fit = AsymptoticService.fit_asymptotic1(data, 0.05)
        self.assertEqual(fit.variant, ASYMPTOTIC1)
        self.assertIsNone(fit.b_vec)
        self.assertAlmostEqual(fit.b_hat, 1.0, delta=0.05)
        np.testing.assert_allclose(fit.c_hat, C, atol=0.06)
        expected = AsymptoticService.coalescing_to_gamma(
            CoalescingParams(0.05, fit.b_hat, fit.c_hat))
        np.testing.assert_allclose(fit.implied_gamma.gamma, expected.gamma)

    def test_asymptotic2_is_profile_fit(self):
        data = coalescing_sample(0.1, 500, seed=33)
        fit = AsymptoticService.fit_asymptotic2(data, 0.1)
        _, gamma = AlphaFitService.profile_loglik(data, 0.1)
        self.assertEqual(fit.variant, ASYMPTOTIC2)
        np.testing.assert_allclose(fit.implied_gamma.gamma, gamma.gamma, rtol=1e-8)
        np.testing.assert_allclose(fit.b_vec, 0.01 * gamma.gamma, rtol=1e-8)
        self.assertAlmostEqual(fit.b_hat, float(fit.b_vec.mean()))
        self.assertAlmostEqual(fit.c_hat.sum(), 0.0, places=12)


class TestAsymptoticLoglik(unittest.TestCase):

    def test_uniform_row_gap_is_stirling_remainder(self):
        alpha = 0.01
        p = CoalescingParams(alpha, 1.0, (0.0, 0.0, 0.0))
        data = [[1 / 3, 1 / 3, 1 / 3]]
        gap = (AsymptoticService.exact_loglik(data, p)
               - AsymptoticService.asymptotic_loglik(data, p))
        remainder = AsymptoticService.stirling_remainder(alpha, 1.0, 3)
        self.assertAlmostEqual(gap / remainder, 1.0, delta=1e-2)

    def test_first_order_term(self):
        data = coalescing_sample(0.05, 50, seed=34)
        p = CoalescingParams(0.05, 1.0, C)
        y = np.log(data)
        k3 = AsymptoticService.sample_cumulants(y).k3
        c1 = -1.0 / 6.0 * (3 * k3 - np.sum(np.array(C) ** 3))
        difference = (AsymptoticService.asymptotic_loglik(data, p)
                      - AsymptoticService.asymptotic_loglik(data, p,
                                                            include_first_order=False))
        self.assertAlmostEqual(difference, 0.05 * c1.sum(), places=10)

    def test_close_to_exact_for_small_alpha(self):
        data = coalescing_sample(0.01, 100, seed=35)
        p = CoalescingParams(0.01, 1.0, C)
        exact = AsymptoticService.exact_loglik(data, p)
        self.assertLess(abs(exact - AsymptoticService.asymptotic_loglik(data, p)),
                        1e-2)


class TestGaussianLimit(unittest.TestCase):

    gamma = DirichletParams([2.0, 3.0, 5.0])

    def test_log_normalizer_at_centre(self):
        expected = -math.log(2.0 * math.pi) + 0.5 * (2.0 * math.log(10.0)
                                                      - math.log(0.2 * 0.3 * 0.5))
        self.assertAlmostEqual(
            AsymptoticService.gaussian_limit_logdensity([0.0, 0.0, 0.0], self.gamma),
            expected, places=12)

    def test_limit_of_scaled_density(self):
        alpha = 1e-3
        v = np.array([0.1, -0.3, 0.2])
        shapes = DirichletParams(self.gamma.gamma / alpha ** 2)
        scaled = (2 * math.log(alpha)
                  + DirichletService.log_density(self.gamma.mean + alpha * v, shapes))
        self.assertAlmostEqual(scaled,
                               AsymptoticService.gaussian_limit_logdensity(v, self.gamma),
                               delta=1e-2)

    def test_covariance_limit(self):
        alpha = 1e-3
        g_bar = self.gamma.mean
        exact = (np.diag(g_bar) - np.outer(g_bar, g_bar)) / (
            self.gamma.gamma_plus / alpha ** 2 + 1.0) / alpha ** 2
        covariance = AsymptoticService.gaussian_limit_covariance(self.gamma)
        np.testing.assert_allclose(covariance, exact, rtol=1e-5)
        np.testing.assert_allclose(covariance.sum(axis=1), 0.0, atol=1e-15)

    def test_off_hyperplane(self):
        with self.assertRaises(DomainError):
            AsymptoticService.gaussian_limit_logdensity([0.1, 0.1, 0.1], self.gamma)


class TestMeanShift(unittest.TestCase):

    def test_doubles_when_alpha_halves(self):
        gamma = DirichletParams([1.0, 2.0, 3.0])
        np.testing.assert_allclose(AsymptoticService.corollary1_mean_shift(0.05, gamma),
                                   2.0 * AsymptoticService.corollary1_mean_shift(0.1, gamma))

    def test_symmetric_shapes(self):
        gamma = DirichletParams([4.0, 4.0, 4.0])
        np.testing.assert_allclose(AsymptoticService.corollary1_mean_shift(0.1, gamma), 0.0)
        np.testing.assert_allclose(AsymptoticService.exact_centered_log_mean(0.1, gamma),
                                   0.0, atol=1e-12)

    def test_exact_mean_near_uniform(self):
        gamma = DirichletParams(3.0 * (1.0 + 1e-3 * np.array([1.0, -2.0, 1.0])))
        np.testing.assert_allclose(AsymptoticService.exact_centered_log_mean(0.1, gamma),
                                   AsymptoticService.corollary1_mean_shift(0.1, gamma),
                                   rtol=1e-2)

    def test_zero_alpha(self):
        with self.assertRaises(DomainError):
            AsymptoticService.corollary1_mean_shift(0.0, DirichletParams([1.0, 1.0]))


class TestQuadraticForms(unittest.TestCase):

    def test_projected_equals_isotropic(self):
        rng = np.random.default_rng(36)
        for _ in range(50):
            D = int(rng.integers(2, 7))
            z = rng.normal(size=D)
            mu = rng.normal(size=D)
            mu -= mu.mean()
            b = float(rng.uniform(0.5, 4.0))
            self.assertAlmostEqual(AsymptoticService.projected_quadratic_form(z, mu, b),
                                   AsymptoticService.isotropic_quadratic_form(z, mu, b),
                                   delta=1e-10)


class TestExpansionOrders(unittest.TestCase):

    def assert_quadratic(self, residuals):
        for first, second in zip(residuals[:-1], residuals[1:]):
            self.assertGreaterEqual(first / second, 3.2)
            self.assertLessEqual(first / second, 4.8)

    def test_gamma_ratio_expansion(self):
        self.assert_quadratic([abs(AsymptoticService.lemma1_lhs(a, 1.0, C)
                                   - AsymptoticService.lemma1_rhs(a, 1.0, C))
                               for a in ALPHAS])

    def test_log_sum_power_expansion(self):
        y = np.log([0.2, 0.3, 0.5])
        self.assert_quadratic([abs(AsymptoticService.lemma2_lhs(a, 1.0, C, y)
                                   - AsymptoticService.lemma2_rhs(a, 1.0, C, y))
                               for a in ALPHAS])

    def test_constant_row_is_exact(self):
        y = [0.7, 0.7, 0.7]
        for alpha in ALPHAS:
            self.assertAlmostEqual(AsymptoticService.lemma2_lhs(alpha, 1.0, C, y),
                                   AsymptoticService.lemma2_rhs(alpha, 1.0, C, y),
                                   delta=1e-8)

    def test_stirling_remainder(self):
        zero = (0.0, 0.0, 0.0)
        for alpha in ALPHAS:
            gap = (AsymptoticService.lemma1_lhs(alpha, 2.0, zero)
                   - AsymptoticService.lemma1_rhs(alpha, 2.0, zero))
            self.assertAlmostEqual(gap / AsymptoticService.stirling_remainder(alpha, 2.0, 3),
                                   1.0, delta=1e-2)


if __name__ == '__main__':
    unittest.main()
