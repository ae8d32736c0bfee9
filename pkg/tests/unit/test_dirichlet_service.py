import math
import os
import unittest
from unittest import mock

import numpy as np

from alpha_dirichlet.service.dirichlet_service import (DirichletParams,
                                                       DirichletService)
from alpha_dirichlet.utils.response_error import (ConvergenceError, DomainError,
                                                  NumericalRangeError)
from alpha_dirichlet.utils.special_functions import HALF_LOG_2PI, log_gamma


class TestDirichletParams(unittest.TestCase):

    def test_gamma_plus(self):
        params = DirichletParams([1.5, 2.5, 6.0])
        self.assertEqual(params.gamma_plus, 10.0)
        np.testing.assert_allclose(params.mean, [0.15, 0.25, 0.6])
        self.assertEqual(params.D, 3)

    def test_rejects_nonpositive_shapes(self):
        for bad in ([1.0, 0.0], [1.0, -2.0], [1.0, float('inf')], [3.0]):
            with self.assertRaises(DomainError):
                DirichletParams(bad)


class TestLogDensity(unittest.TestCase):

    def test_flat(self):
        params = DirichletParams([1.0, 1.0, 1.0])
        for v in ([0.2, 0.3, 0.5], [0.9, 0.05, 0.05]):
            self.assertAlmostEqual(DirichletService.log_density(v, params), math.log(2.0),
                                   places=13)

    def test_beta_two_two(self):
        self.assertAlmostEqual(DirichletService.log_density([0.5, 0.5],
                                                            DirichletParams([2.0, 2.0])),
                               math.log(1.5), places=13)

    def test_integrates_to_one(self):
        params = DirichletParams([2.0, 3.0, 4.0])
        steps = 200
        h = 1.0 / steps
        centres = (np.arange(steps) + 0.5) * h
        v1, v2 = np.meshgrid(centres, centres)
        inside = v1 + v2 < 1.0 - 1e-12
        points = np.column_stack([v1[inside], v2[inside], 1.0 - v1[inside] - v2[inside]])
        total = np.sum(np.exp(DirichletService.log_density(points, params))) * h * h
        self.assertAlmostEqual(total, 1.0, delta=1e-2)

    def test_loglik_sums_rows(self):
        params = DirichletParams([2.0, 3.0])
        data = np.array([[0.3, 0.7], [0.6, 0.4]])
        self.assertAlmostEqual(DirichletService.loglik(data, params),
                               float(np.sum(DirichletService.log_density(data, params))))


class TestSample(unittest.TestCase):

    def test_mean(self):
        params = DirichletParams([5.0, 5.0, 5.0])
        n = 100000
        draws = DirichletService.sample(params, n, seed=1)
        standard_error = math.sqrt((1 / 3) * (2 / 3) / 16.0 / n)
        np.testing.assert_allclose(draws.mean(axis=0), 1 / 3, atol=4 * standard_error)

    def test_variance(self):
        params = DirichletParams([2.0, 8.0])
        n = 100000
        first = DirichletService.sample(params, n, seed=2)[:, 0]
        expected = 0.2 * 0.8 / 11.0
        centred = first - first.mean()
        standard_error = math.sqrt((np.mean(centred ** 4) - np.var(first) ** 2) / n)
        self.assertAlmostEqual(float(np.var(first, ddof=1)), expected,
                               delta=4 * standard_error)

    def test_same_seed_same_draws(self):
        params = DirichletParams([0.3, 2.0, 7.0])
        np.testing.assert_array_equal(DirichletService.sample(params, 50, seed=9),
                                      DirichletService.sample(params, 50, seed=9))
        self.assertFalse(np.array_equal(DirichletService.sample(params, 50, seed=9),
                                        DirichletService.sample(params, 50, seed=10)))

    def test_huge_shapes_stay_in_simplex(self):
        params = DirichletParams([1e8, 1.3e8, 0.6e8])
        log_draws = DirichletService.sample_log(params, 100, seed=4)
        self.assertTrue(np.all(np.isfinite(log_draws)))
        np.testing.assert_allclose(np.exp(log_draws).sum(axis=1), 1.0, rtol=1e-14)

    def test_small_shapes_stay_finite_in_log_domain(self):
        params = DirichletParams([0.01, 0.01, 0.01])
        log_draws = DirichletService.sample_log(params, 20000, seed=1)
        self.assertTrue(np.all(np.isfinite(log_draws)))
        np.testing.assert_allclose(np.exp(log_draws).sum(axis=1), 1.0, rtol=1e-12)
        np.testing.assert_allclose(np.exp(log_draws).mean(axis=0), 1 / 3, atol=0.03)
        with self.assertRaises(NumericalRangeError):
            DirichletService.sample(params, 20000, seed=1)

    def test_boosted_shapes_have_exact_log_mean(self):
        # E log x_j = psi(0.5) - psi(1.5) = -2 and Var log x_j = psi'(0.5) - psi'(1.5) = 4
        log_draws = DirichletService.sample_log(DirichletParams([0.5, 0.5, 0.5]), 20000,
                                                seed=3)
        np.testing.assert_allclose(log_draws.mean(axis=0), -2.0,
                                   atol=5 * math.sqrt(4.0 / 20000))

    def test_rejects_empty_sample(self):
        with self.assertRaises(DomainError):
            DirichletService.sample(DirichletParams([1.0, 1.0]), 0, seed=1)


class TestMle(unittest.TestCase):

    def test_recovers_truth(self):
        truth = np.array([5.0, 10.0, 15.0])
        data = DirichletService.sample(DirichletParams(truth), 10000, seed=12)
        np.testing.assert_allclose(DirichletService.mle(data).gamma, truth, rtol=0.05)

    def test_score_vanishes(self):
        data = DirichletService.sample(DirichletParams([0.7, 2.0, 4.5, 1.1]), 500, seed=13)
        fitted = DirichletService.mle(data)
        score = DirichletService.score(data, fitted)
        self.assertLessEqual(float(np.max(np.abs(score))), 1e-8 * 500)

    def test_permutation_equivariance(self):
        data = DirichletService.sample(DirichletParams([2.0, 3.0, 9.0]), 400, seed=14)
        order = [2, 0, 1]
        np.testing.assert_allclose(DirichletService.mle(data[:, order]).gamma,
                                   DirichletService.mle(data).gamma[order], rtol=1e-6)

    def test_exchangeable_columns(self):
        data = DirichletService.sample(DirichletParams([4.0, 4.0, 4.0]), 5000, seed=15)
        gamma = DirichletService.mle(data).gamma
        self.assertLess(gamma.max() / gamma.min(), 1.1)

    def test_error_shrinks_with_n(self):
        rng = np.random.default_rng(16)
        for setting in range(5):
            truth = DirichletParams(rng.uniform(0.5, 10.0, size=3))
            errors = []
            for n in (100, 10000):
                data = DirichletService.sample(truth, n, seed=100 + setting)
                errors.append(np.max(np.abs(DirichletService.mle(data).gamma
                                            / truth.gamma - 1.0)))
            self.assertLess(errors[1], errors[0])

    def test_warm_start(self):
        data = DirichletService.sample(DirichletParams([3.0, 1.0]), 300, seed=17)
        cold = DirichletService.mle(data)
        warm = DirichletService.mle(data, init=DirichletParams([30.0, 0.1]))
        np.testing.assert_allclose(warm.gamma, cold.gamma, rtol=1e-6)

    def test_iteration_cap(self):
        data = DirichletService.sample(DirichletParams([5.0, 10.0, 15.0]), 200, seed=18)
        with mock.patch.dict(os.environ, {'MAX_NEWTON_ITER': '1'}):
            with self.assertRaises(ConvergenceError) as context:
                DirichletService.mle(data, init=DirichletParams([1.0, 1.0, 1.0]))
        self.assertEqual(context.exception.iterations, 1)
        self.assertEqual(context.exception.last_iterate.size, 3)
        self.assertGreater(context.exception.grad_norm, 0.0)

    def test_flat_likelihood_exit_logs_the_score(self):
        data = DirichletService.sample(DirichletParams([5.0, 10.0, 15.0]), 200, seed=20)
        with mock.patch('alpha_dirichlet.service.dirichlet_service.NEWTON_GRAD_TOL', 0.0):
            with self.assertLogs('alpha_dirichlet.dirichlet', level='INFO') as logs:
                fitted = DirichletService.mle(data)
        self.assertIn('grad_norm', logs.output[-1])
        self.assertIn('relative change', logs.output[-1])
        np.testing.assert_allclose(fitted.gamma, DirichletService.mle(data).gamma, rtol=1e-6)

    def test_needs_two_rows(self):
        with self.assertRaises(DomainError):
            DirichletService.mle([[0.2, 0.8]])

    def test_moment_init_is_valid(self):
        data = DirichletService.sample(DirichletParams([2.0, 5.0]), 1000, seed=19)
        init = DirichletService.moment_init(data)
        np.testing.assert_allclose(init.gamma, [2.0, 5.0], rtol=0.25)


class TestLogGammaAgainstStirling(unittest.TestCase):

    def test_first_correction_bound(self):
        for x in (10.0, 17.5, 100.0, 1e4):
            stirling = (x - 0.5) * math.log(x) - x + HALF_LOG_2PI
            self.assertLessEqual(abs(log_gamma(x) - stirling), 1.01 / (12.0 * x))

    def test_half_integer_recurrence(self):
        expected = 0.5 * math.log(math.pi) + sum(math.log(k + 0.5) for k in range(10))
        self.assertAlmostEqual(log_gamma(10.5), expected, places=12)

    def test_one_and_two(self):
        self.assertAlmostEqual(log_gamma(1.0), 0.0, places=14)
        self.assertAlmostEqual(log_gamma(2.0), 0.0, places=14)


if __name__ == '__main__':
    unittest.main()
