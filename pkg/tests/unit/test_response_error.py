import os
import unittest
from unittest import mock

from alpha_dirichlet.config import config
from alpha_dirichlet.utils.response_error import (CONVERGENCE_ERROR, DOMAIN_ERROR,
                                                  IO_ERROR, ConfigError,
                                                  ConvergenceError,
                                                  DegenerateDataError,
                                                  DomainError, FitError,
                                                  InputError,
                                                  NumericalRangeError,
                                                  raise_error, response)


class TestErrorCodes(unittest.TestCase):

    def test_categories(self):
        self.assertEqual(InputError('x').code, IO_ERROR)
        self.assertEqual(ConfigError('x').code, IO_ERROR)
        self.assertEqual(DomainError('x').code, DOMAIN_ERROR)
        self.assertEqual(DegenerateDataError('x').code, DOMAIN_ERROR)
        self.assertEqual(NumericalRangeError('x', component=2).component, 2)
        self.assertEqual(ConvergenceError('x').code, CONVERGENCE_ERROR)
        self.assertEqual(FitError('x').code, CONVERGENCE_ERROR)
        self.assertEqual((IO_ERROR, DOMAIN_ERROR, CONVERGENCE_ERROR), (2, 3, 4))

    def test_domain_errors_are_value_errors(self):
        self.assertIsInstance(DomainError('x'), ValueError)

    def test_default_detail(self):
        self.assertEqual(DomainError().detail, response(DOMAIN_ERROR)['detail'])
        self.assertEqual(response(99), {'detail': 'Unexpected error.'})

    def test_raise_error(self):
        with self.assertRaisesRegex(InputError, 'bad file'):
            raise_error(IO_ERROR, 'bad file')
        with self.assertRaises(ConvergenceError):
            raise_error(CONVERGENCE_ERROR)

    def test_annotate_keeps_diagnostics(self):
        error =ConvergenceError('stuck', last_iterate=[1.0], grad_norm=0.5,
                                 iterations=7).annotate(-0.25)
        self.assertEqual(error.alpha, -0.25)
        self.assertEqual(error.iterations, 7)
        self.assertEqual(error.grad_norm, 0.5)
        self.assertIn('alpha=-0.25', str(error))


class TestConfig(unittest.TestCase):

    def test_defaults(self):
        names = ('WORKERS', 'ALPHA_DELTA', 'GRID_SIZE', 'SEED', 'MAX_NEWTON_ITER',
                 'ZERO_EPSILON', 'ALPHA_DIRICHLET_DATA_DIR')
        environ = {k: v for k, v in os.environ.items() if k not in names}
        with mock.patch.dict(os.environ, environ, clear=True):
            self.assertEqual(config.get_workers(), 1)
            self.assertEqual(config.get_alpha_delta(), 1e-3)
            self.assertEqual(config.get_grid_size(), 82)
            self.assertEqual(config.get_seed(), 20240601)
            self.assertEqual(config.get_max_newton_iter(), 200)
            self.assertEqual(config.get_zero_epsilon(), 1e-6)
            self.assertIsNone(config.get_data_dir())

    def test_overrides(self):
        with mock.patch.dict(os.environ, {'WORKERS': '4', 'GRID_SIZE': '20',
                                          'ALPHA_DELTA': '0.01'}):
            self.assertEqual(config.get_workers(), 4)
            self.assertEqual(config.get_grid_size(), 20)
            self.assertEqual(config.get_alpha_delta(), 0.01)

    def test_workers_at_least_one(self):
        with mock.patch.dict(os.environ, {'WORKERS': '0'}):
            self.assertEqual(config.get_workers(), 1)

    def test_unreadable_value(self):
        with mock.patch.dict(os.environ, {'SEED': 'abc'}):
            with self.assertRaises(ConfigError):
                config.get_seed()


if __name__ == '__main__':
    unittest.main()
