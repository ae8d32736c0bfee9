"""
Log-gamma, digamma and trigamma for positive arguments.

Arguments below ``ASYMPTOTIC_FLOOR`` are moved upward by the recurrence
Gamma(x + 1) = x Gamma(x) until the Stirling-type series is accurate to
double precision, the recurrence terms are then taken back off.
"""
import math

import numpy as np

from alpha_dirichlet.utils.response_error import DomainError

ASYMPTOTIC_FLOOR = 10.0
HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)

# B_2k / (2k (2k - 1)), k = 1..7
_LOG_GAMMA_SERIES = (1.0 / 12.0, -1.0 / 360.0, 1.0 / 1260.0, -1.0 / 1680.0,
                     1.0 / 1188.0, -691.0 / 360360.0, 1.0 / 156.0)
# B_2k / (2k), k = 1..7
_DIGAMMA_SERIES = (1.0 / 12.0, -1.0 / 120.0, 1.0 / 252.0, -1.0 / 240.0,
                   1.0 / 132.0, -691.0 / 32760.0, 1.0 / 12.0)
# B_2k, k = 1..7
_TRIGAMMA_SERIES = (1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0,
                    5.0 / 66.0, -691.0 / 2730.0, 7.0 / 6.0)


def _as_positive(x, name):
    values = np.asarray(x, dtype=np.float64)
    if np.any(~(values > 0.0)):
        raise DomainError(f'{name} is defined for positive arguments only, '
                          f'got {x!r}')
    return values


def _odd_series(coefficients, z_inv, first_power):
    """Evaluate sum_k coefficients[k] * z_inv ** (first_power + 2k) by Horner."""
    z_inv2 = z_inv * z_inv
    acc = np.zeros_like(z_inv)
    for coefficient in reversed(coefficients):
        acc = acc * z_inv2 + coefficient
    return acc * z_inv ** first_power


def _finish(values):
    return float(values) if values.ndim == 0 else values


def log_gamma(x):
    """Natural logarithm of the gamma function.
    Args:
        x: (float or np.ndarray) Positive argument(s).
    Returns:
        (float or np.ndarray) log Gamma(x).
    Raises:
        DomainError: Any argument is not positive.
    """
    z = _as_positive(x, 'log_gamma').copy()
    product = np.ones_like(z)
    low = z < ASYMPTOTIC_FLOOR
    while np.any(low):
        product[low] *= z[low]
        z[low] += 1.0
        low = z < ASYMPTOTIC_FLOOR
    stirling = (z - 0.5) * np.log(z) - z + HALF_LOG_2PI
    return _finish(stirling + _odd_series(_LOG_GAMMA_SERIES, 1.0 / z, 1)
                   - np.log(product))


def digamma(x):
    """Logarithmic derivative of the gamma function.
    Args:
        x: (float or np.ndarray) Positive argument(s).
    Returns:
        (float or np.ndarray) psi(x).
    Raises:
        DomainError: Any argument is not positive.
    """
    z = _as_positive(x, 'digamma').copy()
    shift = np.zeros_like(z)
    low = z < ASYMPTOTIC_FLOOR
    while np.any(low):
        shift[low] += 1.0 / z[low]
        z[low] += 1.0
        low = z < ASYMPTOTIC_FLOOR
    series = np.log(z) - 0.5 / z - _odd_series(_DIGAMMA_SERIES, 1.0 / z, 2)
    return _finish(series - shift)


def trigamma(x):
    """Second derivative of log Gamma.
    Args:
        x: (float or np.ndarray) Positive argument(s).
    Returns:
        (float or np.ndarray) psi'(x).
    Raises:
        DomainError: Any argument is not positive.
    """
    z = _as_positive(x, 'trigamma').copy()
    shift = np.zeros_like(z)
    low = z < ASYMPTOTIC_FLOOR
    while np.any(low):
        shift[low] += 1.0 / (z[low] * z[low])
        z[low] += 1.0
        low = z < ASYMPTOTIC_FLOOR
    z_inv = 1.0 / z
    series = z_inv + 0.5 * z_inv * z_inv + _odd_series(_TRIGAMMA_SERIES, z_inv, 3)
    return _finish(series + shift)
