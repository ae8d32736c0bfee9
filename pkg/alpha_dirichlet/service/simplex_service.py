from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from alpha_dirichlet.config.config import SILENT_RENORMALIZE_TOL
from alpha_dirichlet.utils.response_error import (DomainError,
                                                  NumericalRangeError)

# Below this |alpha| the inverse goes through the log-domain recovery.
NAIVE_INVERSE_FLOOR = 0.01


@dataclass(frozen=True)
class Composition:
    """
    Point of the simplex interior: strictly positive proportions summing
    to one. Build it with ``Composition.of`` so closure noise is absorbed.
    """
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        if values.ndim != 1 or values.size < 2:
            raise DomainError('A composition needs at least two components, '
                              f'got shape {values.shape}')
        if not np.all(values > 0.0) or not np.all(np.isfinite(values)):
            raise DomainError(f'Composition components must be positive: '
                              f'{values.tolist()}')
        if abs(values.sum() - 1.0) > 1e-12:
            raise DomainError(f'Composition sums to {values.sum()!r}, not 1')
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    @classmethod
    def of(cls, values):
        """Validate and close a vector of proportions.
        Args:
            values: (array_like) Candidate proportions.
        Returns:
            (Composition) The validated composition.
        """
        return cls(SimplexService.as_simplex(values))

    @property
    def D(self):
        return self.values.size

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)


@dataclass(frozen=True)
class LogRatios:
    """Log components ``y``, their row mean ``y_bar`` and the clr ``w``."""
    y: np.ndarray
    w: np.ndarray
    y_bar: np.ndarray


class SimplexService:
    """
    Transformations and metrics of compositional vectors. Every method
    accepts a single composition of shape (D,) or a dataset of shape
    (n, D), rows being compositions.
    """

    @staticmethod
    def as_simplex(x, name='x'):
        """Validate compositions, silently closing rows whose sum is within
        1e-8 of one.
        Args:
            x: (array_like) One composition or a matrix of them.
            name: (str) Argument name used in error messages.
        Returns:
            (np.ndarray) Closed float64 copy of x.
        Raises:
            DomainError: Zero, negative or non finite components, fewer
                than two components or a row sum away from one.
        """
        values = np.array(x, dtype=np.float64)
        if values.ndim not in (1, 2) or values.shape[-1] < 2:
            raise DomainError(f'{name} must have shape (D,) or (n, D) with '
                              f'D >= 2, got {values.shape}')
        if not np.all(np.isfinite(values)):
            raise DomainError(f'{name} has non finite components')
        bad = np.argwhere(np.atleast_2d(values) <= 0.0)
        if bad.size:
            row, column = bad[0]
            raise DomainError(f'{name} has a non positive component at row '
                              f'{row}, column {column}; the transformations '
                              f'are defined on the simplex interior only')
        sums = values.sum(axis=-1, keepdims=True)
        if np.any(np.abs(sums - 1.0) > SILENT_RENORMALIZE_TOL):
            raise DomainError(f'{name} rows must sum to 1, worst row sums to '
                              f'{float(sums.flat[np.argmax(np.abs(sums - 1.0))])!r}')
        return values / sums

    @staticmethod
    def closure(raw):
        """Divide positive raw rows by their sums.
        Args:
            raw: (array_like) Positive amounts, shape (D,) or (n, D).
        Returns:
            (np.ndarray) Rows rescaled to sum to one.
        """
        values = np.array(raw, dtype=np.float64)
        if np.any(values < 0.0) or not np.all(np.isfinite(values)):
            raise DomainError('Closure needs finite non negative amounts')
        sums = values.sum(axis=-1, keepdims=True)
        if np.any(sums == 0.0):
            raise DomainError('Closure of an all zero row is undefined')
        return values / sums

    @staticmethod
    def replace_zeros(raw, epsilon):
        """Replace zero cells by epsilon and close every row again.
        Args:
            raw: (array_like) Non negative rows.
            epsilon: (float) Replacement value, positive.
        Returns:
            (np.ndarray) Rows in the simplex interior.
        """
        if not epsilon > 0.0:
            raise DomainError(f'Zero replacement needs epsilon > 0, got {epsilon!r}')
        values = np.array(raw, dtype=np.float64)
        values = np.where(values == 0.0, epsilon, values)
        return SimplexService.closure(values)

    @staticmethod
    def alpha_transform(x, alpha):
        """Power-and-renormalize map u_alpha(x).
        Args:
            x: (array_like) Composition(s).
            alpha: (float) Nonzero transformation parameter.
        Returns:
            (np.ndarray) Transformed composition(s), same shape as x.
        Raises:
            DomainError: alpha is zero or x is not in the simplex interior.
        """
        _require_nonzero(alpha, 'alpha_transform', hint=' (its alpha -> 0 '
                         'limit is the centred log-ratio, use clr)')
        if alpha == 1:
            return SimplexService.as_simplex(x)
        t = alpha * np.log(SimplexService.as_simplex(x))
        return np.exp(t - logsumexp(t, axis=-1, keepdims=True))

    @staticmethod
    def alpha_inverse(u, alpha):
        """Inverse of the alpha-transformation.
        Args:
            u: (array_like) Transformed composition(s).
            alpha: (float) Nonzero transformation parameter.
        Returns:
            (np.ndarray) Composition(s) x with u_alpha(x) = u.
        Raises:
            NumericalRangeError: A power overflows, or a recovered component
                underflows to zero.
        """
        _require_nonzero(alpha, 'alpha_inverse')
        u = SimplexService.as_simplex(u, 'u')
        if abs(alpha) < NAIVE_INVERSE_FLOOR:
            x = np.exp(SimplexService.stable_inverse_log(u, alpha))
        else:
            with np.errstate(over='ignore'):
                powered = u ** (1.0 / alpha)
                sums = powered.sum(axis=-1, keepdims=True)
            overflow = np.argwhere(~np.isfinite(np.broadcast_to(
                sums, powered.shape)) | ~np.isfinite(powered))
            if overflow.size:
                component = int(overflow[0][-1])
                raise NumericalRangeError(
                    f'u ** (1/alpha) overflows at component {component} for '
                    f'alpha={alpha!r}', component=component)
            x = powered / sums
        underflow = np.argwhere(np.atleast_2d(x) <= 0.0)
        if underflow.size:
            component = int(underflow[0][-1])
            raise NumericalRangeError(
                f'Recovered component {component} underflows to zero for '
                f'alpha={alpha!r}; work with stable_inverse_log instead',
                component=component)
        return x

    @staticmethod
    def clr(x):
        """Centred log-ratio transformation.
        Args:
            x: (array_like) Composition(s).
        Returns:
            (LogRatios) Logs, their row means and the zero-sum clr.
        """
        y = np.log(SimplexService.as_simplex(x))
        y_bar = y.mean(axis=-1)
        return LogRatios(y=y, w=y - y_bar[..., None], y_bar=y_bar)

    @staticmethod
    def alpha_metric(x, y, alpha):
        """Alpha-metric between compositions; alpha = 0 is the log-ratio
        distance computed from clr directly.
        Args:
            x: (array_like) Composition(s).
            y: (array_like) Composition(s), broadcastable against x.
            alpha: (float) Transformation parameter.
        Returns:
            (float or np.ndarray) Nonnegative distance(s).
        """
        if alpha == 0:
            diff = SimplexService.clr(x).w - SimplexService.clr(y).w
            return np.linalg.norm(diff, axis=-1)
        u_x = SimplexService.alpha_transform(x, alpha)
        u_y = SimplexService.alpha_transform(y, alpha)
        D = u_x.shape[-1]
        return D / abs(alpha) * np.linalg.norm(u_x - u_y, axis=-1)

    @staticmethod
    def alpha_distance_matrix(data, alpha):
        """Pairwise alpha-metric over the rows of a dataset.
        Args:
            data: (array_like) Matrix of compositions (n, D).
            alpha: (float) Transformation parameter.
        Returns:
            (np.ndarray) Symmetric (n, n) distance matrix.
        """
        data = np.atleast_2d(SimplexService.as_simplex(data, 'data'))
        if alpha == 0:
            points = SimplexService.clr(data).w
            scale = 1.0
        else:
            points = SimplexService.alpha_transform(data, alpha)
            scale = data.shape[1] / abs(alpha)
        diff = points[:, None, :] - points[None, :, :]
        return scale * np.linalg.norm(diff, axis=-1)

    @staticmethod
    def log_jacobian(x, alpha):
        """Log absolute Jacobian determinant of the alpha-transformation
        restricted to d = D - 1 free coordinates.
        Args:
            x: (array_like) Composition(s).
            alpha: (float) Nonzero transformation parameter.
        Returns:
            (float or np.ndarray) log|J_alpha(x)|, one value per row.
        """
        _require_nonzero(alpha, 'log_jacobian', hint=' (log|alpha| diverges)')
        y = np.log(SimplexService.as_simplex(x))
        D = y.shape[-1]
        return ((D - 1) * np.log(abs(alpha)) + (alpha - 1.0) * y.sum(axis=-1)
                - D * logsumexp(alpha * y, axis=-1))

    @staticmethod
    def stable_inverse_log(u, alpha):
        """Logs of alpha_inverse(u, alpha) without forming u ** (1/alpha).
        The pivot is the component with the largest log(u) / alpha, the
        largest u for positive alpha (lowest index on ties), so every
        exponentiated ratio is at most one.
        Args:
            u: (array_like) Transformed composition(s).
            alpha: (float) Nonzero transformation parameter.
        Returns:
            (np.ndarray) y with exp(y) = alpha_inverse(u, alpha).
        """
        _require_nonzero(alpha, 'stable_inverse_log')
        t = np.log(SimplexService.as_simplex(u, 'u')) / alpha
        pivot_index = np.argmax(t, axis=-1)[..., None]
        scaled = t - np.take_along_axis(t, pivot_index, axis=-1)
        ratios = np.exp(scaled)
        np.put_along_axis(ratios, pivot_index, 0.0, axis=-1)
        return scaled - np.log1p(ratios.sum(axis=-1, keepdims=True))

    @staticmethod
    def rescaled_transform_limit(x, alpha):
        """(D u_alpha(x) - 1) / alpha, which tends to clr(x) as alpha -> 0.
        Args:
            x: (array_like) Composition(s).
            alpha: (float) Nonzero transformation parameter.
        Returns:
            (np.ndarray) Rescaled transform, same shape as x.
        """
        u = SimplexService.alpha_transform(x, alpha)
        return (u.shape[-1] * u - 1.0) / alpha


def _require_nonzero(alpha, operation, hint=''):
    if not np.isfinite(alpha) or alpha == 0:
        raise DomainError(f'{operation} needs a finite nonzero alpha, got '
                          f'{alpha!r}{hint}')
