import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaincinv, logsumexp

from alpha_dirichlet.config.config import (NEWTON_GRAD_TOL, NEWTON_REL_TOL,
                                           get_max_newton_iter)
from alpha_dirichlet.service.simplex_service import SimplexService
from alpha_dirichlet.utils.response_error import (ConvergenceError, DomainError,
                                                  NumericalRangeError)
from alpha_dirichlet.utils.special_functions import (digamma, log_gamma,
                                                     trigamma)

MAX_LOG_STEP = 3.0
MAX_HALVINGS = 40


@dataclass(frozen=True)
class DirichletParams:
    """Positive Dirichlet shape vector and its cached sum."""
    gamma: np.ndarray
    gamma_plus: float = field(init=False)

    def __post_init__(self):
        gamma = np.array(self.gamma, dtype=np.float64)
        if gamma.ndim != 1 or gamma.size < 2:
            raise DomainError(f'Dirichlet shapes must be a vector of length '
                              f'>= 2, got shape {gamma.shape}')
        if not np.all(gamma > 0.0) or not np.all(np.isfinite(gamma)):
            raise DomainError(f'Dirichlet shapes must be positive and finite: '
                              f'{gamma.tolist()}')
        gamma.setflags(write=False)
        object.__setattr__(self, 'gamma', gamma)
        object.__setattr__(self, 'gamma_plus', float(gamma.sum()))

    @property
    def mean(self):
        return self.gamma / self.gamma_plus

    @property
    def D(self):
        return self.gamma.size


class DirichletService:
    """
    Density, sampling and maximum likelihood for the Dirichlet
    distribution. The likelihood depends on the data only through the
    column means of the log components, which is what the estimator uses.
    """

    @staticmethod
    def log_density(v, params):
        """Dirichlet log density.
        Args:
            v: (array_like) Composition(s), shape (D,) or (n, D).
            params: (DirichletParams) Shape parameters.
        Returns:
            (float or np.ndarray) Log density per row.
        """
        log_v = np.log(SimplexService.as_simplex(v, 'v'))
        return (_log_normalizer(params.gamma)
                + log_v @ (params.gamma - 1.0))

    @staticmethod
    def loglik(data, params):
        """Summed log density of a dataset."""
        return float(np.sum(DirichletService.log_density(
            np.atleast_2d(data), params)))

    @staticmethod
    def mean_log(data):
        """Sufficient statistics of a dataset.
        Args:
            data: (array_like) Matrix of compositions (n, D).
        Returns:
            (tuple) Column means of log components and the row count.
        """
        log_data = np.log(np.atleast_2d(SimplexService.as_simplex(data, 'data')))
        return log_data.mean(axis=0), log_data.shape[0]

    @staticmethod
    def score(data, params):
        """Gradient of the summed log density with respect to the shapes."""
        mean_log, n = DirichletService.mean_log(data)
        return _score(mean_log, n, params.gamma)

    @staticmethod
    def sample(params, n, seed):
        """Draw i.i.d. Dirichlet vectors by normalizing Gamma variates.
        Args:
            params: (DirichletParams) Shape parameters.
            n: (int) Number of draws, at least one.
            seed: (int, SeedSequence or Generator) Source of randomness;
                equal seeds give equal draws.
        Returns:
            (np.ndarray) Matrix of compositions (n, D).
        Raises:
            NumericalRangeError: A component underflows to zero, which
                happens for shapes well below one; use ``sample_log``.
        """
        x = np.exp(DirichletService.sample_log(params, n, seed))
        zero = np.argwhere(x == 0.0)
        if zero.size:
            component = int(zero[0][1])
            raise NumericalRangeError(
                f'Dirichlet draw underflows in component {component}; use the '
                f'log-domain sampler', component=component)
        return x

    @staticmethod
    def sample_log(params, n, seed):
        """Same draws as ``sample`` returned as logs of the components.
        Shapes below one are drawn as G(a) = G(a + 1) U^(1/a), so the logs
        stay finite where the variates themselves would underflow."""
        if n < 1:
            raise DomainError(f'Sample size must be at least 1, got {n!r}')
        rng = np.random.default_rng(seed)
        size = (int(n), params.D)
        small = params.gamma < 1.0
        log_variates = np.log(rng.standard_gamma(params.gamma + small, size=size))
        if np.any(small):
            # 1 - U lies in (0, 1]
            log_u = np.log1p(-rng.random(size))
            log_variates = log_variates + np.where(small, log_u / params.gamma, 0.0)
        return log_variates - logsumexp(log_variates, axis=1, keepdims=True)

    @staticmethod
    def quantile_sample_log(params, uniforms):
        """Log Dirichlet draws from the Gamma quantiles of given uniforms.
        The same uniforms under different shapes give draws that move
        smoothly with the shapes (common random numbers).
        Args:
            params: (DirichletParams) Shape parameters.
            uniforms: (np.ndarray) Matrix (n, D) of values in (0, 1).
        Returns:
            (np.ndarray) Matrix (n, D) of log components.
        """
        uniforms = np.asarray(uniforms, dtype=np.float64)
        if uniforms.ndim != 2 or uniforms.shape[1] != params.D:
            raise DomainError(f'Uniforms must have shape (n, {params.D}), got '
                              f'{uniforms.shape}')
        if np.any((uniforms <= 0.0) | (uniforms >= 1.0)):
            raise DomainError('Uniforms must lie strictly inside (0, 1)')
        log_variates = np.log(gammaincinv(params.gamma, uniforms))
        return log_variates - logsumexp(log_variates, axis=1, keepdims=True)

    @staticmethod
    def moment_init(data):
        """Moment matching start: mean from the column means, precision from
        the median over components of m_j (1 - m_j) / var_j - 1.
        Args:
            data: (array_like) Matrix of compositions (n, D).
        Returns:
            (DirichletParams) Starting shapes.
        """
        data = np.atleast_2d(SimplexService.as_simplex(data, 'data'))
        mean = data.mean(axis=0)
        var = data.var(axis=0)
        with np.errstate(divide='ignore'):
            precision = mean * (1.0 - mean) / var - 1.0
        precision = precision[np.isfinite(precision) & (precision > 0.0)]
        scale = float(np.median(precision)) if precision.size else 1.0
        return DirichletParams(mean * max(scale, 1e-3))

    @staticmethod
    def mle(data, init=None):
        """Maximum likelihood shapes by Newton-Raphson on log-shapes.
        Args:
            data: (array_like) Matrix of compositions (n, D), n >= 2.
            init: (DirichletParams) Starting point, moment matching otherwise.
        Returns:
            (DirichletParams) Shapes whose score has max-norm <= 1e-8 n.
        Raises:
            ConvergenceError: The iteration cap was reached first.
        """
        data = np.atleast_2d(SimplexService.as_simplex(data, 'data'))
        if data.shape[0] < 2:
            raise DomainError('Dirichlet maximum likelihood needs at least two '
                              'observations')
        if init is None:
            init = DirichletService.moment_init(data)
        elif init.D != data.shape[1]:
            raise DomainError(f'Initial shapes have length {init.D}, data has '
                              f'{data.shape[1]} components')
        mean_log, n = DirichletService.mean_log(data)
        return DirichletService.mle_from_stats(mean_log, n, init)

    @staticmethod
    def mle_from_stats(mean_log, n, init):
        """Newton iterations on the sufficient statistics.

        The Hessian in shape space is diag(q) + z 1 1^T with
        q_j = -n psi'(gamma_j) and z = n psi'(gamma_+), so the Newton
        direction is solved in closed form. The step is applied to the
        log-shapes, which keeps them positive, and halved while the
        likelihood decreases.
        Args:
            mean_log: (np.ndarray) Column means of the log components.
            n: (int) Number of observations.
            init: (DirichletParams) Starting point.
        Returns:
            (DirichletParams) Fitted shapes.
        """
        logger = logging.getLogger('alpha_dirichlet.dirichlet')
        max_iter = get_max_newton_iter()
        gamma = np.array(init.gamma, dtype=np.float64)
        value = _loglik(mean_log, n, gamma)
        grad = _score(mean_log, n, gamma)
        stalled = 0
        for iteration in range(1, max_iter + 1):
            grad_norm = float(np.max(np.abs(grad)))
            if grad_norm <= NEWTON_GRAD_TOL * n:
                logger.debug({'iterations': iteration - 1,
                              'grad_norm': grad_norm,
                              'gamma_plus': float(gamma.sum())})
                return DirichletParams(gamma)
            q = -n * trigamma(gamma)
            z = n * trigamma(gamma.sum())
            b = np.sum(grad / q) / (1.0 / z + np.sum(1.0 / q))
            log_step = np.clip(-(grad - b) / q / gamma, -MAX_LOG_STEP,
                               MAX_LOG_STEP)
            slack = 1e-13 * n * _magnitude(mean_log, gamma)
            t = 1.0
            for _ in range(MAX_HALVINGS):
                candidate = gamma * np.exp(t * log_step)
                candidate_value = _loglik(mean_log, n, candidate)
                if candidate_value >= value - slack:
                    break
                t *= 0.5
            else:
                raise ConvergenceError(
                    'Dirichlet Newton step found no likelihood increase',
                    last_iterate=gamma, grad_norm=grad_norm,
                    iterations=iteration)
            change = abs(candidate_value - value)
            gamma, value = candidate, candidate_value
            grad = _score(mean_log, n, gamma)
            # two full steps in a row without progress: rounding floor of the score
            stalled = stalled + 1 if (change <= NEWTON_REL_TOL * max(abs(value), 1.0)
                                      and t == 1.0) else 0
            if stalled == 2:
                grad_norm = float(np.max(np.abs(grad)))
                # the likelihood flattens before the score does at large gamma_plus
                level = logging.INFO if grad_norm > NEWTON_GRAD_TOL * n \
                    else logging.DEBUG
                logger.log(level, {'iterations': iteration, 'stop': 'relative change',
                                   'grad_norm': grad_norm,
                                   'gamma_plus': float(gamma.sum())})
                return DirichletParams(gamma)
        grad_norm = float(np.max(np.abs(grad)))
        raise ConvergenceError(
            f'Dirichlet Newton iterations did not converge after {max_iter} '
            f'steps, score max-norm {grad_norm:.3e}', last_iterate=gamma,
            grad_norm=grad_norm, iterations=max_iter)


def _log_normalizer(gamma):
    return log_gamma(gamma.sum()) - np.sum(log_gamma(gamma))


def _loglik(mean_log, n, gamma):
    return n * (_log_normalizer(gamma) + float(np.dot(gamma - 1.0, mean_log)))


def _score(mean_log, n, gamma):
    return n * (digamma(gamma.sum()) - digamma(gamma) + mean_log)


def _magnitude(mean_log, gamma):
    return (abs(log_gamma(gamma.sum())) + np.sum(np.abs(log_gamma(gamma)))
            + np.sum(np.abs(gamma * mean_log)))
