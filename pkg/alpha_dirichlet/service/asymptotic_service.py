"""
Small-alpha machinery of the transformed Dirichlet model.

Under the coalescing parameterization b_j = (b / alpha^2)(1 + alpha c_j),
sum(c) = 0, the exact log-likelihood has a finite alpha -> 0 limit that is
Gaussian in the centred log data. The expansion used here keeps the
alpha^1 term with constant

    C1_i = -(b / 6) (D kappa3_i - sum_j c_j^3)

which is what the third-order terms of Stirling's series and of the log
cumulant generating function of each row leave after cancellation; the
remainder is O(alpha^2).
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import logsumexp

from alpha_dirichlet.service.alpha_fit_service import AlphaFitService
from alpha_dirichlet.service.dirichlet_service import DirichletParams
from alpha_dirichlet.service.simplex_service import SimplexService
from alpha_dirichlet.utils.response_error import (DegenerateDataError,
                                                  DomainError)
from alpha_dirichlet.utils.special_functions import digamma, log_gamma

ASYMPTOTIC1 = 'Asymptotic1'
ASYMPTOTIC2 = 'Asymptotic2'
SUM_C_TOL = 1e-10


@dataclass(frozen=True)
class CoalescingParams:
    """(alpha, b, c) with sum(c) = 0 and positive induced shapes."""
    alpha: float
    b: float
    c: np.ndarray

    def __post_init__(self):
        c = np.array(self.c, dtype=np.float64)
        if not np.isfinite(self.alpha) or self.alpha == 0:
            raise DomainError(f'Coalescing parameters need a nonzero alpha, '
                              f'got {self.alpha!r}')
        if not self.b > 0.0:
            raise DomainError(f'Coalescing parameters need b > 0, got {self.b!r}')
        if c.ndim != 1 or c.size < 2:
            raise DomainError(f'c must be a vector of length >= 2, got {c.shape}')
        if abs(c.sum()) > SUM_C_TOL:
            raise DomainError(f'c must sum to 0, sums to {c.sum()!r}; centre it '
                              f'with normalize_params')
        if np.any(1.0 + self.alpha * c <= 0.0):
            raise DomainError(f'1 + alpha c_j must be positive for every j '
                              f'(alpha={self.alpha!r}, c={c.tolist()})')
        c.setflags(write=False)
        object.__setattr__(self, 'c', c)


@dataclass(frozen=True)
class CumulantSet:
    """First three sample cumulants of one row of log components."""
    k1: float
    k2: float
    k3: float


@dataclass(frozen=True)
class AsymptoticFit:
    """Estimates of one of the two asymptotic variants at a fixed alpha."""
    alpha: float
    c_hat: np.ndarray
    b_hat: float
    implied_gamma: DirichletParams
    variant: str
    b_vec: Optional[np.ndarray] = field(default=None)


class AsymptoticService:
    """
    Coalescing parameterization, the expanded log-likelihood and its
    closed-form estimators, the Gaussian limit of concentrated Dirichlet
    vectors and the verifiers of the two expansion lemmas.
    """

    @staticmethod
    def coalescing_to_gamma(p):
        """Induced Dirichlet shapes (b / alpha^2)(1 + alpha c_j).
        Args:
            p: (CoalescingParams) Coalescing parameters.
        Returns:
            (DirichletParams) Shapes.
        """
        return DirichletParams(p.b / p.alpha ** 2 * (1.0 + p.alpha * p.c))

    @staticmethod
    def sample_cumulants(y):
        """Mean, variance and third cumulant of the entries of y, taken
        along the last axis.
        Args:
            y: (array_like) Vector (or rows) of real values, length D >= 2.
        Returns:
            (CumulantSet) Cumulants, arrays when y has several rows.
        """
        y = np.asarray(y, dtype=np.float64)
        if y.shape[-1] < 2:
            raise DomainError('Sample cumulants need at least two entries')
        k1 = y.mean(axis=-1)
        centred = y - k1[..., None]
        # central moments equal the raw-moment formulas and avoid cancellation
        k2 = np.mean(centred ** 2, axis=-1)
        k3 = np.mean(centred ** 3, axis=-1)
        if k1.ndim == 0:
            return CumulantSet(k1=float(k1), k2=float(k2), k3=float(k3))
        return CumulantSet(k1=k1, k2=k2, k3=k3)

    @staticmethod
    def asymptotic_loglik(data, p, include_first_order=True):
        """Expanded log-likelihood of the coalescing model, the O(alpha^2)
        remainder dropped:
        (nd/2) log(b/2pi) - (b/2) sum_ij (y_ij - ybar_i+ - c_j)^2
        + n C0 + alpha sum_i C1_i.
        Args:
            data: (array_like) Matrix of compositions (n, D).
            p: (CoalescingParams) Coalescing parameters.
            include_first_order: (bool) Keep the alpha sum_i C1_i term.
        Returns:
            (float) Approximate log-likelihood.
        """
        y = _log_data(data)
        n, D = y.shape
        residual = y - y.mean(axis=1, keepdims=True) - p.c
        c0 = -0.5 * math.log(D) - D * y.mean()
        value = (0.5 * n * (D - 1) * math.log(p.b / (2.0 * math.pi))
                 - 0.5 * p.b * np.sum(residual ** 2) + n * c0)
        if include_first_order:
            k3 = AsymptoticService.sample_cumulants(y).k3
            c1 = -p.b / 6.0 * (D * k3 - np.sum(p.c ** 3))
            value += p.alpha * np.sum(c1)
        return float(value)

    @staticmethod
    def exact_loglik(data, p):
        """Exact transformed log-likelihood at the induced shapes."""
        return AlphaFitService.transformed_loglik(
            data, p.alpha, AsymptoticService.coalescing_to_gamma(p))

    @staticmethod
    def estimate_c_hat(data):
        """Leading term of the location estimator, ybar_+j - ybar_++.
        Args:
            data: (array_like) Matrix of compositions (n, D).
        Returns:
            (np.ndarray) c_hat, summing to zero.
        """
        y = _log_data(data)
        c_hat = y.mean(axis=0) - y.mean()
        return c_hat - c_hat.mean()

    @staticmethod
    def estimate_b_hat(data):
        """Leading term of the precision estimator: inverse mean square of
        the two-way centred log data over nd degrees of freedom.
        Args:
            data: (array_like) Matrix of compositions (n, D), n >= 2.
        Returns:
            (float) b_hat.
        Raises:
            DegenerateDataError: The two-way residuals vanish.
        """
        y = _log_data(data)
        n, D = y.shape
        if n < 2:
            raise DomainError('b_hat needs at least two observations')
        residual = (y - y.mean(axis=0, keepdims=True)
                    - y.mean(axis=1, keepdims=True) + y.mean())
        mean_square = np.sum(residual ** 2) / (n * (D - 1))
        scale = max(1.0, float(np.max(np.abs(y))))
        if mean_square <= (1e-14 * scale) ** 2:
            raise DegenerateDataError('The two-way centred log data are '
                                      'identically zero (replicated '
                                      'compositions); b_hat is unbounded')
        return float(1.0 / mean_square)

    @staticmethod
    def fit_asymptotic1(data, alpha):
        """Closed-form coalescing fit at a given alpha.
        Args:
            data: (array_like) Matrix of compositions (n, D).
            alpha: (float) Nonzero transformation parameter.
        Returns:
            (AsymptoticFit) c_hat, b_hat and the implied shapes.
        """
        c_hat = AsymptoticService.estimate_c_hat(data)
        b_hat = AsymptoticService.estimate_b_hat(data)
        p = CoalescingParams(alpha=alpha, b=b_hat, c=c_hat)
        fit = AsymptoticFit(alpha=alpha, c_hat=c_hat, b_hat=b_hat,
                            implied_gamma=AsymptoticService.coalescing_to_gamma(p),
                            variant=ASYMPTOTIC1)
        logging.getLogger('alpha_dirichlet.asymptotic').info(
            {'variant': ASYMPTOTIC1, 'alpha': alpha, 'b_hat': b_hat})
        return fit

    @staticmethod
    def fit_asymptotic2(data, alpha, init=None):
        """General Dirichlet(b / alpha^2) fit at a given alpha: the inner
        maximum likelihood reparameterized as b_j = alpha^2 gamma_j. The
        (b, c) summary is the coalescing reading of the same shapes.
        Args:
            data: (array_like) Matrix of compositions (n, D).
            alpha: (float) Nonzero transformation parameter.
            init: (DirichletParams) Warm start of the inner fit.
        Returns:
            (AsymptoticFit) Fit with b_vec and the implied shapes.
        """
        _, gamma = AlphaFitService.profile_loglik(data, alpha, init)
        b_vec = alpha ** 2 * gamma.gamma
        b_bar = float(b_vec.mean())
        c_hat = (b_vec / b_bar - 1.0) / alpha
        logging.getLogger('alpha_dirichlet.asymptotic').info(
            {'variant': ASYMPTOTIC2, 'alpha': alpha, 'b_bar': b_bar})
        return AsymptoticFit(alpha=alpha, c_hat=c_hat - c_hat.mean(), b_hat=b_bar,
                             implied_gamma=gamma, variant=ASYMPTOTIC2,
                             b_vec=b_vec)

    @staticmethod
    def normalize_params(alpha, b, c):
        """Move the mean of c into b without changing any induced shape:
        b* = b (1 + alpha cbar), c*_j = (c_j - cbar) / (1 + alpha cbar).
        Args:
            alpha: (float) Transformation parameter.
            b: (float) Precision.
            c: (array_like) Location vector with arbitrary mean.
        Returns:
            (tuple) b* and the zero-sum c*.
        Raises:
            DomainError: 1 + alpha cbar is not positive.
        """
        c = np.asarray(c, dtype=np.float64)
        c_bar = c.mean()
        factor = 1.0 + alpha * c_bar
        if factor <= 0.0:
            raise DomainError(f'1 + alpha mean(c) = {factor!r} must be positive')
        return float(b * factor), (c - c_bar) / factor

    @staticmethod
    def gaussian_limit_logdensity(v, gamma):
        """Log of the Gaussian limit of alpha^d f_{gamma/alpha^2}(gbar + alpha v)
        on the zero-sum hyperplane.
        Args:
            v: (array_like) Zero-sum vector(s).
            gamma: (DirichletParams) Limit shapes.
        Returns:
            (float or np.ndarray) Log limit density.
        """
        v = np.asarray(v, dtype=np.float64)
        if np.any(np.abs(v.sum(axis=-1)) > 1e-10):
            raise DomainError('The Gaussian limit lives on sum(v) = 0')
        g_bar = gamma.mean
        d = gamma.D - 1
        log_norm = (-0.5 * d * math.log(2.0 * math.pi)
                    + 0.5 * (d * math.log(gamma.gamma_plus)
                             - np.sum(np.log(g_bar))))
        return log_norm - 0.5 * gamma.gamma_plus * np.sum(v ** 2 / g_bar, axis=-1)

    @staticmethod
    def gaussian_limit_covariance(gamma):
        """Covariance (diag(gbar) - gbar gbar^T) / gamma_+ of the limit."""
        g_bar = gamma.mean
        return (np.diag(g_bar) - np.outer(g_bar, g_bar)) / gamma.gamma_plus

    @staticmethod
    def corollary1_mean_shift(alpha, gamma):
        """Centering (D / alpha)(gbar - 1/D) of y - ybar 1 under
        u ~ Dirichlet(gamma / alpha^2), linearized about the uniform point.
        Args:
            alpha: (float) Nonzero transformation parameter.
            gamma: (DirichletParams) Limit shapes.
        Returns:
            (np.ndarray) Shift vector.
        """
        if alpha == 0:
            raise DomainError('The mean shift needs a nonzero alpha')
        D = gamma.D
        return D / alpha * (gamma.mean - 1.0 / D)

    @staticmethod
    def exact_centered_log_mean(alpha, gamma):
        """Exact mean of y - ybar 1 when u = u_alpha(x) ~ Dirichlet(gamma /
        alpha^2): since y - ybar 1 = clr(u) / alpha, it is
        (psi(gamma_j / alpha^2) - mean_k psi(gamma_k / alpha^2)) / alpha.
        Args:
            alpha: (float) Nonzero transformation parameter.
            gamma: (DirichletParams) Limit shapes.
        Returns:
            (np.ndarray) Mean vector.
        """
        if alpha == 0:
            raise DomainError('The centred log mean needs a nonzero alpha')
        psi = digamma(gamma.gamma / alpha ** 2)
        return (psi - psi.mean()) / alpha

    @staticmethod
    def projected_quadratic_form(z, mu, b):
        """Quadratic form of z - zbar - mu with the Moore-Penrose inverse of
        the singular covariance (I - 1 1^T / D) / b, built explicitly.
        Args:
            z: (array_like) Vector of length D.
            mu: (array_like) Zero-sum mean vector.
            b: (float) Precision 1 / sigma^2.
        Returns:
            (float) Quadratic form.
        """
        z = np.asarray(z, dtype=np.float64)
        D = z.size
        sigma = (np.eye(D) - np.full((D, D), 1.0 / D)) / b
        residual = z - z.mean() - np.asarray(mu, dtype=np.float64)
        return float(residual @ np.linalg.pinv(sigma) @ residual)

    @staticmethod
    def isotropic_quadratic_form(z, mu, b):
        """b sum_j (z_j - zbar - mu_j)^2."""
        z = np.asarray(z, dtype=np.float64)
        return float(b * np.sum((z - z.mean() - np.asarray(mu)) ** 2))

    @staticmethod
    def lemma1_lhs(alpha, b, c):
        """log Gamma(sum b_j) - sum log Gamma(b_j) at the induced shapes."""
        shapes = AsymptoticService.coalescing_to_gamma(CoalescingParams(alpha, b, c))
        return float(log_gamma(shapes.gamma_plus) - np.sum(log_gamma(shapes.gamma)))

    @staticmethod
    def lemma1_rhs(alpha, b, c):
        """Expansion of ``lemma1_lhs`` through the alpha^1 term:
        bD log D / alpha^2 - d log|alpha| + (d/2) log b - (1/2) log D
        - (d/2) log 2pi - (b/2) sum c^2 + (alpha b / 6) sum c^3.
        """
        c = CoalescingParams(alpha, b, c).c
        D = c.size
        d = D - 1
        return float(b * D * math.log(D) / alpha ** 2 - d * math.log(abs(alpha))
                     + 0.5 * d * math.log(b) - 0.5 * math.log(D)
                     - 0.5 * d * math.log(2.0 * math.pi)
                     - 0.5 * b * np.sum(c ** 2) + alpha * b / 6.0 * np.sum(c ** 3))

    @staticmethod
    def lemma2_lhs(alpha, b, c, y):
        """sum_j b_j log sum_k exp(alpha y_k) at the induced shapes."""
        shapes = AsymptoticService.coalescing_to_gamma(CoalescingParams(alpha, b, c))
        return float(shapes.gamma_plus * logsumexp(alpha * np.asarray(y, dtype=np.float64)))

    @staticmethod
    def lemma2_rhs(alpha, b, c, y):
        """Expansion of ``lemma2_lhs``:
        bD log D / alpha^2 + bD k1 / alpha + bD k2 / 2 + alpha bD k3 / 6.
        """
        c = CoalescingParams(alpha, b, c).c
        D = c.size
        k = AsymptoticService.sample_cumulants(y)
        return float(b * D * (math.log(D) / alpha ** 2 + k.k1 / alpha
                              + 0.5 * k.k2 + alpha * k.k3 / 6.0))

    @staticmethod
    def stirling_remainder(alpha, b, D):
        """Leading alpha^2 (1/D - D) / (12 b) remainder of ``lemma1_rhs``
        when c = 0."""
        return alpha ** 2 * (1.0 / D - D) / (12.0 * b)


def _log_data(data):
    return np.log(np.atleast_2d(SimplexService.as_simplex(data, 'data')))
