import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from alpha_dirichlet.config.config import get_workers
from alpha_dirichlet.service.alpha_fit_service import AlphaFitService
from alpha_dirichlet.service.asymptotic_service import (AsymptoticService,
                                                        CoalescingParams)
from alpha_dirichlet.service.dirichlet_service import (DirichletParams,
                                                       DirichletService)
from alpha_dirichlet.service.simplex_service import SimplexService
from alpha_dirichlet.utils.response_error import (AlphaDirichletError,
                                                  ConfigError, DomainError,
                                                  InputError,
                                                  NumericalRangeError)

COALESCING = 'coalescing'
GENERAL = 'general'
DIRECT_MLE = 'DirectMLE'
ASYMPTOTIC1 = 'Asymptotic1'
ASYMPTOTIC2 = 'Asymptotic2'
MIN_CURVE_SAMPLES = 100


def default_alpha_grid(upper=0.5, lower=1e-3, points=10):
    """Decreasing logarithmic grid of the mean-curve experiment."""
    return tuple(float(a) for a in np.geomspace(upper, lower, points))


@dataclass(frozen=True)
class SimConfig:
    """Setup of a simulation study; the shapes at a given alpha are
    (b / alpha^2)(1 + alpha c) in coalescing mode and b_vec / alpha^2 in
    general mode."""
    mode: str
    alpha_grid: tuple
    n: int
    seed: int
    b: float = 1.0
    c: Optional[np.ndarray] = None
    b_vec: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.mode not in (COALESCING, GENERAL):
            raise ConfigError(f'mode must be {COALESCING!r} or {GENERAL!r}, got '
                              f'{self.mode!r}')
        grid = tuple(float(a) for a in self.alpha_grid)
        if not grid or any(a == 0.0 or not np.isfinite(a) for a in grid):
            raise ConfigError('alpha_grid must be a nonempty list of finite '
                              'nonzero values')
        object.__setattr__(self, 'alpha_grid', grid)
        if self.n < 1:
            raise ConfigError(f'n must be positive, got {self.n!r}')
        vector = self.c if self.mode == COALESCING else self.b_vec
        if vector is None:
            raise ConfigError(f'{self.mode} mode needs '
                              f'{"c" if self.mode == COALESCING else "b_vec"}')
        vector = np.array(vector, dtype=np.float64)
        if vector.ndim != 1 or vector.size < 2:
            raise ConfigError('Parameter vectors need at least two entries')
        if self.mode == COALESCING:
            if abs(vector.sum()) > 1e-10:
                raise ConfigError(f'Coalescing mode needs sum(c) = 0, got '
                                  f'{vector.sum()!r}')
            if not self.b > 0.0:
                raise ConfigError(f'b must be positive, got {self.b!r}')
            object.__setattr__(self, 'c', vector)
        else:
            if not np.all(vector > 0.0):
                raise ConfigError('b_vec entries must be positive')
            object.__setattr__(self, 'b_vec', vector)

    @property
    def D(self):
        return (self.c if self.mode == COALESCING else self.b_vec).size


@dataclass(frozen=True)
class MeanCurve:
    """Per alpha Monte Carlo mean of y - ybar 1 and its standard errors."""
    alphas: np.ndarray
    mean: np.ndarray
    std_error: np.ndarray


@dataclass(frozen=True)
class OrderStudy:
    """Exact and expanded log-likelihoods on the same simulated datasets."""
    alphas: np.ndarray
    exact: np.ndarray
    asymptotic: np.ndarray

    @property
    def gap(self):
        return np.abs(self.exact - self.asymptotic)

    @property
    def ratios(self):
        """Successive gap ratios along the alpha list."""
        return self.gap[:-1] / self.gap[1:]


@dataclass(frozen=True)
class ComparisonTable:
    """Direct MLE, Asymptotic 1 and Asymptotic 2 shape estimates at one
    alpha. A row whose fit failed is None and its error is kept."""
    rows: tuple
    alpha_used: float
    component_labels: tuple
    errors: dict = field(default_factory=dict)

    def row(self, label):
        return dict(self.rows)[label]


class SimulationService:
    """
    Seeded experiment drivers. Every output is a function of the config
    and its seed; each curve alpha gets its own stream derived from the
    seed and the bits of alpha, so grids can be extended without
    resampling.
    """

    @staticmethod
    def shapes(cfg, alpha):
        """Dirichlet shapes of the transformed data at alpha."""
        try:
            if cfg.mode == COALESCING:
                return AsymptoticService.coalescing_to_gamma(
                    CoalescingParams(alpha=alpha, b=cfg.b, c=cfg.c))
            return DirichletParams(cfg.b_vec / alpha ** 2)
        except DomainError as error:
            raise ConfigError(f'Invalid shapes at alpha={alpha!r}: {error}') \
                from error

    @staticmethod
    def seed_for(cfg, alpha):
        """Independent seed sequence of one grid point."""
        key = int(np.float64(alpha).view(np.uint64))
        return np.random.SeedSequence(cfg.seed, spawn_key=(key,))

    @staticmethod
    def simulate_log_dataset(cfg, alpha):
        """Logs of raw compositions x = u_alpha^{-1}(u), u Dirichlet,
        recovered without exponentiating u ** (1 / alpha).
        Args:
            cfg: (SimConfig) Study setup.
            alpha: (float) Transformation parameter.
        Returns:
            (np.ndarray) Matrix (n, D) of log components.
        """
        if alpha == 0:
            raise ConfigError('alpha = 0 is not part of any simulation grid')
        log_u = DirichletService.sample_log(SimulationService.shapes(cfg, alpha),
                                            cfg.n, SimulationService.seed_for(cfg, alpha))
        return SimplexService.stable_inverse_log(np.exp(log_u), alpha)

    @staticmethod
    def simulate_dataset(cfg, alpha):
        """Raw compositions drawn from the transformed Dirichlet model.
        Args:
            cfg: (SimConfig) Study setup.
            alpha: (float) Transformation parameter.
        Returns:
            (np.ndarray) Matrix (n, D) of compositions.
        Raises:
            NumericalRangeError: Some component underflows to zero.
        """
        return _close_log_rows(SimulationService.simulate_log_dataset(cfg, alpha),
                               alpha)

    @staticmethod
    def mean_logratio_curve(cfg, workers=None):
        """Monte Carlo mean of y - ybar 1 at every grid alpha.
        Args:
            cfg: (SimConfig) Study setup.
            workers: (int) Threads across grid points.
        Returns:
            (MeanCurve) Means and standard errors in grid order.
        """
        start_time = time.time()
        if cfg.n < MIN_CURVE_SAMPLES:
            raise ConfigError(f'Mean curves need n >= {MIN_CURVE_SAMPLES}, got '
                              f'{cfg.n}')

        def point(alpha):
            y = SimulationService.simulate_log_dataset(cfg, alpha)
            centred = y - y.mean(axis=1, keepdims=True)
            return (centred.mean(axis=0),
                    centred.std(axis=0, ddof=1) / np.sqrt(cfg.n))

        results = _map_grid(point, cfg.alpha_grid, workers)
        logging.getLogger('alpha_dirichlet.simulation').info({
            'study': 'mean curve', 'mode': cfg.mode,
            'points': len(cfg.alpha_grid),
            'time': '%s seconds' % (time.time() - start_time)})
        return MeanCurve(alphas=np.array(cfg.alpha_grid),
                         mean=np.array([r[0] for r in results]),
                         std_error=np.array([r[1] for r in results]))

    @staticmethod
    def order_study(D, b, c, alphas, seed, n=200, workers=None):
        """Gap between the exact and the expanded log-likelihood, one
        simulated coalescing dataset per alpha, both evaluated at the true
        parameters. All datasets invert the Gamma quantiles of one matrix of
        uniforms, so the gaps differ by the remainder and not by resampling.
        Args:
            D: (int) Number of components.
            b: (float) Precision.
            c: (array_like) Zero-sum location vector of length D.
            alphas: (list) Alpha values, usually halving.
            seed: (int) Seed.
            n: (int) Observations per dataset.
            workers: (int) Threads across alphas.
        Returns:
            (OrderStudy) Exact and expanded values per alpha.
        """
        cfg = SimConfig(mode=COALESCING, alpha_grid=tuple(alphas), n=n,
                        seed=seed, b=b, c=c)
        if cfg.D != D:
            raise ConfigError(f'c has {cfg.D} entries, D is {D}')

        uniforms = np.random.default_rng(seed).random((n, D))
        # exact zeros have probability 2^-53 per cell
        uniforms = np.clip(uniforms, np.finfo(np.float64).tiny, None)

        def point(alpha):
            log_u = DirichletService.quantile_sample_log(
                SimulationService.shapes(cfg, alpha), uniforms)
            data = _close_log_rows(
                SimplexService.stable_inverse_log(np.exp(log_u), alpha), alpha)
            p = CoalescingParams(alpha=alpha, b=b, c=cfg.c)
            return (AsymptoticService.exact_loglik(data, p),
                    AsymptoticService.asymptotic_loglik(data, p))

        results = _map_grid(point, cfg.alpha_grid, workers)
        return OrderStudy(alphas=np.array(cfg.alpha_grid),
                          exact=np.array([r[0] for r in results]),
                          asymptotic=np.array([r[1] for r in results]))

    @staticmethod
    def estimator_comparison(data, alpha=None, labels=None, **fit_options):
        """Three-row estimator comparison at one alpha.
        Args:
            data: (array_like) Matrix of compositions (n, D).
            alpha: (float) Alpha to compare at, the direct MLE otherwise.
            labels: (list) Component names.
            fit_options: Passed to AlphaFitService.fit_direct.
        Returns:
            (ComparisonTable) Rows DirectMLE, Asymptotic1, Asymptotic2.
        """
        data = np.atleast_2d(SimplexService.as_simplex(data, 'data'))
        D = data.shape[1]
        labels = tuple(labels) if labels is not None else tuple(
            f'x{j + 1}' for j in range(D))
        if len(labels) != D:
            raise InputError(f'{len(labels)} labels for {D} components')
        errors = {}
        direct = None
        if alpha is None:
            fit = AlphaFitService.fit_direct(data, **fit_options)
            alpha, direct = fit.alpha_hat, fit.gamma_hat.gamma
        else:
            try:
                direct = AlphaFitService.profile_loglik(data, alpha)[1].gamma
            except AlphaDirichletError as error:
                errors[DIRECT_MLE] = str(error)
        rows = [(DIRECT_MLE, direct)]
        for label, fit_row in ((ASYMPTOTIC1, AsymptoticService.fit_asymptotic1),
                               (ASYMPTOTIC2, AsymptoticService.fit_asymptotic2)):
            try:
                rows.append((label, fit_row(data, alpha).implied_gamma.gamma))
            except AlphaDirichletError as error:
                errors[label] = str(error)
                rows.append((label, None))
        if errors:
            logging.getLogger('alpha_dirichlet.simulation').warning(
                {'comparison_gaps': errors})
        return ComparisonTable(rows=tuple(rows), alpha_used=float(alpha),
                               component_labels=labels, errors=errors)


def _close_log_rows(log_x, alpha):
    x = np.exp(log_x)
    zero = np.argwhere(x <= 0.0)
    if zero.size:
        component = int(zero[0][1])
        raise NumericalRangeError(
            f'Simulated component {component} underflows at '
            f'alpha={alpha!r}; use the log-domain simulation',
            component=component)
    return x / x.sum(axis=1, keepdims=True)


def _map_grid(point, alphas, workers):
    workers = get_workers() if workers is None else workers
    if workers > 1 and len(alphas) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(point, alphas))
    return [point(alpha) for alpha in alphas]
