import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from alpha_dirichlet.config.config import (GOLDEN_BRACKET_WIDTH,
                                           get_alpha_delta, get_grid_size,
                                           get_workers)
from alpha_dirichlet.service.dirichlet_service import (DirichletParams,
                                                       DirichletService)
from alpha_dirichlet.service.simplex_service import SimplexService
from alpha_dirichlet.utils.response_error import (ConvergenceError,
                                                  DomainError, FitError)
from alpha_dirichlet.utils.special_functions import log_gamma

GOLDEN_RATIO = 2.0 / (1.0 + math.sqrt(5.0))
MAX_GOLDEN_ITER = 200


@dataclass(frozen=True)
class FitResult:
    """Joint maximum likelihood fit of alpha and the Dirichlet shapes."""
    alpha_hat: float
    gamma_hat: DirichletParams
    loglik: float
    iterations: int
    converged: bool
    alpha_bounds: tuple
    delta: float
    at_boundary: bool = False


@dataclass(frozen=True)
class ProfileCurve:
    """Profile log-likelihood on an increasing alpha grid. Grid points whose
    inner fit failed are listed in ``gaps`` and left out of the arrays."""
    alphas: np.ndarray
    values: np.ndarray
    params: tuple
    gaps: tuple = field(default=())

    def argmax(self):
        return int(np.argmax(self.values))


class AlphaFitService:
    """
    Likelihood of the alpha-transformed Dirichlet model, its profile over
    alpha and the direct joint maximum likelihood fit.
    """

    @staticmethod
    def transformed_loglik(data, alpha, params):
        """Log-likelihood of raw compositions when u_alpha(x) is Dirichlet,
        in its expanded form
        n logG(b+) - n sum logG(b_j) + n d log|alpha|
        + sum_ij (alpha b_j - 1) log x_ij - b+ sum_i log sum_j x_ij^alpha.
        Args:
            data: (array_like) Matrix of compositions (n, D).
            alpha: (float) Nonzero transformation parameter.
            params: (DirichletParams) Shapes b_j of the transformed data.
        Returns:
            (float) Log-likelihood.
        """
        _require_nonzero(alpha)
        y = np.log(_as_data(data))
        n, D = y.shape
        b = params.gamma
        return float(n * (log_gamma(params.gamma_plus) - np.sum(log_gamma(b)))
                     + n * (D - 1) * math.log(abs(alpha))
                     + np.sum(y @ (alpha * b - 1.0))
                     - params.gamma_plus * np.sum(logsumexp(alpha * y, axis=1)))

    @staticmethod
    def composed_loglik(data, alpha, params):
        """Same likelihood as the sum of Dirichlet log densities of the
        transformed rows plus their log Jacobians."""
        data = _as_data(data)
        u = SimplexService.alpha_transform(data, alpha)
        return float(np.sum(DirichletService.log_density(u, params))
                     + np.sum(SimplexService.log_jacobian(data, alpha)))

    @staticmethod
    def profile_loglik(data, alpha, init=None):
        """Maximum over the shapes of the transformed likelihood at fixed
        alpha. The Jacobian does not involve the shapes, so the maximizer is
        the Dirichlet MLE of the transformed rows.
        Args:
            data: (array_like) Matrix of compositions (n, D).
            alpha: (float) Nonzero transformation parameter.
            init: (DirichletParams) Warm start of the inner fit.
        Returns:
            (tuple) Profile value and the maximizing DirichletParams.
        Raises:
            ConvergenceError: The inner fit failed, annotated with alpha.
        """
        _require_nonzero(alpha)
        data = _as_data(data)
        u = SimplexService.alpha_transform(data, alpha)
        try:
            params = DirichletService.mle(u, init)
        except ConvergenceError as error:
            raise error.annotate(alpha) from error
        return AlphaFitService.transformed_loglik(data, alpha, params), params

    @staticmethod
    def alpha_grid(alpha_bounds, grid_size, delta):
        """Coarse grid of the punctured search domain
        [lower, upper] minus (-delta, delta).
        Args:
            alpha_bounds: (tuple) Lower and upper bound of alpha.
            grid_size: (int) Total number of points, at least 5.
            delta: (float) Half width of the excluded neighbourhood of 0.
        Returns:
            (list) One increasing np.ndarray per nonempty side.
        """
        lower, upper = (float(v) for v in alpha_bounds)
        if grid_size < 5:
            raise DomainError(f'grid_size must be at least 5, got {grid_size}')
        if not delta > 0.0 or not lower < upper:
            raise DomainError(f'Invalid alpha search domain {alpha_bounds!r} '
                              f'with delta={delta!r}')
        sides = []
        if lower <= -delta:
            sides.append((lower, min(upper, -delta)))
        if upper >= delta:
            sides.append((max(lower, delta), upper))
        if not sides:
            raise DomainError(f'alpha bounds {alpha_bounds!r} lie inside the '
                              f'excluded neighbourhood (-{delta}, {delta})')
        counts = [grid_size] if len(sides) == 1 else [
            grid_size // 2, grid_size - grid_size // 2]
        return [np.linspace(a, b, count) if b > a else np.array([a])
                for (a, b), count in zip(sides, counts)]

    @staticmethod
    def profile_curve(data, alpha_bounds=(-1.0, 1.0), grid_size=None,
                      delta=None, workers=None):
        """Profile log-likelihood on the coarse grid.

        Each side of the grid is a chain walked from its end farthest from
        zero towards zero, every inner fit warm started from the previous
        one. The two chains are independent and run on separate threads
        when more than one worker is configured.
        Args:
            data: (array_like) Matrix of compositions (n, D).
            alpha_bounds: (tuple) Search bounds.
            grid_size: (int) Total number of grid points.
            delta: (float) Excluded neighbourhood half width.
            workers: (int) Threads used for the chains.
        Returns:
            (ProfileCurve) Values in increasing alpha order.
        """
        data = _as_data(data)
        grid_size = get_grid_size() if grid_size is None else grid_size
        delta = get_alpha_delta() if delta is None else delta
        workers = get_workers() if workers is None else workers
        sides = AlphaFitService.alpha_grid(alpha_bounds, grid_size, delta)
        chains = [side if side[-1] < 0 else side[::-1] for side in sides]
        if workers > 1 and len(chains) > 1:
            with ThreadPoolExecutor(max_workers=min(workers, len(chains))) as pool:
                walked = list(pool.map(lambda chain: _walk_chain(data, chain),
                                       chains))
        else:
            walked = [_walk_chain(data, chain) for chain in chains]
        points = sorted((p for chain in walked for p in chain),
                        key=lambda p: p[0])
        gaps = tuple(a for a, value, _ in points if value is None)
        if gaps:
            logging.getLogger('alpha_dirichlet.fit').warning(
                {'profile_gaps': list(gaps)})
        kept = [p for p in points if p[1] is not None]
        return ProfileCurve(alphas=np.array([p[0] for p in kept]),
                            values=np.array([p[1] for p in kept]),
                            params=tuple(p[2] for p in kept), gaps=gaps)

    @staticmethod
    def fit_direct(data, alpha_bounds=(-1.0, 1.0), grid_size=None, delta=None,
                   workers=None):
        """Joint maximum likelihood of alpha and the shapes: coarse profile
        scan, then golden-section refinement in the bracket around the best
        grid point.
        Args:
            data: (array_like) Matrix of compositions (n, D).
            alpha_bounds: (tuple) Search bounds.
            grid_size: (int) Total number of grid points.
            delta: (float) Excluded neighbourhood half width.
            workers: (int) Threads used for the coarse scan.
        Returns:
            (FitResult) The fit.
        Raises:
            FitError: Every grid point failed.
        """
        start_time = time.time()
        data = _as_data(data)
        delta = get_alpha_delta() if delta is None else delta
        curve = AlphaFitService.profile_curve(data, alpha_bounds, grid_size,
                                              delta, workers)
        if curve.alphas.size == 0:
            raise FitError('The inner Dirichlet fit failed at every alpha of '
                           'the grid')
        k = curve.argmax()
        same_side = np.sign(curve.alphas) == np.sign(curve.alphas[k])
        left = k - 1 if k > 0 and same_side[k - 1] else k
        right = k + 1 if k + 1 < curve.alphas.size and same_side[k + 1] else k
        at_edge = left == k or right == k
        best = (float(curve.alphas[k]), float(curve.values[k]), curve.params[k])
        iterations, converged = 0, True
        if left != right:
            refined, iterations, converged = _golden_section(
                data, float(curve.alphas[left]), float(curve.alphas[right]),
                curve.params[k])
            if refined[1] >= best[1]:
                best = refined
        alpha_hat, loglik, params = best
        edges = (curve.alphas[0], curve.alphas[-1], -delta, delta)
        at_boundary = at_edge and min(abs(alpha_hat - e) for e in edges) \
            <= GOLDEN_BRACKET_WIDTH
        if at_boundary:
            logging.getLogger('alpha_dirichlet.fit').warning(
                {'alpha_hat': alpha_hat, 'boundary': 'search domain edge'})
        logging.getLogger('alpha_dirichlet.fit').info({
            'alpha_hat': alpha_hat, 'loglik': loglik,
            'gamma_plus': params.gamma_plus,
            'time': '%s seconds' % (time.time() - start_time)})
        return FitResult(alpha_hat=alpha_hat, gamma_hat=params, loglik=loglik,
                         iterations=iterations, converged=converged,
                         alpha_bounds=tuple(float(v) for v in alpha_bounds),
                         delta=delta, at_boundary=at_boundary)


def _walk_chain(data, chain):
    points, init = [], None
    for alpha in chain:
        try:
            value, params = AlphaFitService.profile_loglik(data, alpha, init)
        except (ConvergenceError, DomainError) as error:
            logging.getLogger('alpha_dirichlet.fit').debug(
                {'alpha': float(alpha), 'inner_fit': str(error)})
            points.append((float(alpha), None, None))
            continue
        init = params
        points.append((float(alpha), value, params))
    return points


def _golden_section(data, lower, upper, init):
    """Maximize the profile on [lower, upper] until the bracket is no wider
    than GOLDEN_BRACKET_WIDTH. Failed inner fits count as -inf."""
    cache = {}

    def evaluate(alpha):
        if alpha not in cache:
            try:
                cache[alpha] = AlphaFitService.profile_loglik(data, alpha, init)
            except (ConvergenceError, DomainError):
                cache[alpha] = (-math.inf, None)
        return cache[alpha][0]

    x1 = upper - GOLDEN_RATIO * (upper - lower)
    x2 = lower + GOLDEN_RATIO * (upper - lower)
    f1, f2 = evaluate(x1), evaluate(x2)
    iteration = 0
    while upper - lower > GOLDEN_BRACKET_WIDTH and iteration < MAX_GOLDEN_ITER:
        if f1 < f2:
            lower, x1, f1 = x1, x2, f2
            x2 = lower + GOLDEN_RATIO * (upper - lower)
            f2 = evaluate(x2)
        else:
            upper, x2, f2 = x2, x1, f1
            x1 = upper - GOLDEN_RATIO * (upper - lower)
            f1 = evaluate(x1)
        iteration += 1
    alpha = x1 if f1 >= f2 else x2
    value, params = cache[alpha]
    if params is None:
        return (alpha, -math.inf, None), iteration, False
    return (alpha, value, params), iteration, upper - lower <= GOLDEN_BRACKET_WIDTH


def _as_data(data):
    data = np.atleast_2d(SimplexService.as_simplex(data, 'data'))
    return data


def _require_nonzero(alpha):
    if not np.isfinite(alpha) or alpha == 0:
        raise DomainError(f'The transformed likelihood needs a finite nonzero '
                          f'alpha, got {alpha!r}; study alpha -> 0 through the '
                          f'asymptotic expansion')
