import logging
import time

import numpy as np

from alpha_dirichlet.config.config import get_seed
from alpha_dirichlet.service.asymptotic_service import AsymptoticService
from alpha_dirichlet.service.simplex_service import Composition
from alpha_dirichlet.utils.cli_util import CliUtil
from alpha_dirichlet.utils.io_util import IoUtil

VERIFY_ALPHAS = (0.04, 0.02, 0.01)
VERIFY_B = 1.0
VERIFY_C = (0.1, 0.3, -0.4)
VERIFY_ROW = (0.2, 0.3, 0.5)
RATIO_BAND = (3.2, 4.8)
INSTANCES = 100
QUADRATIC_FORM_TOL = 1e-10
REPARAMETERIZATION_TOL = 1e-12
STIRLING_REL_TOL = 1e-2
FAILED_CHECK = 1


def register(subparsers, parents):
    parser = subparsers.add_parser(
        'verify', parents=parents,
        help='check the expansion lemmas and the exact identities')
    parser.add_argument('--seed', type=int, default=None,
                        help='seed of the random identity instances')
    parser.add_argument('--out', default=None, help='YAML report path')
    parser.set_defaults(handler=verify)


def _order_check(lhs, rhs):
    residuals = [abs(lhs(alpha) - rhs(alpha)) for alpha in VERIFY_ALPHAS]
    ratios = [a / b for a, b in zip(residuals[:-1], residuals[1:])]
    passed = all(RATIO_BAND[0] <= r <= RATIO_BAND[1] for r in ratios)
    return {'alphas': list(VERIFY_ALPHAS), 'residuals': residuals,
            'ratios': ratios, 'passed': passed}


def lemma1_check():
    """Gamma-ratio expansion gaps shrink quadratically as alpha halves."""
    return _order_check(
        lambda a: AsymptoticService.lemma1_lhs(a, VERIFY_B, VERIFY_C),
        lambda a: AsymptoticService.lemma1_rhs(a, VERIFY_B, VERIFY_C))


def lemma2_check():
    """Log-sum-power expansion gaps shrink quadratically as alpha halves."""
    y = np.log(Composition.of(VERIFY_ROW).values)
    return _order_check(
        lambda a: AsymptoticService.lemma2_lhs(a, VERIFY_B, VERIFY_C, y),
        lambda a: AsymptoticService.lemma2_rhs(a, VERIFY_B, VERIFY_C, y))


def stirling_check():
    """With c = 0 the gamma-ratio gap is the closed-form Stirling remainder."""
    alpha, D = VERIFY_ALPHAS[-1], len(VERIFY_C)
    c = np.zeros(D)
    gap = (AsymptoticService.lemma1_lhs(alpha, VERIFY_B, c)
           - AsymptoticService.lemma1_rhs(alpha, VERIFY_B, c))
    remainder = AsymptoticService.stirling_remainder(alpha, VERIFY_B, D)
    residual = abs(gap - remainder) / abs(remainder)
    return {'alpha': alpha, 'gap': gap, 'remainder': remainder,
            'residual': residual, 'passed': residual <= STIRLING_REL_TOL}


def quadratic_form_check(rng):
    """Pseudo-inverse quadratic form equals the isotropic one."""
    worst = 0.0
    for _ in range(INSTANCES):
        D = int(rng.integers(2, 7))
        z = rng.normal(size=D)
        mu = rng.normal(size=D)
        mu -= mu.mean()
        b = float(rng.uniform(0.5, 4.0))
        worst = max(worst, abs(AsymptoticService.projected_quadratic_form(z, mu, b)
                               - AsymptoticService.isotropic_quadratic_form(z, mu, b)))
    return {'instances': INSTANCES, 'residual': worst,
            'passed': worst <= QUADRATIC_FORM_TOL}


def reparameterization_check(rng):
    """Moving mean(c) into b leaves every induced shape unchanged."""
    worst = 0.0
    for _ in range(INSTANCES):
        D = int(rng.integers(2, 7))
        alpha = float(rng.choice((-1.0, 1.0)) * rng.uniform(0.01, 0.5))
        b = float(rng.uniform(0.5, 2.0))
        c = rng.normal(scale=0.5, size=D)
        b_star, c_star = AsymptoticService.normalize_params(alpha, b, c)
        shapes = b / alpha ** 2 * (1.0 + alpha * c)
        shapes_star = b_star / alpha ** 2 * (1.0 + alpha * c_star)
        worst = max(worst, float(np.max(np.abs(shapes - shapes_star))
                                 / np.max(np.abs(shapes))))
    return {'instances': INSTANCES, 'residual': worst,
            'passed': worst <= REPARAMETERIZATION_TOL}


def verify(args):
    """Verify subcommand handler: runs every check and writes the report.
    Args:
        args: (argparse.Namespace) Parsed arguments.
    Returns:
        (int) 0 when every check passes, 1 otherwise.
    """
    start_time = time.time()
    seed = get_seed() if args.seed is None else args.seed
    rng = np.random.default_rng(seed)
    checks = {
        'lemma1_order': lemma1_check(),
        'lemma2_order': lemma2_check(),
        'stirling_remainder': stirling_check(),
        'quadratic_form_identity': quadratic_form_check(rng),
        'reparameterization_identity': reparameterization_check(rng),
    }
    failed = sorted(name for name, check in checks.items() if not check['passed'])
    results = {'checks': checks, 'passed': not failed}
    IoUtil.write_report(CliUtil.make_report(args, results, seed=seed,
                                            start_time=start_time), args.out)
    if failed:
        logging.getLogger('alpha_dirichlet.cli').warning({'failed_checks': failed})
        return FAILED_CHECK
    return 0
