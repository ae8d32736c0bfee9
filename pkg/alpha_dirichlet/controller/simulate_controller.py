import logging
import time

from alpha_dirichlet.config.config import get_seed
from alpha_dirichlet.service.simulation_service import (COALESCING,
                                                        SimConfig,
                                                        SimulationService,
                                                        default_alpha_grid)
from alpha_dirichlet.utils.cli_util import CliUtil
from alpha_dirichlet.utils.io_util import IoUtil
from alpha_dirichlet.utils.response_error import ConfigError

CURVE = 'curve'
ORDER = 'order'
DEFAULT_CURVE_N = 10000
DEFAULT_ORDER_N = 200
DEFAULT_ORDER_ALPHAS = (0.04, 0.02, 0.01)

_KEYS = ('study', 'mode', 'alphas', 'n', 'seed', 'b', 'c', 'b_vec', 'D')


def register(subparsers, parents):
    parser = subparsers.add_parser(
        'simulate', parents=parents,
        help='mean log-ratio curves or order-of-accuracy studies from a config')
    parser.add_argument('config', help='key=value study description')
    parser.add_argument('--seed', type=int, default=None,
                        help='overrides the seed of the config file')
    parser.add_argument('--workers', type=int, default=None)
    parser.add_argument('--out', default=None, help='output CSV')
    CliUtil.add_report_argument(parser)
    parser.set_defaults(handler=simulate)


def read_study(path, seed=None):
    """Parse a simulation config file.

    Recognised keys: study (curve or order), mode (coalescing or general),
    alphas, n, seed, b, c, b_vec and D. Floats need a decimal point, vectors
    are comma separated.
    Args:
        path: (str) Config file.
        seed: (int) Seed overriding the file's.
    Returns:
        (tuple) Study name and its SimConfig.
    """
    raw = IoUtil.read_key_values(path)
    unknown = sorted(set(raw) - set(_KEYS))
    if unknown:
        raise ConfigError(f'Unknown config keys: {", ".join(unknown)}')
    study = raw.get('study', CURVE)
    if study not in (CURVE, ORDER):
        raise ConfigError(f'study must be {CURVE!r} or {ORDER!r}, got {study!r}')
    mode = raw.get('mode', COALESCING)
    if study == ORDER and mode != COALESCING:
        raise ConfigError('Order studies run on the coalescing model only')
    if 'alphas' in raw:
        alphas = tuple(IoUtil.parse_floats(raw['alphas'], 'alphas'))
    else:
        alphas = default_alpha_grid() if study == CURVE else DEFAULT_ORDER_ALPHAS
    n = IoUtil.parse_int(raw['n'], 'n') if 'n' in raw else (
        DEFAULT_CURVE_N if study == CURVE else DEFAULT_ORDER_N)
    if seed is None:
        seed = IoUtil.parse_int(raw['seed'], 'seed') if 'seed' in raw else get_seed()
    cfg = SimConfig(
        mode=mode, alpha_grid=alphas, n=n, seed=seed,
        b=IoUtil.parse_float(raw['b'], 'b') if 'b' in raw else 1.0,
        c=IoUtil.parse_floats(raw['c'], 'c') if 'c' in raw else None,
        b_vec=IoUtil.parse_floats(raw['b_vec'], 'b_vec') if 'b_vec' in raw else None)
    if 'D' in raw and IoUtil.parse_int(raw['D'], 'D') != cfg.D:
        raise ConfigError(f'D = {raw["D"]} but the parameter vector has '
                          f'{cfg.D} entries')
    return study, cfg


def simulate(args):
    """Simulate subcommand handler.
    Args:
        args: (argparse.Namespace) Parsed arguments.
    Returns:
        (int) Exit code.
    """
    start_time = time.time()
    study, cfg = read_study(args.config, args.seed)
    if study == CURVE:
        curve = SimulationService.mean_logratio_curve(cfg, workers=args.workers)
        header = (('alpha',) + tuple(f'mean_{j + 1}' for j in range(cfg.D))
                  + tuple(f'se_{j + 1}' for j in range(cfg.D)))
        rows = [(alpha,) + tuple(mean) + tuple(se) for alpha, mean, se
                in zip(curve.alphas, curve.mean, curve.std_error)]
    else:
        order = SimulationService.order_study(cfg.D, cfg.b, cfg.c, cfg.alpha_grid,
                                              cfg.seed, n=cfg.n,
                                              workers=args.workers)
        header = ('alpha', 'exact', 'asymptotic', 'gap')
        rows = list(zip(order.alphas, order.exact, order.asymptotic, order.gap))
    IoUtil.write_csv(header, rows, args.out)
    results = {'study': study, 'mode': cfg.mode, 'n': cfg.n, 'D': cfg.D,
               'alphas': list(cfg.alpha_grid)}
    CliUtil.write_side_report(args, CliUtil.make_report(
        args, results, digest=IoUtil.file_digest(args.config), seed=cfg.seed,
        start_time=start_time))
    logging.getLogger('alpha_dirichlet.cli').info(
        {'command': 'simulate', 'study': study, 'points': len(rows),
         'time': '%s seconds' % (time.time() - start_time)})
    return 0
