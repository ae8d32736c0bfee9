import logging
import time

from alpha_dirichlet.service.alpha_fit_service import AlphaFitService
from alpha_dirichlet.service.asymptotic_service import AsymptoticService
from alpha_dirichlet.service.dirichlet_service import DirichletParams
from alpha_dirichlet.service.simulation_service import SimulationService
from alpha_dirichlet.utils.cli_util import CliUtil
from alpha_dirichlet.utils.io_util import IoUtil

BOTH = 'both'


def register(subparsers, parents):
    fit_parser = subparsers.add_parser(
        'fit', parents=parents,
        help='joint maximum likelihood of alpha and the Dirichlet shapes')
    CliUtil.add_data_arguments(fit_parser)
    CliUtil.add_search_arguments(fit_parser)
    fit_parser.add_argument('--out', default=None, help='YAML report path')
    fit_parser.set_defaults(handler=fit)

    profile_parser = subparsers.add_parser(
        'profile', parents=parents, help='profile log-likelihood on the alpha grid')
    CliUtil.add_data_arguments(profile_parser)
    CliUtil.add_search_arguments(profile_parser)
    profile_parser.add_argument('--out', default=None, help='output CSV')
    CliUtil.add_report_argument(profile_parser)
    profile_parser.set_defaults(handler=profile)

    asymptotic_parser = subparsers.add_parser(
        'asymptotic', parents=parents,
        help='closed-form and reparameterized small-alpha fits at one alpha')
    CliUtil.add_data_arguments(asymptotic_parser)
    asymptotic_parser.add_argument('--alpha', type=float, required=True)
    asymptotic_parser.add_argument('--variant', choices=('1', '2', BOTH),
                                   default=BOTH)
    asymptotic_parser.add_argument('--out', default=None, help='YAML report path')
    asymptotic_parser.set_defaults(handler=asymptotic)

    compare_parser = subparsers.add_parser(
        'compare', parents=parents,
        help='direct, Asymptotic 1 and Asymptotic 2 shapes side by side')
    CliUtil.add_data_arguments(compare_parser)
    CliUtil.add_search_arguments(compare_parser)
    compare_parser.add_argument('--alpha', type=float, default=None,
                                help='compare at this alpha, the direct fit otherwise')
    compare_parser.add_argument('--out', default=None, help='output CSV')
    CliUtil.add_report_argument(compare_parser)
    compare_parser.set_defaults(handler=compare)


def fit(args):
    """Fit subcommand handler, writes the run report.
    Args:
        args: (argparse.Namespace) Parsed arguments.
    Returns:
        (int) Exit code.
    """
    start_time = time.time()
    dataset = CliUtil.load_dataset(args)
    result = AlphaFitService.fit_direct(dataset.rows, **CliUtil.search_options(args))
    results = {
        'alpha_hat': result.alpha_hat,
        'loglik': result.loglik,
        'gamma_hat': CliUtil.labelled(dataset.component_labels,
                                      result.gamma_hat.gamma),
        'gamma_plus': result.gamma_hat.gamma_plus,
        'iterations': result.iterations,
        'converged': result.converged,
        'at_boundary': result.at_boundary,
        'alpha_bounds': list(result.alpha_bounds),
        'delta': result.delta,
        'n': int(dataset.rows.shape[0]),
    }
    report = CliUtil.make_report(args, results, digest=dataset.digest,
                                 start_time=start_time)
    IoUtil.write_report(report, args.out)
    return 0


def profile(args):
    """Profile subcommand handler. Every grid point gets a row; failed
    inner fits leave the value cells empty."""
    start_time = time.time()
    dataset = CliUtil.load_dataset(args)
    options = CliUtil.search_options(args)
    curve = AlphaFitService.profile_curve(dataset.rows, **options)
    rows = [(alpha, value, params.gamma_plus) for alpha, value, params
            in zip(curve.alphas, curve.values, curve.params)]
    rows.extend((alpha, None, None) for alpha in curve.gaps)
    rows.sort(key=lambda row: row[0])
    IoUtil.write_csv(('alpha', 'profile_loglik', 'gamma_plus'), rows, args.out)
    best = curve.argmax() if curve.alphas.size else None
    results = {'points': len(rows), 'gaps': list(curve.gaps),
               'best_alpha': None if best is None else float(curve.alphas[best])}
    CliUtil.write_side_report(args, CliUtil.make_report(
        args, results, digest=dataset.digest, start_time=start_time))
    return 0


def asymptotic(args):
    """Asymptotic subcommand handler, writes the run report."""
    start_time = time.time()
    dataset = CliUtil.load_dataset(args)
    labels = dataset.component_labels
    results = {'alpha': args.alpha}
    fitters = []
    if args.variant in ('1', BOTH):
        fitters.append(AsymptoticService.fit_asymptotic1)
    if args.variant in ('2', BOTH):
        fitters.append(AsymptoticService.fit_asymptotic2)
    for fitter in fitters:
        estimate = fitter(dataset.rows, args.alpha)
        entry = {'b_hat': estimate.b_hat,
                 'c_hat': CliUtil.labelled(labels, estimate.c_hat),
                 'implied_gamma': CliUtil.labelled(labels,
                                                   estimate.implied_gamma.gamma)}
        if estimate.b_vec is not None:
            entry['b_vec'] = CliUtil.labelled(labels, estimate.b_vec)
            # covariance of (u - gbar) / alpha in the small-alpha limit
            entry['limit_covariance'] = AsymptoticService.gaussian_limit_covariance(
                DirichletParams(estimate.b_vec)).tolist()
        results[estimate.variant] = entry
    report = CliUtil.make_report(args, results, digest=dataset.digest,
                                 start_time=start_time)
    IoUtil.write_report(report, args.out)
    return 0


def compare(args):
    """Compare subcommand handler: a three-row table, one column per
    component, empty cells where an estimator failed."""
    start_time = time.time()
    dataset = CliUtil.load_dataset(args)
    options = CliUtil.search_options(args)
    table = SimulationService.estimator_comparison(
        dataset.rows, alpha=args.alpha, labels=dataset.component_labels, **options)
    rows = [(label, table.alpha_used) + tuple(
        [None] * len(table.component_labels) if values is None else values)
        for label, values in table.rows]
    IoUtil.write_csv(('estimator', 'alpha') + tuple(table.component_labels),
                     rows, args.out)
    results = {'alpha_used': table.alpha_used,
               'rows': {label: CliUtil.labelled(table.component_labels, values)
                        for label, values in table.rows},
               'errors': dict(table.errors)}
    CliUtil.write_side_report(args, CliUtil.make_report(
        args, results, digest=dataset.digest, start_time=start_time))
    if table.errors:
        logging.getLogger('alpha_dirichlet.cli').warning(
            {'command': 'compare', 'gaps': sorted(table.errors)})
    return 0
