import logging
import time

from alpha_dirichlet.service.simplex_service import SimplexService
from alpha_dirichlet.utils.cli_util import CliUtil
from alpha_dirichlet.utils.io_util import IoUtil
from alpha_dirichlet.utils.response_error import IO_ERROR, raise_error


def register(subparsers, parents):
    parser = subparsers.add_parser(
        'transform', parents=parents,
        help='apply the alpha-transformation, its inverse or clr to a CSV')
    CliUtil.add_data_arguments(parser)
    parser.add_argument('--alpha', type=float, default=None)
    parser.add_argument('--inverse', action='store_true',
                        help='map transformed rows back to compositions')
    parser.add_argument('--clr', action='store_true',
                        help='centred log-ratio instead of an alpha power')
    parser.add_argument('--distances', action='store_true',
                        help='pairwise alpha-metric between rows (clr distance '
                             'with --clr)')
    parser.add_argument('--out', default=None, help='output CSV, stdout otherwise')
    CliUtil.add_report_argument(parser)
    parser.set_defaults(handler=transform)


def transform(args):
    """Transform subcommand handler.
    Args:
        args: (argparse.Namespace) Parsed arguments.
    Returns:
        (int) Exit code.
    """
    start_time = time.time()
    if args.inverse and (args.clr or args.distances):
        raise_error(IO_ERROR, '--inverse only applies to the alpha-transformation')
    if not args.clr and args.alpha is None:
        raise_error(IO_ERROR, 'transform needs --alpha or --clr')
    dataset = CliUtil.load_dataset(args)
    header = dataset.component_labels
    if args.distances:
        rows = SimplexService.alpha_distance_matrix(
            dataset.rows, 0.0 if args.clr else args.alpha)
        header = tuple(f'row_{i + 1}' for i in range(rows.shape[0]))
    elif args.clr:
        rows = SimplexService.clr(dataset.rows).w
    elif args.inverse:
        rows = SimplexService.alpha_inverse(dataset.rows, args.alpha)
    else:
        rows = SimplexService.alpha_transform(dataset.rows, args.alpha)
    IoUtil.write_csv(header, rows, args.out)
    report = CliUtil.make_report(args, {'rows': int(rows.shape[0]),
                                        'components': list(dataset.component_labels)},
                                 digest=dataset.digest, start_time=start_time)
    CliUtil.write_side_report(args, report)
    logging.getLogger('alpha_dirichlet.cli').info(
        {'command': 'transform', 'rows': int(rows.shape[0]),
         'time': '%s seconds' % (time.time() - start_time)})
    return 0
