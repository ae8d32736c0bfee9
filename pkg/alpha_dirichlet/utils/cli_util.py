import time

from alpha_dirichlet import __version__
from alpha_dirichlet.utils.datasets import validate_labels
from alpha_dirichlet.utils.io_util import (CLOSURE_RENORMALIZE, CLOSURE_STRICT,
                                           ZERO_EPSILON, ZERO_ERROR, IoUtil,
                                           RunReport)

# Namespace entries that never change a result.
_NOT_ECHOED = ('handler', 'argv', 'out', 'report', 'verbose', 'timing')


class CliUtil:
    """
    Helpers shared by the subcommand controllers: common arguments, data
    loading from parsed arguments and run report assembly.
    """

    @staticmethod
    def add_data_arguments(parser):
        parser.add_argument('input', help='CSV file of compositions, one per row')
        parser.add_argument('--no-header', dest='has_header', action='store_false',
                            help='first row is data, labels are generated')
        parser.add_argument('--zero-policy', choices=(ZERO_ERROR, ZERO_EPSILON),
                            default=ZERO_ERROR,
                            help='reject zero cells or replace them by --epsilon')
        parser.add_argument('--epsilon', type=float, default=None,
                            help='zero replacement value (default ZERO_EPSILON)')
        parser.add_argument('--closure', choices=(CLOSURE_STRICT, CLOSURE_RENORMALIZE),
                            default=CLOSURE_STRICT,
                            help='require unit row sums or divide rows by their sums')
        parser.add_argument('--dataset', default=None,
                            help='registered dataset name the columns must match')

    @staticmethod
    def add_search_arguments(parser):
        parser.add_argument('--alpha-min', type=float, default=-1.0)
        parser.add_argument('--alpha-max', type=float, default=1.0)
        parser.add_argument('--grid', type=int, default=None,
                            help='total coarse grid points (default GRID_SIZE)')
        parser.add_argument('--delta', type=float, default=None,
                            help='half width of the excluded neighbourhood of 0')
        parser.add_argument('--workers', type=int, default=None,
                            help='threads for independent chains (default WORKERS)')

    @staticmethod
    def add_report_argument(parser):
        parser.add_argument('--report', default=None,
                            help='also write the YAML run report to this path')

    @staticmethod
    def load_dataset(args):
        """Load the input CSV as described by the parsed arguments.
        Args:
            args: (argparse.Namespace) Parsed arguments.
        Returns:
            (Dataset) Loaded and validated dataset.
        """
        dataset = IoUtil.load_csv(args.input, has_header=args.has_header,
                                  zero_policy=args.zero_policy,
                                  epsilon=args.epsilon, closure=args.closure)
        if args.dataset:
            validate_labels(dataset, args.dataset)
        return dataset

    @staticmethod
    def search_options(args):
        return {'alpha_bounds': (args.alpha_min, args.alpha_max),
                'grid_size': args.grid, 'delta': args.delta,
                'workers': args.workers}

    @staticmethod
    def echo_config(args):
        return {key: value for key, value in sorted(vars(args).items())
                if key not in _NOT_ECHOED}

    @staticmethod
    def labelled(labels, values):
        """Map component labels to floats, None when the values are missing."""
        if values is None:
            return None
        return {label: float(value) for label, value in zip(labels, values)}

    @staticmethod
    def make_report(args, results, digest='', seed=None, start_time=None):
        """Assemble the run report of a finished command.
        Args:
            args: (argparse.Namespace) Parsed arguments.
            results: (dict) Results payload.
            digest: (str) sha256 of the input file.
            seed: (int) Seed used, if any.
            start_time: (float) time.time() at command start.
        Returns:
            (RunReport) The report, timed only with --timing.
        """
        wall_time = None
        if getattr(args, 'timing', False) and start_time is not None:
            wall_time = time.time() - start_time
        return RunReport(command=' '.join(getattr(args, 'argv', [args.command])),
                         config=CliUtil.echo_config(args), results=results,
                         version=__version__, seed=seed, input_digest=digest,
                         wall_time=wall_time)

    @staticmethod
    def write_side_report(args, report):
        if getattr(args, 'report', None):
            IoUtil.write_report(report, args.report)
