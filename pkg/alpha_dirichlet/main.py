import argparse
import logging
import sys

from alpha_dirichlet import __version__, setup_logging
from alpha_dirichlet.controller import (fit_controller, simulate_controller,
                                        transform_controller, verify_controller)
from alpha_dirichlet.utils.response_error import AlphaDirichletError


def build_parser():
    """Argument parser with one subcommand per controller entry."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--verbose', action='store_true',
                        help='log completed steps to stderr')
    common.add_argument('--timing', action='store_true',
                        help='write the wall time into the run report')
    parser = argparse.ArgumentParser(
        prog='alpha-dirichlet',
        description='Alpha-transformed Dirichlet models for compositional data.')
    parser.add_argument('--version', action='version',
                        version=f'%(prog)s {__version__}')
    subparsers = parser.add_subparsers(dest='command', metavar='command')
    subparsers.required = True
    for controller in (transform_controller, fit_controller,
                       simulate_controller, verify_controller):
        controller.register(subparsers, [common])
    return parser


def main(argv=None):
    """
    Command line entry point.
    Args:
        argv: (list) Arguments without the program name, sys.argv otherwise.
    Returns:
        (int) Exit code: 0 on success, 2 input, 3 domain, 4 convergence.
    """
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(argv)
    args.argv = ['alpha-dirichlet'] + argv
    setup_logging(args.verbose)
    try:
        return args.handler(args)
    except AlphaDirichletError as error:
        logging.getLogger('alpha_dirichlet.cli').error(
            {'command': args.command, 'code': error.code, 'error': error.detail})
        return error.code


if __name__ == '__main__':
    sys.exit(main())
