#!/usr/bin/env python
"""Rank neural architectures by training speed and run search experiments."""
import argparse
import logging
import sys
from framework import __version__
from framework.commands.budget import run_budget
from framework.commands.diffnas import run_diffnas
from framework.commands.gentoy import run_gen_toy
from framework.commands.rankeval import run_rankeval
from framework.commands.report import run_report
from framework.commands.search import run_search
from framework.config import COMMAND_CONFIGS
from framework.config import load_config
from framework.config import override
from framework.errors import EXIT_SUCCESS
from framework.errors import exit_code_for
from framework.utils.loggingutils import configure_logging


def run_command(args):
    """Load the configuration of the selected command and run it.

    Parameters
    ----------
    args: argparse.Namespace, required
        The command-line arguments of the script.
    """
    if args.command == 'report':
        run_report(args.out)
        return
    config = load_config(args.config, COMMAND_CONFIGS[args.command])
    config = override(config, seed=args.seed)
    logging.info("Running %s with config %s (seed %s).", args.command,
                 args.config, config.seed)
    if args.command == 'gen-toy':
        run_gen_toy(config, args.out, jobs=args.jobs)
    elif args.command == 'rankeval':
        run_rankeval(config, args.out, svg=args.svg)
    elif args.command == 'budget':
        run_budget(config, args.out)
    elif args.command == 'search':
        run_search(config, args.out, jobs=args.jobs, svg=args.svg)
    else:
        run_diffnas(config, args.out, jobs=args.jobs, svg=args.svg)


def main(args):
    """Run the selected command and map its outcome to an exit code.

    Parameters
    ----------
    args: argparse.Namespace, required
        The command-line arguments of the script.

    Returns
    -------
    exit_code: int
        0 on success, 1 on invalid input, 2 on any other failure.
    """
    try:
        run_command(args)
    except Exception as e:
        logging.error("Command %s failed: %s", args.command, e, exc_info=e)
        return exit_code_for(e)
    logging.info("That's all folks!")
    return EXIT_SUCCESS


def positive_int(value):
    """Parse a strictly positive integer argument."""
    number = int(value)
    if number < 1:
        raise argparse.ArgumentTypeError(
            "expected a positive integer, got {}".format(value))
    return number


def add_common_arguments(parser, needs_config=True):
    """Add the arguments shared by every subcommand."""
    if needs_config:
        parser.add_argument(
            '--config',
            help="""
            The path of the JSON configuration file. A manifest.json written
            by a previous run is accepted as well and reruns it.
            """,
            required=True)
        parser.add_argument('--seed',
                            help="Overrides the master seed of the config.",
                            type=int,
                            default=None)
        parser.add_argument('--jobs',
                            help="The number of worker processes.",
                            type=positive_int,
                            default=1)
        parser.add_argument('--svg',
                            help="Also write SVG charts of the reports.",
                            action='store_true')
    parser.add_argument('--out',
                        help="The path of the output directory.",
                        type=str,
                        required=True)
    parser.add_argument(
        '-l',
        '--log-level',
        help="The level of details to print when running.",
        choices=['debug', 'info', 'warning', 'error', 'critical'],
        default='info')
    parser.add_argument('--log-file',
                        help="""
                        Specifies the file where to log messages.
                        If not provided the log messages will be saved only to console.
                        """,
                        default=None)


def parse_arguments(argv=None):
    """Parse command-line arguments."""
    parser = argparse.ArgumentParser(
        description='Training-speed estimators for neural architecture search.')
    parser.add_argument('--version',
                        action='version',
                        version='%(prog)s {}'.format(__version__))
    subparsers = parser.add_subparsers(dest='command', required=True)
    descriptions = {
        'gen-toy': "Train every toy architecture and write a tabular benchmark.",
        'rankeval': "Rank correlation of estimators over a budget grid.",
        'budget': "Effective training budget over random architecture samples.",
        'search': "Compare search strategies and evaluators on a benchmark.",
        'diffnas': "Run DARTS and DARTS-TSE on the toy cell."
    }
    for name, description in descriptions.items():
        add_common_arguments(
            subparsers.add_parser(name, help=description,
                                  description=description))
    add_common_arguments(subparsers.add_parser(
        'report',
        help="Re-render the SVG charts of a run directory.",
        description="""
        Re-render the SVG charts of a run directory from its CSV reports.
        The run directory is given with --out.
        """),
                         needs_config=False)
    return parser.parse_args(argv)


if __name__ == '__main__':
    args = parse_arguments()
    configure_logging(args.log_level, args.log_file)
    sys.exit(main(args))
