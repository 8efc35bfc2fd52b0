import argparse
import sys
from typing import Any, List, Optional

from capcorr import const
from capcorr import exceptions
from capcorr.cmd import analyze, calibrate, correlate, pca, report, simulate
from capcorr.cmd.base_interface import CapcorrArgumentParser
from capcorr.cmd.interface_operations import append_service_interfaces_to_parser
from capcorr.logger import get_logger
from capcorr.services.pipeline import exit_status

component_modules = dict(
    analyze=analyze,
    pca=pca,
    correlate=correlate,
    calibrate=calibrate,
    simulate=simulate,
    report=report
)


def get_action_parser() -> argparse.ArgumentParser:
    parser = CapcorrArgumentParser(prog='capcorr',
                                   description='Measure how strongly safety benchmarks track general capabilities.')
    parser.add_argument('--version', action='version', version=f'capcorr {const.VERSION}')
    subparsers = parser.add_subparsers()
    append_service_interfaces_to_parser(subparsers, {name: module.interface for name, module in
                                                     component_modules.items()}, interface_group_name='interface')
    return parser


def process_arguments(args: argparse.Namespace, interface: Optional[str] = None) -> Any:
    """Selects the proper execution context given an argparse.Namespace and executes the namespace against it
    Args:
        args: The argparse.Namespace object containing all the user selected commandline arguments
        interface: The subcommand (analyze, pca, correlate, calibrate, simulate or report); read from args if omitted
    Returns:
        The results of the executed context
    """
    interface = interface or getattr(args, 'interface', None)
    try:
        component_interface = component_modules[interface].interface
    except KeyError:
        raise exceptions.InputError(f'{interface} is not a valid subcommand; must be one of: '
                                    f'{", ".join(component_modules)}')
    return component_interface.execute(args)


def main(argv: Optional[List[str]] = None) -> int:
    """Run the capcorr command line
    Args:
        argv: The arguments after the program name; sys.argv when omitted
    Returns:
        The exit status: 0 on success, 1 for input or output errors, 2 for numerical failures
    """
    parser = get_action_parser()
    args = parser.parse_args(argv)
    if not getattr(args, 'interface', None):
        parser.print_help(sys.stderr)
        return 1
    logger = get_logger('capcorr', level=None)
    try:
        res = process_arguments(args)
    except (exceptions.InputError, exceptions.NumericError, exceptions.WriteReportError) as e:
        logger.error(str(e))
        return exit_status(e)
    if res:
        sys.stdout.write(res if res.endswith('\n') else res + '\n')
    return 0
