import argparse
from typing import Dict, Optional

from capcorr.cmd.base_interface import BaseInterface


def append_service_interface_to_parser(parent_parser: argparse, interface_name: str, interface: BaseInterface,
                                       interface_group_name: Optional[str] = 'interface') -> argparse.ArgumentParser:
    """Add an interface to an existing parser.
    Args:
        parent_parser: The subparsers object to add the interface to
        interface_name: The name of this interface as it will appear in the commandline utility
        interface: The interface object itself
        interface_group_name: The namespace attribute that records which interface was selected
    Returns:
         The parser object
    """
    from capcorr.cmd import service_interfaces
    from capcorr.cmd.service_interfaces import SingleResponsibilityInterface

    if not interface:
        return parent_parser
    sub_interface_parser = parent_parser.add_parser(interface_name, help=interface.interface_description,
                                                    description=interface.interface_description)
    sub_interface_parser.set_defaults(**{interface_group_name: interface_name})
    if isinstance(interface, SingleResponsibilityInterface):
        service_interfaces.append_service_single_responsibility_interface_to_parser(parser=sub_interface_parser,
                                                                                    interface=interface)
    return parent_parser


def append_service_interfaces_to_parser(
        parent_parser: argparse, interfaces: Dict[str, BaseInterface],
        interface_group_name: Optional[str] = 'interface') -> argparse.ArgumentParser:
    """Append multiple service interfaces to a single parser
    Args:
        parent_parser: The subparsers object to add the interfaces to
        interfaces: A dictionary where the key is the name of the interface, and the value is the interface object
        interface_group_name: The namespace attribute that records which interface was selected
    Returns:
         The parser object
    """
    for name, value in interfaces.items():
        append_service_interface_to_parser(parent_parser=parent_parser, interface_name=name, interface=value,
                                           interface_group_name=interface_group_name)
    return parent_parser
