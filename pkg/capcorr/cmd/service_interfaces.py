from __future__ import annotations

import argparse
import inspect
from typing import Any, Dict, List, Optional

from capcorr.cmd.base_interface import BaseInterface, CapcorrArgumentParser
from capcorr.cmd.base_interface import RESERVED_VARIABLE_NAMES
from capcorr.cmd.inspection_helpers import ArgparseParameters, get_class_instance_methods


class SingleResponsibilityInterface(BaseInterface):
    """
    Turns a pipeline manager with one entry method into a subcommand.

    Constructor parameters (verbose) become the "output" flag group, entry method parameters become the subcommand's
    own flags; help text is read from the Google-style docstrings of both.
    """

    def __init__(self, cls: type, entry_method_name: str, interface_name: str,
                 interface_description: Optional[str] = None, defaults: Optional[Dict] = None):
        """
        Args:
            cls: The manager class, E.G `PcaManager`
            entry_method_name: The manager method the subcommand runs, E.G fit
            interface_name: A display name for the subcommand
            interface_description: One line shown in `capcorr --help`; the first docstring line of the entry method
                when omitted
            defaults: Values for reserved constructor arguments (stdout) and overridden flag defaults
        """
        super().__init__(interface_name, interface_description, defaults=defaults)
        self.cls = cls
        self.entry_method_name = entry_method_name
        if not self.interface_description:
            self.interface_description = inspect.getdoc(getattr(cls, entry_method_name)).splitlines()[0]
        constructor_params, methods = get_class_instance_methods(cls, self.defaults)
        if entry_method_name not in methods:
            raise AttributeError(f'{cls.__name__} has no public method {entry_method_name}')
        self.base_params = [p for p in constructor_params if p.name not in RESERVED_VARIABLE_NAMES]
        self.interface_params = methods[entry_method_name]

    @staticmethod
    def _add_group(parser: argparse.ArgumentParser, title: str, params: List[ArgparseParameters]) -> None:
        if not params:
            return
        group = parser.add_argument_group(title)
        for p in params:
            group.add_argument(*p.flags, dest=p.name, **p.kwargs)

    @staticmethod
    def build_parser(interface: SingleResponsibilityInterface,
                     parser: argparse.ArgumentParser) -> argparse.ArgumentParser:
        """Add the flags of an interface to a parser
        Args:
            interface: The interface whose flags are added
            parser: A fresh parser or a subcommand parser
        Returns:
            The same parser
        """
        interface._add_group(parser, f'{interface.entry_method_name} options', interface.interface_params)
        interface._add_group(parser, 'output', interface.base_params)
        return parser

    def get_parser(self) -> argparse.ArgumentParser:
        parser = CapcorrArgumentParser(description=f'{self.interface_name} - {self.interface_description}')
        return self.build_parser(self, parser)

    def execute(self, args: argparse.Namespace) -> Any:
        values = vars(args)
        reserved = {k: v for k, v in self.defaults.items() if k in RESERVED_VARIABLE_NAMES}
        manager = self.cls(**reserved, **{p.name: values[p.name] for p in self.base_params if p.name in values})
        entry_method = getattr(manager, self.entry_method_name)
        return entry_method(**{p.name: values[p.name] for p in self.interface_params if p.name in values})


def append_service_single_responsibility_interface_to_parser(
        parser: argparse.ArgumentParser, interface: SingleResponsibilityInterface) -> argparse.ArgumentParser:
    return interface.build_parser(interface, parser)
