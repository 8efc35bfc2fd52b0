import inspect
import typing
from typing import Any, Callable, Dict, List, Optional, Tuple

from docstring_parser import parse as docstring_parse

# Help text after this marker stays in the docstring but is left out of --help
HELP_CUTOFF = '___'


class ArgparseParameters:
    """
    One `argparse.ArgumentParser.add_argument` call: the flag and its keyword arguments
    """

    def __init__(self, name: str, **kwargs):
        """
        Args:
            name: A manager parameter name (E.G scores, high_band, verbose); the flag is --scores, --high-band, ...
            kwargs: Keyword arguments for `add_argument`
        """
        self.name = name
        self.flags = ['--' + name.replace('_', '-')]
        self.kwargs = kwargs

    @classmethod
    def create_from_parameter(cls, parameter: inspect.Parameter, defaults: Optional[Dict] = None,
                              description: Optional[str] = None) -> 'ArgparseParameters':
        default = parameter.default
        if defaults and defaults.get(parameter.name) is not None:
            default = defaults[parameter.name]
        kwargs = argparse_kwargs(parameter.annotation, default)
        if description:
            kwargs['help'] = description
        return cls(parameter.name, **kwargs)


def _unwrap_optional(annotation: Any) -> Tuple[Any, bool]:
    args = [a for a in typing.get_args(annotation) if a is not type(None)]
    if typing.get_origin(annotation) is typing.Union and len(args) == 1:
        return args[0], True
    return annotation, False


def argparse_kwargs(annotation: Any, default: Any = inspect.Parameter.empty) -> Dict:
    """Map a signature annotation to `add_argument` keyword arguments
    Args:
        annotation: The parameter annotation, E.G Optional[List[str]]
        default: The parameter default; `inspect.Parameter.empty` when there is none
    Returns:
        type, nargs, action, default and required as argparse expects them
    """
    inner, optional = _unwrap_optional(annotation)
    kwargs = dict(required=default is inspect.Parameter.empty and not optional)
    if inner is bool:
        kwargs['action'] = 'store_true'
        return kwargs
    if typing.get_origin(inner) in (list, List):
        kwargs['nargs'] = '+'
        inner = (typing.get_args(inner) or (str,))[0]
    kwargs['type'] = inner if inner in (int, float) else str
    if default is not inspect.Parameter.empty and default is not None:
        kwargs['default'] = default
    return kwargs


def get_argparse_parameters(func: Callable, defaults: Optional[Dict] = None) -> List[ArgparseParameters]:
    """The flags of one manager method
    Args:
        func: The method (unbound)
        defaults: Values that win over the signature defaults
    Returns:
        One `ArgparseParameters` per parameter except self and *args/**kwargs
    """
    docs = inspect.getdoc(func)
    help_map = {}
    if docs:
        help_map = {p.arg_name: p.description.split(HELP_CUTOFF)[0].strip() for p in docstring_parse(docs).params}
    params = []
    for name, parameter in inspect.signature(func).parameters.items():
        if name == 'self' or parameter.kind in (inspect.Parameter.VAR_POSITIONAL, inspect.Parameter.VAR_KEYWORD):
            continue
        params.append(ArgparseParameters.create_from_parameter(parameter, defaults, help_map.get(name)))
    return params


def get_class_instance_methods(cls: type, defaults: Optional[Dict] = None) -> \
        Tuple[List[ArgparseParameters], Dict[str, List[ArgparseParameters]]]:
    """Enumerate the public methods of a manager class
    Args:
        cls: The manager class
        defaults: Values that win over the signature defaults
    Returns:
        The __init__ flags, and a mapping of every public method name (base classes included) to its flags
    """
    methods = {}
    for klass in cls.__mro__[:-1]:
        for name, attribute in vars(klass).items():
            if name.startswith('_') or name in methods or not inspect.isfunction(attribute):
                continue
            methods[name] = get_argparse_parameters(attribute, defaults)
    return get_argparse_parameters(cls.__init__, defaults), methods
