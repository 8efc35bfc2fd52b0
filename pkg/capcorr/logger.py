import os
import logging
from typing import Optional

import coloredlogs

from capcorr import const

LOG_LEVEL_NAMES = {
    'debug': logging.DEBUG,
    'info': logging.INFO,
    'warn': logging.WARNING,
    'warning': logging.WARNING,
    'error': logging.ERROR
}


def get_environment_log_level() -> int:
    """Resolve the log level requested through the CAPCORR_LOG environment variable

    Returns: A `logging` level; INFO when the variable is unset or unrecognized
    """
    requested = os.environ.get(const.LOG_LEVEL_ENV_VARIABLE, '').strip().lower()
    return LOG_LEVEL_NAMES.get(requested, logging.INFO)


def get_logger(component_name: str, level: Optional[int] = None, stdout: Optional[bool] = True) -> logging.Logger:
    """Get a pre-configured logging instance; diagnostics are written to standard error

    Args:
        component_name: The name of the component doing the logging.
        level: The minimum logging level; defaults to the level named by CAPCORR_LOG
        stdout: If True, prints to console

    Returns: A logger instance
    """
    coloredlogs.DEFAULT_FIELD_STYLES = {'asctime': {'color': 'green'}, 'hostname': {'color': 'magenta'},
                                        'levelname': {'bold': True, 'color': 'black'},
                                        'name': {'color': 'cyan', 'bold': True},
                                        'programname': {'color': 'blue'}, 'username': {'color': 'yellow'}}
    if level is None:
        level = get_environment_log_level()
    logger = logging.getLogger(component_name.upper())
    logger.setLevel(level)
    if stdout and not len(logger.handlers):
        coloredlogs.install(level=level, logger=logger,
                            fmt='%(asctime)s %(name)-25s %(levelname)-10s | %(message)s')
    elif not stdout:
        logger.addHandler(logging.NullHandler())
    logger.propagate = False
    return logger
