"""
Logging for the toolkit.

Only the ``gentlekit`` logger tree is configured. stdout carries the reports,
so records go to stderr, and a host application keeps its own root logger.
"""
import logging
import sys
from typing import Optional

from gentlekit.config import get_settings

PACKAGE_LOGGER = "gentlekit"
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

# loggers of the computation libraries that chatter at INFO
QUIET_LIBRARIES = ("sympy", "networkx")


def resolve_level(name: str) -> Optional[int]:
    """Numeric level for a name such as "debug", None if logging has no such level."""
    level = logging.getLevelName(name.upper())
    return level if isinstance(level, int) else None


def setup_logging(log_level: Optional[str] = None) -> logging.Logger:
    """
    Attach one stderr handler to the package logger.

    Repeated calls replace the handler, so several runs in one process
    (the test suite, a notebook) never print a record twice.

    Args:
        log_level: Override GENTLEKIT_LOG_LEVEL
    """
    requested = log_level or get_settings().log_level
    logger = logging.getLogger(PACKAGE_LOGGER)
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    logger.addHandler(handler)
    level = resolve_level(requested)
    logger.setLevel(logging.WARNING if level is None else level)
    logger.propagate = False
    if level is None:
        logger.warning(f"Unknown log level '{requested}', using WARNING")

    for name in QUIET_LIBRARIES:
        logging.getLogger(name).setLevel(logging.WARNING)
    return logger


def get_logger(name: str) -> logging.Logger:
    """Get a logger instance for the given name."""
    return logging.getLogger(name)
