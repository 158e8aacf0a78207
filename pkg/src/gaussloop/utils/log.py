"""
Logging setup.

Results go to stdout; every diagnostic goes through the ``gaussloop``
logger hierarchy to stderr.
"""

import logging
import sys

_FORMAT = "%(asctime)s %(levelname)-7s %(name)s: %(message)s"


def setup_logging(level: str = "WARNING") -> logging.Logger:
    """
    Install a single stderr handler on the package logger.

    Args:
        level (str): Logging level name

    Returns:
        logging.Logger: The configured ``gaussloop`` logger
    """
    logger = logging.getLogger("gaussloop")
    logger.setLevel(level.upper())
    handlers = [h for h in logger.handlers if getattr(h, "_gaussloop", False)]
    if handlers:
        # sys.stderr may have been replaced since the first call
        handlers[0].setStream(sys.stderr)
    else:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter(_FORMAT, datefmt="%H:%M:%S"))
        handler._gaussloop = True
        logger.addHandler(handler)
    logger.propagate = False
    return logger
