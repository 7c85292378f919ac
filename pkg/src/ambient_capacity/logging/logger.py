import logging
from functools import lru_cache
from typing import Literal

import numpy
import scipy
from rich.console import Console
from rich.logging import RichHandler

PACKAGE_LOGGER = "ambient_capacity"

Level = Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]


@lru_cache
def bootstrap_logger(level: Level | int = "INFO", capture_warnings: bool = True) -> logging.Logger:
    """
    Route the package logger (and, optionally, Python warnings such as numpy's
    overflow RuntimeWarnings) to one rich handler on stderr.

    The root logger is left alone; stdout stays reserved for CSV tables.
    """
    handler = RichHandler(
        console=Console(stderr=True),
        rich_tracebacks=True,
        tracebacks_suppress=[numpy, scipy],
        show_path=False,
        log_time_format="[%X]",
    )
    handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))

    targets = [logging.getLogger(PACKAGE_LOGGER)]
    if capture_warnings:
        logging.captureWarnings(True)
        targets.append(logging.getLogger("py.warnings"))

    for logger in targets:
        for old in logger.handlers[:]:
            logger.removeHandler(old)
        logger.addHandler(handler)
        logger.setLevel(level)
        logger.propagate = False

    return targets[0]
