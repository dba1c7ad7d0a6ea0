import logging
import sys

import numpy as np


def setup_logging(level: str = "WARNING") -> logging.Logger:
    numeric_level = getattr(logging, level.upper(), logging.WARNING)
    logging.basicConfig(
        level=numeric_level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    logger = logging.getLogger("udd_lab")
    # basicConfig is a no-op once the root logger has handlers
    logger.setLevel(numeric_level)

    # Debug environment
    logger.debug(f"Python version: {sys.version}")
    logger.debug(f"numpy version: {np.__version__}")

    return logger
