import logging
import os
from pathlib import Path

LOG_PATH = Path(os.getenv("KHOFLOW_LOG_FILE", "logs/khoflow.log"))

_created = set()


def get_logger(name="khoflow", level=None):
    """Return a logger with console and file handlers attached once."""
    if level is None:
        level = os.getenv("KHOFLOW_LOG_LEVEL", "INFO")
    if isinstance(level, str):
        level = logging.getLevelName(level.upper())
        if not isinstance(level, int):
            level = logging.INFO

    logger = logging.getLogger(name)
    logger.setLevel(level)
    _created.add(name)

    if not logger.handlers:
        # Console
        ch = logging.StreamHandler()
        ch.setLevel(level)
        ch.setFormatter(logging.Formatter("%(levelname)s - %(message)s"))
        logger.addHandler(ch)

        # File
        try:
            LOG_PATH.parent.mkdir(parents=True, exist_ok=True)
            fh = logging.FileHandler(LOG_PATH)
        except OSError:
            fh = None
        if fh is not None:
            fh.setLevel(level)
            fh.setFormatter(
                logging.Formatter("%(asctime)s - %(name)s - %(levelname)s - %(message)s")
            )
            logger.addHandler(fh)
        logger.propagate = False

    return logger


def set_level(level):
    """Apply ``level`` to every khoflow logger already created."""
    if isinstance(level, str):
        level = logging.getLevelName(level.upper())
    for name in sorted(_created):
        logger = logging.getLogger(name)
        logger.setLevel(level)
        for handler in logger.handlers:
            handler.setLevel(level)
