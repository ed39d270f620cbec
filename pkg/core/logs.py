# core/logs.py
"""Named loggers writing to <LOG_DIR>/loocv.log."""

import logging
from typing import Dict

from core.settings import get_settings

LOG_FORMAT = "%(asctime)s - %(levelname)s - %(message)s"
LOG_FILE = "loocv.log"

_loggers: Dict[str, logging.Logger] = {}
_file_handler = None


def _get_file_handler():
    global _file_handler
    if _file_handler is not None:
        return _file_handler

    settings = get_settings()
    if not settings.log_to_file:
        _file_handler = logging.NullHandler()
        return _file_handler

    try:
        settings.log_dir.mkdir(parents=True, exist_ok=True)
        handler = logging.FileHandler(settings.log_dir / LOG_FILE, encoding="utf-8")
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        _file_handler = handler
    except OSError:
        # Read-only checkout or missing permissions: keep running without a log file
        _file_handler = logging.NullHandler()
    return _file_handler


def get_logger(name: str) -> logging.Logger:
    """Get a logger for one concern (neighbors, loocv, data, cli, ...)."""
    if name in _loggers:
        return _loggers[name]

    logger = logging.getLogger(f"loocv_knn.{name}")
    logger.setLevel(getattr(logging, get_settings().log_level, logging.INFO))
    logger.addHandler(_get_file_handler())
    logger.propagate = False
    _loggers[name] = logger
    return logger
