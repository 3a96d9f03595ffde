"""
Logging setup for the command-line runners
"""

import logging
import sys
from datetime import datetime
from pathlib import Path
from typing import Optional, Union

import colorlog


LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
LOG_COLORS = {
    'DEBUG': 'cyan',
    'INFO': 'green',
    'WARNING': 'yellow',
    'ERROR': 'red',
    'CRITICAL': 'red,bg_white',
}


def log_file_path(log_dir: Union[str, Path], prefix: str = "lsrbf") -> Path:
    return Path(log_dir) / f"{prefix}_{datetime.now().strftime('%Y%m%d')}.log"


def setup_logging(log_level: str = "INFO", log_dir: Optional[Union[str, Path]] = "logs",
                  quiet: bool = False) -> logging.Logger:
    """
    Configure the root logger: a colored console handler plus a daily log
    file in log_dir (skipped when log_dir is None).

    Calling it again replaces the handlers it installed before.
    """
    level = getattr(logging, str(log_level).upper(), None)
    if not isinstance(level, int):
        raise ValueError(f"Unknown log level: {log_level}")

    root = logging.getLogger()
    for handler in list(root.handlers):
        if getattr(handler, '_lsrbf', False):
            root.removeHandler(handler)
            handler.close()

    console = logging.StreamHandler(sys.stderr)
    console.setLevel(logging.WARNING if quiet else level)
    console.setFormatter(colorlog.ColoredFormatter(
        '%(log_color)s%(levelname)-8s%(reset)s %(name)s: %(message)s',
        log_colors=LOG_COLORS,
    ))
    handlers = [console]

    if log_dir is not None:
        path = log_file_path(log_dir)
        path.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(path, encoding='utf-8')
        file_handler.setLevel(level)
        file_handler.setFormatter(logging.Formatter(LOG_FORMAT))
        handlers.append(file_handler)

    for handler in handlers:
        handler._lsrbf = True
        root.addHandler(handler)
    root.setLevel(level)
    return logging.getLogger('lsrbf')
