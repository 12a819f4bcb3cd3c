# Colored console logging plus an optional log file.
#
# Usage:
#   1. setup_logging() runs once on import with the log file from paths.json;
#      call it again from an entry point only to pick a different file or level.
#   2. In each module: logger = get_logger(__name__)
#
# Example:
#   from src.utils import get_logger
#   logger = get_logger(__name__)
#   logger.info(f'Propagated {n} steps')

import os
import sys
import logging
from logging import Logger
from ..config.paths import DecoherePaths


class ColoredFormatter(logging.Formatter):
    '''Custom formatter to add colors to log levels.'''

    # ANSI escape codes for colors
    COLORS = {
        'DEBUG': '\033[94m',    # Blue
        'INFO': '\033[92m',     # Green
        'WARNING': '\033[93m',  # Yellow
        'ERROR': '\033[91m',    # Red
        'CRITICAL': '\033[95m'  # Magenta
    }
    RESET = '\033[0m'

    def format(self, record: logging.LogRecord) -> str:
        log_color = self.COLORS.get(record.levelname, self.RESET)
        message = super().format(record)
        return f'{log_color}{message}{self.RESET}'


_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def setup_logging(log_file: str | None = None, level: int = logging.INFO, force: bool = False) -> None:
    '''
    Setup root logger with colored console output and optional file logging.

    Repeated calls are no-ops unless ``force`` is set, which replaces the
    existing handlers (the CLI uses this for --log-file and --verbose).
    '''
    root_logger = logging.getLogger()

    if root_logger.handlers and not force:
        return
    for handler in list(root_logger.handlers):
        root_logger.removeHandler(handler)
        handler.close()

    root_logger.setLevel(level)

    for noisy in ('matplotlib', 'numba', 'asyncio'):
        logging.getLogger(noisy).setLevel(logging.WARNING)

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(ColoredFormatter(_FORMAT))
    root_logger.addHandler(console_handler)

    if log_file:
        try:
            os.makedirs(os.path.dirname(log_file), exist_ok=True)
            file_handler = logging.FileHandler(log_file, encoding='utf-8')
        except OSError as exc:
            root_logger.warning(f'Log file {log_file} unavailable ({exc}); logging to console only')
            return
        file_handler.setFormatter(logging.Formatter(_FORMAT))
        root_logger.addHandler(file_handler)


def get_logger(name: str) -> Logger:
    '''
    Get a logger with the specified name.
    '''
    return logging.getLogger(name)


_default_log_path = str(DecoherePaths.load().logs)

setup_logging(_default_log_path)
