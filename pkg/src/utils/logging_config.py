import logging
import sys
from logging.handlers import RotatingFileHandler
from typing import Optional

DEFAULT_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def setup_logging(log_file: Optional[str] = "skewcert.log", level="INFO", fmt: str = DEFAULT_FORMAT,
                  max_bytes: int = 1_000_000, backup_count: int = 5):
    logger = logging.getLogger()
    logger.setLevel(level if isinstance(level, int) else level.upper())
    formatter = logging.Formatter(fmt)

    # drop the handlers of an earlier call
    for handler in list(logger.handlers):
        if getattr(handler, '_skewcert', False):
            logger.removeHandler(handler)
            handler.close()

    # Console handler; stdout carries the JSON payload
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(formatter)
    console_handler._skewcert = True
    logger.addHandler(console_handler)

    # Rotating file handler (keeps the last 5 log files, each up to 1MB)
    if log_file:
        file_handler = RotatingFileHandler(log_file, maxBytes=max_bytes, backupCount=backup_count)
        file_handler.setFormatter(formatter)
        file_handler._skewcert = True
        logger.addHandler(file_handler)

    return logger
