"""Logging utility for graphhyper."""
import logging
import os
import sys
from logging.handlers import RotatingFileHandler
from typing import Iterable, Optional

ROOT_LOGGER = "graphhyper"

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
DATE_FORMAT = '%Y-%m-%d %H:%M:%S'

# Third-party loggers that are chatty at DEBUG during training runs
NOISY_LOGGERS = ("matplotlib", "PIL", "urllib3", "fsspec")


def setup_logger(
    log_level: str = "INFO",
    log_file: Optional[str] = None,
    max_size: int = 10485760,  # 10 MB
    backup_count: int = 5,
    capture_warnings: bool = True,
    quiet_loggers: Iterable[str] = NOISY_LOGGERS
) -> logging.Logger:
    """
    Set up the graphhyper logger for CLI runs and experiments.

    Args:
        log_level: The logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        log_file: Path to the log file. If None, logs will only go to console
        max_size: Maximum size of log file before rotation (in bytes)
        backup_count: Number of backup log files to keep
        capture_warnings: Route ``warnings.warn`` output (torch, numpy) into logging
        quiet_loggers: Third-party loggers pinned to WARNING

    Returns:
        The configured ``graphhyper`` logger

    Raises:
        ValueError: If an invalid log level is provided
    """
    level_name = log_level.upper()
    level = logging.getLevelName(level_name)
    if not isinstance(level, int):
        raise ValueError(f"Invalid log level: {level_name}. Must be one of: DEBUG, INFO, WARNING, ERROR, CRITICAL")

    logger = logging.getLogger(ROOT_LOGGER)

    # Re-running setup (tests, recipes) must not stack handlers
    for handler in list(logger.handlers):
        handler.close()
    logger.handlers.clear()
    logger.setLevel(level)

    formatter = logging.Formatter(LOG_FORMAT, datefmt=DATE_FORMAT)

    console_handler = logging.StreamHandler(sys.stdout)
    console_handler.setLevel(level)
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    if log_file:
        try:
            log_dir = os.path.dirname(log_file)
            if log_dir:
                os.makedirs(log_dir, exist_ok=True)

            file_handler = RotatingFileHandler(
                log_file,
                maxBytes=max_size,
                backupCount=backup_count,
                encoding='utf-8'
            )
            file_handler.setLevel(level)
            file_handler.setFormatter(formatter)
            logger.addHandler(file_handler)
            logger.debug(f"File logging enabled: {log_file}")
        except (OSError, IOError) as e:
            logger.warning(f"Failed to set up file logging to {log_file}: {e}")
            logger.warning("Continuing with console logging only")

    logger.propagate = False

    logging.captureWarnings(capture_warnings)
    if capture_warnings:
        warnings_logger = logging.getLogger("py.warnings")
        warnings_logger.handlers = list(logger.handlers)
        warnings_logger.propagate = False

    for name in quiet_loggers:
        logging.getLogger(name).setLevel(logging.WARNING)

    logger.debug(f"Logger initialized - Level: {level_name}, File: {log_file or 'Console only'}")
    return logger


def log_banner(logger: logging.Logger, title: str, width: int = 50) -> None:
    """
    Log a framed section title.

    Args:
        logger: Logger to write to
        title: Banner text
        width: Width of the frame
    """
    logger.info("=" * width)
    logger.info(title)
    logger.info("=" * width)
