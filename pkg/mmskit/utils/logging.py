"""Logging configuration and utilities."""

import logging
from typing import Optional

ROOT_LOGGER = 'mmskit'


def setup_logging(level: int = logging.INFO, log_file: Optional[str] = None) -> None:
    """
    Configure logging for the toolkit.

    Handlers write to stderr (and optionally a file) so that reports
    printed on stdout stay machine-readable.

    Args:
        level: The logging level to use
        log_file: Optional path to a log file
    """
    logger = logging.getLogger(ROOT_LOGGER)
    logger.setLevel(level)
    # Repeated CLI invocations in one process must not stack handlers
    logger.handlers.clear()

    formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )

    console_handler = logging.StreamHandler()
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    if log_file:
        file_handler = logging.FileHandler(log_file)
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)


def get_logger(name: str) -> logging.Logger:
    """
    Get a logger instance with the given name.

    Args:
        name: Name for the logger, usually the calling module's __name__

    Returns:
        Logger instance below the toolkit's root logger
    """
    if name == ROOT_LOGGER or name.startswith(ROOT_LOGGER + '.'):
        return logging.getLogger(name)
    return logging.getLogger(f'{ROOT_LOGGER}.{name}')
