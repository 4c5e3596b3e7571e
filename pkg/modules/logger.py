"""Logging for the Frey-curve sieve.

Every record carries the run context (profile and case) it was emitted
under, so interleaved output from deferred profiles stays readable.
"""
import logging
import sys
import time
from contextlib import contextmanager
from contextvars import ContextVar
from pathlib import Path
from typing import Iterator, Optional, Tuple

ROOT_LOGGER = 'frey_sieve'
LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - [%(run_context)s] %(message)s'

_run_context: ContextVar[Tuple[str, ...]] = ContextVar('frey_sieve_run_context', default=())


class RunContextFilter(logging.Filter):
    """Adds record.run_context, e.g. 'r7_part2/4|a+b', or '-' outside a run."""

    def filter(self, record: logging.LogRecord) -> bool:
        record.run_context = current_context() or '-'
        return True


def current_context() -> str:
    return '/'.join(_run_context.get())


@contextmanager
def log_context(label: str) -> Iterator[str]:
    """Push a profile or case label for the records logged inside the block."""
    token = _run_context.set(_run_context.get() + (str(label),))
    try:
        yield current_context()
    finally:
        _run_context.reset(token)


@contextmanager
def log_timing(logger: logging.Logger, what: str, level: int = logging.INFO) -> Iterator[None]:
    """Log how long the block took."""
    start = time.perf_counter()
    try:
        yield
    finally:
        logger.log(level, f"{what} took {time.perf_counter() - start:.2f}s")


def setup_logging(
    log_file: str = None,
    log_level: str = "INFO",
    console_output: bool = True
) -> logging.Logger:
    """Configure the package logger tree.

    Args:
        log_file: Path to log file. If None, logs to console only.
        log_level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL).
        console_output: Whether to echo log records to stdout.

    Returns:
        The configured 'frey_sieve' logger.
    """
    level = getattr(logging, log_level.upper())
    logger = logging.getLogger(ROOT_LOGGER)
    logger.setLevel(level)
    for handler in logger.handlers:
        handler.close()
    logger.handlers.clear()

    formatter = logging.Formatter(LOG_FORMAT, datefmt='%Y-%m-%d %H:%M:%S')
    handlers = []
    if console_output:
        handlers.append(logging.StreamHandler(sys.stdout))
    if log_file:
        log_path = Path(log_file)
        log_path.parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(log_path))

    # handler-level so that records propagated from child loggers are stamped too
    for handler in handlers:
        handler.setLevel(level)
        handler.setFormatter(formatter)
        handler.addFilter(RunContextFilter())
        logger.addHandler(handler)

    return logger


def get_logger(name: Optional[str] = None) -> logging.Logger:
    """Get a logger in the package tree.

    Args:
        name: Module name such as 'numfield'. If None, returns the root logger.

    Returns:
        Logger instance.
    """
    if name:
        return logging.getLogger(f'{ROOT_LOGGER}.{name}')
    return logging.getLogger(ROOT_LOGGER)
