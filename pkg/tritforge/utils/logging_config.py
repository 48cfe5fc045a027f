"""
Logging Configuration
Root logger setup for the CLI and a timing helper for verification runs
"""
import logging
import sys
from pathlib import Path
from logging.handlers import RotatingFileHandler
from typing import Optional

DETAILED_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(funcName)s:%(lineno)d - %(message)s"
CONSOLE_FORMAT = "%(levelname)s %(name)s: %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


def _level(name: str) -> int:
    return getattr(logging, name.upper(), logging.INFO)


def _rotating(path: Path, level: int, max_bytes: int, backup_count: int) -> RotatingFileHandler:
    handler = RotatingFileHandler(path, maxBytes=max_bytes, backupCount=backup_count, encoding="utf-8")
    handler.setLevel(level)
    handler.setFormatter(logging.Formatter(DETAILED_FORMAT, datefmt=DATE_FORMAT))
    return handler


def setup_logging(
    log_level: str = "INFO",
    log_file: Optional[str] = None,
    max_bytes: int = 5 * 1024 * 1024,
    backup_count: int = 3,
) -> logging.Logger:
    """
    Configure the root logger for one CLI run.

    The console handler writes to stderr; stdout carries only reports.
    With log_file set, everything from DEBUG up goes to a rotating file
    and errors are copied to `<stem>_errors<suffix>` next to it.

    Args:
        log_level: Console level name (DEBUG, INFO, WARNING, ERROR)
        log_file: Optional path of the rotating log file
        max_bytes: Rotation size per file
        backup_count: Rotated files kept per log

    Returns:
        The root logger
    """
    root = logging.getLogger()
    root.handlers.clear()

    console = logging.StreamHandler(sys.stderr)
    console.setLevel(_level(log_level))
    console.setFormatter(logging.Formatter(CONSOLE_FORMAT))
    root.addHandler(console)

    if log_file is None:
        root.setLevel(_level(log_level))
        return root

    log_path = Path(log_file)
    log_path.parent.mkdir(parents=True, exist_ok=True)
    errors_path = log_path.with_name(f"{log_path.stem}_errors{log_path.suffix or '.log'}")

    # file handlers want DEBUG regardless of the console level
    root.setLevel(logging.DEBUG)
    root.addHandler(_rotating(log_path, logging.DEBUG, max_bytes, backup_count))
    root.addHandler(_rotating(errors_path, logging.ERROR, max_bytes, backup_count))
    return root


def get_logger(name: str) -> logging.Logger:
    return logging.getLogger(name)


class PerformanceLogger:
    """Reports slow verification steps and catalog cache activity."""

    def __init__(self, logger: Optional[logging.Logger] = None):
        self.logger = logger or get_logger(__name__)

    def log_slow_check(self, check: str, subject: str, duration_ms: float, threshold_ms: float = 1000):
        if duration_ms > threshold_ms:
            self.logger.warning(f"Slow {check} on {subject}: {duration_ms:.1f} ms (threshold {threshold_ms:.0f} ms)")
        else:
            self.logger.debug(f"{check} on {subject}: {duration_ms:.1f} ms")

    def log_cache_hit(self, key: str, cache_type: str = "catalog"):
        self.logger.debug(f"{cache_type} cache hit: {key}")

    def log_cache_miss(self, key: str, cache_type: str = "catalog"):
        self.logger.debug(f"{cache_type} cache miss: {key}")
