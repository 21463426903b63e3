"""
Structured logging setup.
Configures structlog on top of the standard logging module, once per process.
"""

import logging
import sys
from typing import Optional

import structlog

from .config import settings

# Global flag to track if logging is configured
_logging_initialized = False


def initialize_logging(level: Optional[str] = None, fmt: Optional[str] = None) -> bool:
    """
    Configure structlog rendering and the root log level.

    Console rendering for humans, JSON lines when `SIM_LOG_FORMAT=json`.
    Returns False when logging was already configured.
    """
    global _logging_initialized

    if _logging_initialized:
        return False

    level_name = (level or settings.log_level).upper()
    numeric_level = getattr(logging, level_name, logging.INFO)
    logging.basicConfig(level=numeric_level, stream=sys.stderr, format="%(message)s")

    renderer = (
        structlog.processors.JSONRenderer()
        if (fmt or settings.log_format) == "json"
        else structlog.dev.ConsoleRenderer(colors=False)
    )

    structlog.configure(
        processors=[
            structlog.contextvars.merge_contextvars,
            structlog.stdlib.add_log_level,
            structlog.stdlib.add_logger_name,
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.processors.StackInfoRenderer(),
            structlog.processors.format_exc_info,
            renderer,
        ],
        wrapper_class=structlog.make_filtering_bound_logger(numeric_level),
        logger_factory=structlog.stdlib.LoggerFactory(),
        cache_logger_on_first_use=True,
    )

    _logging_initialized = True
    structlog.get_logger(__name__).debug("logging initialized", level=level_name)
    return True


def reset_logging() -> None:
    """Forget the configured state (used by tests that reconfigure logging)."""
    global _logging_initialized
    structlog.reset_defaults()
    _logging_initialized = False
