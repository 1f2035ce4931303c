"""structlog wiring.

Call `configure_logging()` once at process start (the CLI does). Library
modules only call `get_logger(__name__)`; before configuration structlog's
defaults apply, which is fine for tests.
"""
from __future__ import annotations

import logging
import sys

import structlog

from src.config import settings

# structlog/stdlib level names; "WARN" is accepted by Settings.validate.
_LEVELS = {
    "DEBUG": logging.DEBUG,
    "INFO": logging.INFO,
    "WARN": logging.WARNING,
    "ERROR": logging.ERROR,
}


def configure_logging(level: str | None = None, json: bool | None = None) -> None:
    """Configure structlog to render through stdlib logging on stderr.

    Args:
      level: Log level name; defaults to `settings.LOG_LEVEL`.
      json: Emit JSON lines; defaults to `settings.LOG_JSON`.
    """
    lvl = _LEVELS.get((level or settings.LOG_LEVEL).upper(), logging.INFO)
    use_json = settings.LOG_JSON if json is None else json

    logging.basicConfig(level=lvl, stream=sys.stderr, format="%(message)s", force=True)
    renderer: structlog.typing.Processor = (
        structlog.processors.JSONRenderer()
        if use_json
        else structlog.dev.ConsoleRenderer(colors=False)
    )
    structlog.configure(
        processors=[
            structlog.contextvars.merge_contextvars,
            structlog.processors.add_log_level,
            structlog.processors.TimeStamper(fmt="iso", utc=True),
            renderer,
        ],
        wrapper_class=structlog.make_filtering_bound_logger(lvl),
        logger_factory=structlog.stdlib.LoggerFactory(),
        cache_logger_on_first_use=True,
    )


def get_logger(name: str) -> structlog.typing.FilteringBoundLogger:
    """Return a lazy logger tagged with the module name.

    The proxy resolves its configuration on first use, so module-level loggers
    created at import time still honour a later `configure_logging()`.
    """
    return structlog.get_logger(name, module=name)
