"""Process settings for gwdiv runs.

This module centralizes environment-backed settings for the toolkit and
provides a thin validation layer. Scenario physics (fades, SNRs, thresholds)
lives in scenario files, not here; this module only covers how the process
runs: logging, tracing, where bundled scenarios live and how many worker
processes a simulation may use.

Notes:
  - A `.env` file in the working directory is honoured (python-dotenv).
  - Only the log level and the worker cap are checked; everything else has a
    usable default.
  - Imported by every module through `obs/logging`, so it stays free of
    numpy/scipy imports.

Example:
  from src.config import settings
  scenario_dir = settings.SCENARIO_DIR
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

from dotenv import load_dotenv

_TRUE = {"1", "true", "yes", "on"}
_BUNDLED_SCENARIOS = Path(__file__).resolve().parent.parent / "data" / "scenarios"


@dataclass(frozen=True)
class Settings:
    """Immutable process settings.

    Attributes:
      SERVICE_NAME: Logical service name used in traces/metrics.
      LOG_LEVEL: Log level (DEBUG, INFO, WARN, or ERROR).
      LOG_JSON: Render log events as JSON lines instead of console text.
      OTEL_ENDPOINT: OTLP gRPC endpoint; None disables exporting.

      SCENARIO_DIR: Directory searched for bundled scenario files.
      MAX_WORKERS: Upper bound on simulation worker processes.
    """

    # Observability
    SERVICE_NAME: str
    LOG_LEVEL: str
    LOG_JSON: bool
    OTEL_ENDPOINT: str | None

    # Scenarios / execution
    SCENARIO_DIR: Path
    MAX_WORKERS: int

    def validate(self) -> Settings:
        """Reject a log level or worker cap the toolkit cannot honour.

        Returns:
          Settings: `self`, so the call chains after construction.

        Raises:
          ValueError: If `LOG_LEVEL` is not one of {"DEBUG","INFO","WARN","ERROR"}.
          ValueError: If `MAX_WORKERS` is smaller than 1.
        """
        lvl = self.LOG_LEVEL.upper()
        if lvl not in {"DEBUG", "INFO", "WARN", "ERROR"}:
            raise ValueError(f"Invalid LOG_LEVEL: {self.LOG_LEVEL}")
        if self.MAX_WORKERS < 1:
            raise ValueError("GWDIV_MAX_WORKERS must be >= 1")
        return self


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got {raw!r}") from None


def load_settings() -> Settings:
    """Load settings from the environment (and `.env`) and validate them.

    Returns:
      Settings: A validated `Settings` instance.

    Raises:
      ValueError: If a variable is malformed or fails `Settings.validate`.
    """
    load_dotenv()
    return Settings(
        SERVICE_NAME=os.getenv("SERVICE_NAME", "gwdiv"),
        LOG_LEVEL=os.getenv("LOG_LEVEL", "INFO"),
        LOG_JSON=os.getenv("LOG_JSON", "false").strip().lower() in _TRUE,
        OTEL_ENDPOINT=os.getenv("OTEL_EXPORTER_OTLP_ENDPOINT") or None,
        SCENARIO_DIR=Path(os.getenv("GWDIV_SCENARIO_DIR") or _BUNDLED_SCENARIOS),
        MAX_WORKERS=_env_int("GWDIV_MAX_WORKERS", os.cpu_count() or 1),
    ).validate()


# Read once at import; tests call load_settings() directly
settings = load_settings()
