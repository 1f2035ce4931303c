"""Delimited report files.

Format:
  - UTF-8, comma-delimited, one header row then one row per sweep point.
  - Preceded by '#'-prefixed metadata lines (tool version, scenario hash,
    seed, library versions, and any command-specific values). The timestamp
    line is the only non-deterministic line and can be suppressed.
  - Probabilities are written with 9 significant digits; missing values are
    empty cells.
"""
from __future__ import annotations

import csv
import io
import sys
import time
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy

from src import __version__
from src.obs.logging import get_logger

logger = get_logger(__name__)

TOOL_NAME = "gwdiv"


def now_iso() -> str:
    """ISO8601 timestamp (UTC) without microseconds."""
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())


def fmt_prob(x: float | None) -> str:
    """Probability (or any float) with 9 significant digits; '' for None."""
    return "" if x is None else f"{x:.9g}"


@dataclass(frozen=True)
class ReportHeader:
    """Metadata written above the table.

    Attributes:
      command: Subcommand that produced the file.
      scenario_name: Name of the scenario document.
      scenario_sha256: Hash of the scenario document bytes.
      seed: Master seed (None for purely analytic outputs).
      timestamp: Creation time; None suppresses the line.
      extra: Additional key/value lines (rho, thresholds, gains, ...).
    """

    command: str
    scenario_name: str
    scenario_sha256: str
    seed: int | None = None
    timestamp: str | None = None
    extra: Mapping[str, str] = field(default_factory=dict)

    def lines(self) -> list[str]:
        """Header lines in write order, each starting with `# `."""
        out = [
            f"# tool: {TOOL_NAME} {__version__}",
            f"# command: {self.command}",
            f"# scenario: {self.scenario_name}",
            f"# scenario_sha256: {self.scenario_sha256}",
            f"# seed: {'' if self.seed is None else self.seed}",
            f"# numpy: {np.__version__}",
            f"# scipy: {scipy.__version__}",
        ]
        out.extend(f"# {k}: {v}" for k, v in self.extra.items())
        if self.timestamp is not None:
            out.append(f"# generated: {self.timestamp}")
        return out


def render_report(
    header: ReportHeader, fieldnames: Sequence[str], rows: Iterable[Mapping[str, object]]
) -> str:
    """Render the full file contents."""
    buf = io.StringIO()
    for line in header.lines():
        buf.write(line + "\n")
    writer = csv.DictWriter(buf, fieldnames=list(fieldnames), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def write_report(
    out: Path | None,
    header: ReportHeader,
    fieldnames: Sequence[str],
    rows: Iterable[Mapping[str, object]],
) -> None:
    """Write a report to `out`, or to stdout when `out` is None or '-'.

    Raises:
      OSError: If the file cannot be written.
    """
    text = render_report(header, fieldnames, rows)
    if out is None or str(out) == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text, encoding="utf-8")
    logger.info("report.written", path=str(out), command=header.command, bytes=len(text))
