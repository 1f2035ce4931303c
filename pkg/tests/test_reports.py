"""Report files: number formatting and the metadata header."""
from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from src import __version__
from src.reports.writer import ReportHeader, fmt_prob, render_report, write_report


def test_fmt_prob() -> None:
    """Ensures: None is blank and values keep nine significant digits."""
    assert fmt_prob(None) == ""
    assert fmt_prob(0.5) == "0.5"
    assert fmt_prob(1.23456789012e-7) == "1.23456789e-07"
    assert fmt_prob(0.0) == "0"


def test_header_lines() -> None:
    """Ensures: tool, seed and library versions lead the header; timestamps are optional."""
    header = ReportHeader("outage", "default", "ab" * 32, seed=7, extra={"rho": "0.5"})
    lines = header.lines()
    assert lines[0] == f"# tool: gwdiv {__version__}"
    assert "# seed: 7" in lines
    assert f"# numpy: {np.__version__}" in lines
    assert lines[-1] == "# rho: 0.5"
    stamped = ReportHeader("outage", "default", "", timestamp="2024-01-01T00:00:00Z")
    assert stamped.lines()[-1] == "# generated: 2024-01-01T00:00:00Z"
    assert "# seed: " in stamped.lines()


def test_render_report_layout() -> None:
    """Ensures: LF line endings and blank cells for missing values."""
    text = render_report(ReportHeader("validate", "n", "h"), ["a", "b"], [{"a": 1, "b": ""}])
    body = [line for line in text.splitlines() if not line.startswith("#")]
    assert body == ["a,b", "1,"]
    assert "\r" not in text


def test_write_report_to_file_and_stdout(
    tmp_path: Path, capsys: pytest.CaptureFixture[str]
) -> None:
    """Ensures: the same text goes to a new nested file or to stdout when no path is given."""
    header = ReportHeader("validate", "n", "h")
    out = tmp_path / "nested" / "r.csv"
    write_report(out, header, ["k"], [{"k": "v"}])
    assert out.read_text(encoding="utf-8").endswith("k\nv\n")
    write_report(None, header, ["k"], [{"k": "v"}])
    assert capsys.readouterr().out.endswith("k\nv\n")
