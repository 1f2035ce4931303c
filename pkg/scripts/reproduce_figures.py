#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""Regenerate the data behind every figure with one documented command each.

Each figure maps to exactly one `python -m src.cli ...` invocation (see
docs/OPERATIONS.md). This script runs them in-process and writes:
  - <out_dir>/<stamp>_<figure>.csv      one data file per figure
  - <out_dir>/<stamp>_manifest.csv      figure, command line, exit code, commit

Usage:
  python scripts/reproduce_figures.py --out-dir out/figures --slots 10000000 --workers 4
  python scripts/reproduce_figures.py --only theta_offset switching --no-timestamp
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import shlex
import subprocess
import sys
import time
from collections.abc import Sequence
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from src.cli.main import main as cli_main  # noqa: E402

# --------------------------- Figure table ------------------------------------


@dataclasses.dataclass(frozen=True)
class FigureJob:
    """One figure and the CLI arguments that produce its data.

    `number` is the figure's position in the runbook (docs/OPERATIONS.md).
    """

    number: int
    key: str
    title: str
    argv: tuple[str, ...]
    simulated: bool


FIGURES: tuple[FigureJob, ...] = (
    FigureJob(
        1,
        "uplink_outage",
        "Outage of the diversity schemes on the feeder uplink (D = 20 km); "
        "single/SC/MSSC analytic and Monte Carlo, MRC Monte Carlo",
        ("outage", "--scheme", "single", "sc", "mssc", "mrc", "--method", "both",
         "--axis", "margin", "--range", "2", "20", "1", "--distance", "20"),
        True,
    ),
    FigureJob(
        2,
        "theta_offset",
        "Outage with a non-optimal switching threshold (D = 20 km)",
        ("outage", "--scheme", "mssc", "--theta-sweep", "--distance", "20"),
        False,
    ),
    FigureJob(
        3,
        "separation",
        "Influence of the spatial correlation (gateway separation) on the outage",
        ("outage", "--scheme", "sc", "mssc", "--axis", "distance",
         "--values", "5", "10", "20", "50", "100", "150", "200"),
        False,
    ),
    FigureJob(
        4,
        "end_to_end",
        "End-to-end outage of the forward link, single/MSSC/MRC uplinks, regenerative bound",
        ("e2e", "--schemes", "single", "mssc", "mrc", "--method", "both",
         "--axis", "snr", "--range", "14", "36", "1", "--distance", "20"),
        True,
    ),
    FigureJob(
        5,
        "switching",
        "Switching probability of MSSC/SSC/SC versus threshold (D = 20 km)",
        ("switching", "--method", "both", "--distance", "20"),
        True,
    ),
)

# --------------------------- Helpers -----------------------------------------


def now_stamp() -> str:
    """UTC stamp used in artifact filenames."""
    return time.strftime("%Y%m%d-%H%M%S", time.gmtime())


def git_commit() -> str | None:
    """Short git commit hash if available, else None."""
    try:
        out = subprocess.check_output(
            ["git", "rev-parse", "--short", "HEAD"], stderr=subprocess.DEVNULL
        )
        return out.decode().strip()
    except Exception:
        return None


def ensure_dir(path: Path) -> None:
    """Create the directory if it does not exist."""
    path.mkdir(parents=True, exist_ok=True)


def job_argv(job: FigureJob, args: argparse.Namespace, out_path: Path) -> list[str]:
    """Full CLI argument vector of one figure."""
    argv = [*job.argv, "--scenario", args.scenario, "--out", str(out_path)]
    if job.simulated:
        if args.slots is not None:
            argv += ["--slots", str(args.slots)]
        if args.workers is not None:
            argv += ["--workers", str(args.workers)]
        if args.seed is not None:
            argv += ["--seed", str(args.seed)]
    if args.no_timestamp:
        argv.append("--no-timestamp")
    return argv


# --------------------------- CLI / Main --------------------------------------


def parse_args(argv: Sequence[str] | None = None) -> argparse.Namespace:
    """Parse command-line arguments."""
    p = argparse.ArgumentParser(description="Reproduce the figure data sets.")
    p.add_argument("--scenario", default="default", help="Scenario (default: %(default)s)")
    p.add_argument("--out-dir", type=Path, default=Path("out/figures"))
    p.add_argument("--only", nargs="+", choices=[f.key for f in FIGURES], default=None)
    p.add_argument("--slots", type=int, default=None, help="Monte Carlo slots per point")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--no-timestamp", action="store_true", help="Deterministic outputs.")
    return p.parse_args(argv)


def main(argv: Sequence[str] | None = None) -> int:
    """Entry point; returns non-zero if any figure failed."""
    args = parse_args(argv)
    ensure_dir(args.out_dir)
    stamp = "latest" if args.no_timestamp else now_stamp()
    commit = git_commit()
    jobs = [f for f in FIGURES if args.only is None or f.key in args.only]

    manifest = []
    worst = 0
    for job in jobs:
        out_path = args.out_dir / f"{stamp}_{job.key}.csv"
        argv_full = job_argv(job, args, out_path)
        t0 = time.perf_counter()
        code = cli_main(argv_full)
        elapsed = time.perf_counter() - t0
        worst = max(worst, code)
        manifest.append(
            {
                "figure": job.number,
                "key": job.key,
                "title": job.title,
                "command": "python -m src.cli " + shlex.join(argv_full),
                "exit_code": code,
                "seconds": round(elapsed, 1),
                "path": str(out_path),
                "git_commit": commit or "",
            }
        )
        sys.stdout.write(f"{job.number} {job.key}: exit={code} {elapsed:.1f}s -> {out_path}\n")

    manifest_path = args.out_dir / f"{stamp}_manifest.csv"
    with manifest_path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=list(manifest[0].keys()))
        writer.writeheader()
        writer.writerows(manifest)
    sys.stdout.write(f"manifest: {manifest_path}\n")
    return worst


if __name__ == "__main__":
    raise SystemExit(main())
