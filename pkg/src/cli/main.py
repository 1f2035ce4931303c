"""Command-line entry point: scenario files in, delimited curve/report files out.

Subcommands:
  outage     Feeder-uplink outage of one or more schemes along a sweep axis.
  e2e        End-to-end (transparent) outage of several uplink schemes, with
             the regenerative bound and diversity gains.
  switching  Switching probabilities / rate over a switching-threshold sweep.
  budget     Clear-sky SNRs from link-budget entries.
  validate   Load a scenario and print its resolved operating point.

Precedence:
  command-line flag > scenario file > built-in default. `--threshold-db`
  moves the switching threshold along with the outage threshold unless
  `--theta-db` is also given.

Exit codes:
  0 ok, 2 configuration / domain error, 3 numerical failure.

Usage:
  python -m src.cli outage --scenario default --scheme sc --method both \
    --axis margin --range 2 20 1 --slots 2000000 --out out/sc.csv
"""
from __future__ import annotations

import argparse
import math
import sys
from collections.abc import Sequence
from dataclasses import replace
from pathlib import Path

from pydantic import ValidationError

from src.analysis.outage import (
    ANALYTIC_SCHEMES,
    CurvePoint,
    OutageCurve,
    OutageMethod,
    diversity_gain_db,
    e2e_outage,
    regenerative_bound,
    uplink_outage,
)
from src.analysis.scenario import LinkScenario, SweepAxis, apply_axis, check_monotone
from src.analysis.switching import SchemeKind, switching_summary
from src.budget.link_budget import BOLTZMANN_DBW, BudgetEntry, clear_sky_snr
from src.errors import ConfigError, DomainError, NumericalError
from src.obs.logging import configure_logging, get_logger
from src.obs.otel import tracer
from src.reports.writer import ReportHeader, fmt_prob, now_iso, write_report
from src.scenario.schema import ResolvedScenario, load_scenario
from src.sim.montecarlo import SimConfig, sweep

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

# Outage target for the diversity gains reported by `e2e`.
GAIN_TARGET = 1e-3
THETA_SPAN_DB = 6.0
THETA_STEP_DB = 0.5


# --------------------------- Argument parsing --------------------------------


def _common_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument(
        "--scenario",
        default="default",
        help="Scenario file, or a bundled scenario name (default: %(default)s)",
    )
    p.add_argument("--seed", type=int, default=None, help="Master seed (overrides scenario)")
    p.add_argument("--slots", type=int, default=None, help="Monte Carlo slots per point")
    p.add_argument("--workers", type=int, default=None, help="Worker streams/processes")
    p.add_argument("--burn-in", type=int, default=None, help="Warm-up slots per worker")
    p.add_argument("--out", type=Path, default=None, help="Output file (default: stdout)")
    p.add_argument(
        "--no-timestamp", action="store_true", help="Omit the timestamp header line."
    )
    p.add_argument("--log-level", default=None, help="Overrides LOG_LEVEL.")
    geo = p.add_mutually_exclusive_group()
    geo.add_argument("--distance", type=float, default=None, help="Gateway separation (km)")
    geo.add_argument("--rho", type=float, default=None, help="Correlation coefficient")
    p.add_argument("--theta-db", type=float, default=None, help="Switching threshold (dB)")
    p.add_argument("--threshold-db", type=float, default=None, help="Outage threshold (dB)")
    return p


def _add_sweep_flags(p: argparse.ArgumentParser, default_axis: SweepAxis) -> None:
    p.add_argument(
        "--axis",
        choices=[a.value for a in SweepAxis],
        default=default_axis.value,
        help="Sweep axis (default: %(default)s)",
    )
    vals = p.add_mutually_exclusive_group()
    vals.add_argument(
        "--range",
        nargs=3,
        type=float,
        metavar=("START", "STOP", "STEP"),
        default=None,
        help="Inclusive arithmetic sweep.",
    )
    vals.add_argument("--values", nargs="+", type=float, default=None, help="Explicit values.")
    p.add_argument(
        "--method",
        choices=["analytic", "mc", "both"],
        default="analytic",
        help="Analytic, Monte Carlo or both (default: %(default)s)",
    )


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with all subcommands."""
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="gwdiv", description="Gateway-diversity outage and switching evaluation."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("outage", parents=[common], help="Feeder-uplink outage curves.")
    p.add_argument(
        "--scheme",
        nargs="+",
        choices=[s.value for s in SchemeKind],
        default=[SchemeKind.MSSC.value],
        help="One or more schemes; rows are grouped by scheme (default: mssc)",
    )
    _add_sweep_flags(p, SweepAxis.MARGIN)
    p.add_argument(
        "--theta-sweep",
        action="store_true",
        help="Sweep the switching threshold over Gamma_th +/- 6 dB in 0.5 dB steps.",
    )
    p.set_defaults(func=cmd_outage)

    p = sub.add_parser("e2e", parents=[common], help="End-to-end outage curves.")
    p.add_argument(
        "--schemes",
        nargs="+",
        choices=[s.value for s in SchemeKind],
        default=[SchemeKind.SINGLE.value, SchemeKind.SC.value, SchemeKind.MSSC.value],
    )
    _add_sweep_flags(p, SweepAxis.SNR)
    p.set_defaults(func=cmd_e2e)

    p = sub.add_parser("switching", parents=[common], help="Switching probability report.")
    _add_sweep_flags(p, SweepAxis.THETA)
    p.add_argument("--slot-seconds", type=float, default=None, help="Decision interval T (s)")
    p.set_defaults(func=cmd_switching)

    p = sub.add_parser("budget", parents=[common], help="Clear-sky SNR from a link budget.")
    p.add_argument("--eirp-dbw", type=float, default=None)
    p.add_argument("--fsl-db", type=float, default=None)
    p.add_argument("--gt-dbk", type=float, default=None)
    p.add_argument("--bandwidth-hz", type=float, default=None)
    p.set_defaults(func=cmd_budget)

    p = sub.add_parser("validate", parents=[common], help="Validate and print a scenario.")
    p.set_defaults(func=cmd_validate)
    return parser


def parse_args(argv: Sequence[str] | None = None) -> argparse.Namespace:
    """Parse command-line arguments (defaults to sys.argv)."""
    return build_parser().parse_args(argv)


# --------------------------- Helpers -----------------------------------------


def scenario_from_args(args: argparse.Namespace, resolved: ResolvedScenario) -> LinkScenario:
    """Apply command-line overrides on top of the scenario file."""
    sc = resolved.scenario
    if args.threshold_db is not None:
        t = args.threshold_db
        sc = replace(sc, outage_thresh_db=t, switch_thresh_db=t + sc.theta_offset_db)
    if args.theta_db is not None:
        sc = replace(sc, switch_thresh_db=args.theta_db)
    if args.distance is not None:
        sc = sc.with_separation(args.distance)
    if args.rho is not None:
        sc = sc.with_rho(args.rho)
    return sc


def arange_inclusive(start: float, stop: float, step: float) -> list[float]:
    """START, START+STEP, ... up to and including STOP (empty if unreachable).

    Raises:
      DomainError: If STEP is zero or not finite.
    """
    if step == 0.0 or not math.isfinite(step):
        raise DomainError("sweep step must be non-zero")
    n = math.floor((stop - start) / step + 1e-9) + 1
    return [round(start + i * step, 12) for i in range(max(n, 0))]


def fmt_km(km: float | None) -> str:
    """Separation cell; blank when rho was given directly."""
    return "" if km is None else f"{km:g}"


def default_values(axis: SweepAxis, scenario: LinkScenario) -> list[float]:
    """Sweep used when neither --values nor --range is given."""
    if axis is SweepAxis.THETA:
        th = scenario.outage_thresh_db
        return arange_inclusive(th - THETA_SPAN_DB, th + THETA_SPAN_DB, THETA_STEP_DB)
    if axis is SweepAxis.MARGIN:
        return arange_inclusive(2.0, 26.0, 1.0)
    if axis is SweepAxis.SNR:
        th = scenario.outage_thresh_db
        return arange_inclusive(th + 2.0, th + 30.0, 1.0)
    if axis is SweepAxis.DISTANCE:
        return [10.0, 20.0, 50.0, 100.0, 150.0, 200.0]
    return arange_inclusive(0.0, 0.9, 0.1)


def sweep_values(args: argparse.Namespace, axis: SweepAxis, scenario: LinkScenario) -> list[float]:
    """Sweep values from --values / --range, else the axis default.

    Raises:
      DomainError: If the values are empty or not strictly monotone.
    """
    if args.values is not None:
        values = list(args.values)
    elif args.range is not None:
        values = arange_inclusive(*args.range)
    else:
        values = default_values(axis, scenario)
    check_monotone(values)
    return values


def sim_config(
    args: argparse.Namespace,
    resolved: ResolvedScenario,
    scenario: LinkScenario,
    scheme: SchemeKind,
    e2e: bool = False,
) -> SimConfig:
    """SimConfig with flag > scenario-file precedence."""
    sim = resolved.simulation
    return SimConfig(
        scenario=scenario,
        scheme=scheme,
        slots=sim.slots if args.slots is None else args.slots,
        seed=sim.seed if args.seed is None else args.seed,
        workers=sim.workers if args.workers is None else args.workers,
        burn_in=sim.burn_in if args.burn_in is None else args.burn_in,
        e2e=e2e,
    )


def header_for(
    args: argparse.Namespace,
    resolved: ResolvedScenario,
    scenario: LinkScenario,
    extra: dict[str, str],
    seed: int | None,
) -> ReportHeader:
    """Report header carrying the effective operating point plus `extra` keys."""
    base = {
        "rho": fmt_prob(scenario.fade_ul.rho),
        "separation_km": fmt_km(scenario.separation_km),
        "outage_thresh_db": f"{scenario.outage_thresh_db:g}",
        "switch_thresh_db": f"{scenario.switch_thresh_db:g}",
        "cs_snr_ul_db": f"{scenario.cs_snr_ul_db:g}",
        "cs_snr_dl_db": f"{scenario.cs_snr_dl_db:g}",
    }
    base.update(extra)
    return ReportHeader(
        command=args.command,
        scenario_name=resolved.name,
        scenario_sha256=resolved.source_sha256,
        seed=seed,
        timestamp=None if args.no_timestamp else now_iso(),
        extra=base,
    )


def _uses_mc(args: argparse.Namespace) -> bool:
    return args.method in ("mc", "both")


def _uses_analytic(args: argparse.Namespace) -> bool:
    return args.method in ("analytic", "both")


def _mc_extra(cfg: SimConfig) -> dict[str, str]:
    return {"slots": str(cfg.slots), "workers": str(cfg.workers), "burn_in": str(cfg.burn_in)}


# --------------------------- Commands ----------------------------------------


def cmd_outage(args: argparse.Namespace) -> int:
    """Feeder-uplink outage curves of one or more schemes."""
    resolved = load_scenario(args.scenario)
    scenario = scenario_from_args(args, resolved)
    schemes = [SchemeKind(s) for s in dict.fromkeys(args.scheme)]
    axis = SweepAxis.THETA if args.theta_sweep else SweepAxis(args.axis)
    values = sweep_values(args, axis, scenario)
    if args.method == "analytic":
        bad = [s.value for s in schemes if s not in ANALYTIC_SCHEMES]
        if bad:
            raise ConfigError(f"no analytic outage for {bad}; use --method mc or both")

    extra = {"axis": axis.label, "method": args.method}
    seed = None
    rows = []
    for scheme in schemes:
        analytic: list[float | None] = [None] * len(values)
        if _uses_analytic(args) and scheme in ANALYTIC_SCHEMES:
            analytic = [uplink_outage(apply_axis(scenario, axis, v), scheme) for v in values]
        mc_curve: OutageCurve | None = None
        if _uses_mc(args):
            cfg = sim_config(args, resolved, scenario, scheme)
            mc_curve = sweep(cfg, axis, values)
            extra.update(_mc_extra(cfg))
            seed = cfg.seed
        for i, v in enumerate(values):
            pt = mc_curve.points[i] if mc_curve is not None else None
            rows.append(
                {
                    "abscissa": f"{v:g}",
                    "outage_analytic": fmt_prob(analytic[i]),
                    "outage_mc": fmt_prob(pt.outage if pt else None),
                    "ci_halfwidth": fmt_prob(pt.ci_halfwidth if pt else None),
                    "scheme": scheme.value,
                    "rho": fmt_prob(apply_axis(scenario, axis, v).fade_ul.rho),
                }
            )
    fields = ["abscissa", "outage_analytic", "outage_mc", "ci_halfwidth", "scheme", "rho"]
    write_report(args.out, header_for(args, resolved, scenario, extra, seed), fields, rows)
    return EXIT_OK


def _gain_lines(
    curves: dict[SchemeKind, OutageCurve], axis: SweepAxis
) -> dict[str, str]:
    """Diversity gain (dB) of every scheme over single-GW at GAIN_TARGET."""
    ref = curves.get(SchemeKind.SINGLE)
    if ref is None or axis not in (SweepAxis.SNR, SweepAxis.MARGIN):
        return {}
    out = {}
    for scheme, curve in curves.items():
        if scheme is SchemeKind.SINGLE:
            continue
        try:
            out[f"gain_db_{scheme.value}"] = f"{diversity_gain_db(curve, ref, GAIN_TARGET):.3f}"
        except DomainError:
            out[f"gain_db_{scheme.value}"] = "n/a"
    return out


def cmd_e2e(args: argparse.Namespace) -> int:
    """End-to-end outage of several uplink schemes with the regenerative bound."""
    resolved = load_scenario(args.scenario)
    scenario = scenario_from_args(args, resolved)
    axis = SweepAxis(args.axis)
    values = sweep_values(args, axis, scenario)
    schemes = [SchemeKind(s) for s in dict.fromkeys(args.schemes)]
    if args.method == "analytic":
        bad = [s.value for s in schemes if s not in ANALYTIC_SCHEMES]
        if bad:
            raise ConfigError(f"no analytic end-to-end outage for {bad}; use --method mc or both")

    extra = {"axis": axis.label, "method": args.method, "gain_target": f"{GAIN_TARGET:g}"}
    seed = None
    rows = []
    gain_curves: dict[SchemeKind, OutageCurve] = {}
    for scheme in schemes:
        analytic = _uses_analytic(args) and scheme in ANALYTIC_SCHEMES
        mc_curve = None
        if _uses_mc(args):
            cfg = sim_config(args, resolved, scenario, scheme, e2e=True)
            mc_curve = sweep(cfg, axis, values)
            extra.update(_mc_extra(cfg))
            seed = cfg.seed
        e2e_points = []
        for i, v in enumerate(values):
            sc = apply_axis(scenario, axis, v)
            p_e2e = e2e_outage(sc, scheme) if analytic else None
            p_ul = uplink_outage(sc, scheme) if analytic else None
            bound = regenerative_bound(sc, scheme) if analytic else None
            pt = mc_curve.points[i] if mc_curve is not None else None
            if p_e2e is not None:
                e2e_points.append(p_e2e)
            rows.append(
                {
                    "abscissa": f"{v:g}",
                    "scheme": scheme.value,
                    "rho": fmt_prob(sc.fade_ul.rho),
                    "outage_uplink": fmt_prob(p_ul),
                    "e2e_outage": fmt_prob(p_e2e),
                    "regenerative_bound": fmt_prob(bound),
                    "e2e_outage_mc": fmt_prob(pt.outage if pt else None),
                    "ci_halfwidth": fmt_prob(pt.ci_halfwidth if pt else None),
                }
            )
        if analytic:
            points = tuple(CurvePoint(x=v, outage=p) for v, p in zip(values, e2e_points))
            gain_curves[scheme] = OutageCurve(scheme, OutageMethod.ANALYTIC, axis, points)
        elif mc_curve is not None:
            gain_curves[scheme] = mc_curve
    extra.update(_gain_lines(gain_curves, axis))

    fields = [
        "abscissa",
        "scheme",
        "rho",
        "outage_uplink",
        "e2e_outage",
        "regenerative_bound",
        "e2e_outage_mc",
        "ci_halfwidth",
    ]
    write_report(args.out, header_for(args, resolved, scenario, extra, seed), fields, rows)
    return EXIT_OK


def cmd_switching(args: argparse.Namespace) -> int:
    """Switching probabilities (MSSC / SSC / SC) and MSSC rate over a theta sweep."""
    resolved = load_scenario(args.scenario)
    scenario = scenario_from_args(args, resolved)
    axis = SweepAxis(args.axis)
    if axis is not SweepAxis.THETA:
        raise ConfigError("switching sweeps run along the theta axis only")
    values = sweep_values(args, axis, scenario)
    slot_s = resolved.simulation.slot_seconds if args.slot_seconds is None else args.slot_seconds

    summaries = (
        [switching_summary(apply_axis(scenario, axis, v), slot_s) for v in values]
        if _uses_analytic(args)
        else [None] * len(values)
    )
    sim_schemes = (SchemeKind.MSSC, SchemeKind.SSC, SchemeKind.SC)
    mc: dict[SchemeKind, OutageCurve] = {}
    extra = {"axis": axis.label, "method": args.method, "slot_seconds": f"{slot_s:g}"}
    seed = None
    if _uses_mc(args):
        for scheme in sim_schemes:
            cfg = sim_config(args, resolved, scenario, scheme)
            mc[scheme] = sweep(cfg, axis, values)
        extra.update(_mc_extra(cfg))
        seed = cfg.seed

    rows = []
    for i, v in enumerate(values):
        s = summaries[i]
        row = {
            "theta_db": f"{v:g}",
            "p_sw_mssc": fmt_prob(s.switch_prob if s else None),
            "p_sw_ssc": fmt_prob(s.switch_prob_ssc if s else None),
            "p_sw_sc": fmt_prob(s.switch_prob_sc if s else None),
            "r_sw_mssc": fmt_prob(s.switch_rate if s else None),
        }
        for scheme in sim_schemes:
            pt = mc[scheme].points[i] if scheme in mc else None
            row[f"sim_sw_{scheme.value}"] = fmt_prob(pt.switch_prob if pt else None)
            row[f"ci_sw_{scheme.value}"] = fmt_prob(pt.switch_ci_halfwidth if pt else None)
        rows.append(row)
    fields = ["theta_db", "p_sw_mssc", "p_sw_ssc", "p_sw_sc", "r_sw_mssc"]
    for scheme in sim_schemes:
        fields += [f"sim_sw_{scheme.value}", f"ci_sw_{scheme.value}"]
    write_report(args.out, header_for(args, resolved, scenario, extra, seed), fields, rows)
    return EXIT_OK


def cmd_budget(args: argparse.Namespace) -> int:
    """Clear-sky SNR of ad-hoc flags, else of the scenario's budget blocks."""
    flags = (args.eirp_dbw, args.fsl_db, args.gt_dbk, args.bandwidth_hz)
    entries: dict[str, BudgetEntry] = {}
    name, sha = "", ""
    if any(f is not None for f in flags):
        if any(f is None for f in flags):
            raise ConfigError("--eirp-dbw, --fsl-db, --gt-dbk and --bandwidth-hz go together")
        entries["adhoc"] = BudgetEntry(
            args.eirp_dbw, args.fsl_db, args.gt_dbk, args.bandwidth_hz, BOLTZMANN_DBW
        )
    else:
        resolved = load_scenario(args.scenario)
        name, sha = resolved.name, resolved.source_sha256
        budget = resolved.document.budget
        for hop in ("uplink", "downlink"):
            block = getattr(budget, hop) if budget is not None else None
            if block is not None:
                entries[hop] = block.to_entry()
        if not entries:
            raise ConfigError(f"scenario '{resolved.name}' has no budget blocks")

    rows = [
        {
            "hop": hop,
            "eirp_dbw": f"{e.eirp_dbw:g}",
            "free_space_loss_db": f"{e.free_space_loss_db:g}",
            "g_over_t_dbk": f"{e.g_over_t_dbk:g}",
            "bandwidth_hz": f"{e.bandwidth_hz:g}",
            "cs_snr_db": f"{clear_sky_snr(e):.4f}",
        }
        for hop, e in entries.items()
    ]
    header = ReportHeader(
        command=args.command,
        scenario_name=name,
        scenario_sha256=sha,
        timestamp=None if args.no_timestamp else now_iso(),
    )
    write_report(args.out, header, list(rows[0].keys()), rows)
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    """Print the resolved operating point as key/value rows."""
    resolved = load_scenario(args.scenario)
    sc = scenario_from_args(args, resolved)
    sim = resolved.simulation
    values = {
        "name": resolved.name,
        "separation_km": fmt_km(sc.separation_km),
        "rho": fmt_prob(sc.fade_ul.rho),
        "cs_snr_ul_db": f"{sc.cs_snr_ul_db:g}",
        "cs_snr_dl_db": f"{sc.cs_snr_dl_db:g}",
        "outage_thresh_db": f"{sc.outage_thresh_db:g}",
        "switch_thresh_db": f"{sc.switch_thresh_db:g}",
        "fade_ul": f"m1={sc.fade_ul.m1:g} s1={sc.fade_ul.s1:g} m2={sc.fade_ul.m2:g} "
        f"s2={sc.fade_ul.s2:g}",
        "fade_dl": f"m={sc.fade_dl.m:g} s={sc.fade_dl.s:g}",
        "slots": str(sim.slots),
        "seed": str(sim.seed),
        "workers": str(sim.workers),
        "burn_in": str(sim.burn_in),
        "slot_seconds": f"{sim.slot_seconds:g}",
    }
    for hop, snr in resolved.budget_snr_db.items():
        values[f"budget_cs_snr_{hop}_db"] = f"{snr:.4f}"
    header = ReportHeader(
        command=args.command,
        scenario_name=resolved.name,
        scenario_sha256=resolved.source_sha256,
        seed=sim.seed,
        timestamp=None if args.no_timestamp else now_iso(),
    )
    rows = [{"key": k, "value": v} for k, v in values.items()]
    write_report(args.out, header, ["key", "value"], rows)
    return EXIT_OK


# --------------------------- Main --------------------------------------------


def main(argv: Sequence[str] | None = None) -> int:
    """Entry point; returns the process exit code."""
    args = parse_args(argv)
    configure_logging(level=args.log_level)
    try:
        with tracer.start_as_current_span(f"cli.{args.command}") as span:
            span.set_attribute("scenario", str(args.scenario))
            return int(args.func(args))
    except (ConfigError, DomainError, ValidationError, OSError) as exc:
        logger.error("cli.config_error", command=args.command, error=str(exc))
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        logger.error("cli.numerical_error", command=args.command, error=str(exc))
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    raise SystemExit(main())
