"""Monte Carlo harness: slot-by-slot runs of any diversity scheme.

Overview:
  Each slot draws a correlated attenuation pair (and a downlink fade for
  end-to-end runs), applies the scheme's switching rule and counts outage
  events {SNR < gamma_th} and gateway switches. This is the independent
  oracle for every analytic result in `src.analysis`.

Strategy:
  - Slots are processed in numpy blocks. The switching rules are resolved
    without a Python loop: within a block every slot either *sets* the
    active gateway (the rule's outcome does not depend on the past), *flips*
    it (SSC with both branches below theta) or *keeps* it, so the active
    gateway is a forward fill of the last set value corrected by the parity
    of the flips since then.
  - Workers own independent PCG64 streams spawned from
    `SeedSequence(seed, spawn_key=stream_key)`; tallies are integers and are
    summed in worker order, so a (seed, slots, workers) triple always yields
    the same report.
  - Each worker discards `burn_in` warm-up slots before counting.

Example:
  cfg = SimConfig(scenario=scenario, scheme=SchemeKind.MSSC, slots=1_000_000, seed=7)
  report = run(cfg)
"""
from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from src.analysis.outage import CurvePoint, OutageCurve, OutageMethod, curve_metadata
from src.analysis.scenario import LinkScenario, SweepAxis, apply_axis, check_monotone
from src.analysis.switching import SchemeKind
from src.channel.model import attenuation_db_to_gain, sample_fade, sample_pairs
from src.config import settings
from src.errors import ConfigError
from src.obs.logging import get_logger
from src.obs.otel import sim_run_ms, sim_slots_total, tracer

logger = get_logger(__name__)

Z95 = 1.96
# Below this many events a normal-approximation CI is not reported.
MIN_EVENTS_FOR_CI = 10
MIN_SLOTS = 1_000
DEFAULT_BLOCK = 1 << 20


@dataclass(frozen=True)
class SimConfig:
    """Monte Carlo run configuration.

    Attributes:
      scenario: Operating point.
      scheme: Diversity scheme to simulate.
      slots: Counted slots in total (>= 1000), split across workers.
      seed: Master seed (0 <= seed < 2^64).
      workers: Number of independent streams / worker processes.
      burn_in: Warm-up slots discarded by every worker (< slots).
      e2e: Include the user downlink and count outage on gamma_eq.
      stream_key: Spawn key appended to the master seed (sweeps use (i,)).
      block_size: Slots per vectorized block.
    """

    scenario: LinkScenario
    scheme: SchemeKind
    slots: int = 1_000_000
    seed: int = 0
    workers: int = 1
    burn_in: int = 10_000
    e2e: bool = False
    stream_key: tuple[int, ...] = ()
    block_size: int = DEFAULT_BLOCK

    def __post_init__(self) -> None:
        if self.slots < MIN_SLOTS:
            raise ConfigError(f"slots must be >= {MIN_SLOTS}, got {self.slots}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if not (0 <= self.burn_in < self.slots):
            raise ConfigError(f"burn_in must lie in [0, slots), got {self.burn_in}")
        if not (0 <= self.seed < 2**64):
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.block_size < 1:
            raise ConfigError("block_size must be >= 1")


@dataclass(frozen=True)
class SimReport:
    """Monte Carlo estimates with 95% normal-approximation half-widths.

    Half-widths are None (and the matching `*_unreliable` flag is set) when
    fewer than 10 events were observed.
    """

    scheme: SchemeKind
    outage_est: float
    outage_ci_halfwidth: float | None
    outage_unreliable: bool
    switch_prob_est: float
    switch_ci_halfwidth: float | None
    switch_unreliable: bool
    outage_count: int
    switch_count: int
    slots_used: int
    seed: int
    workers: int
    wall_time_ms: float
    state_freq: tuple[float, ...] | None = None

    def estimates(self) -> tuple[float, float, int, int, int]:
        """The deterministic part of the report (everything but wall time)."""
        return (
            self.outage_est,
            self.switch_prob_est,
            self.outage_count,
            self.switch_count,
            self.slots_used,
        )


@dataclass
class _Tally:
    slots: int = 0
    outages: int = 0
    switches: int = 0
    states: np.ndarray = field(default_factory=lambda: np.zeros(6, dtype=np.int64))

    def merge(self, other: _Tally) -> None:
        """Add the counts of `other` in place."""
        self.slots += other.slots
        self.outages += other.outages
        self.switches += other.switches
        self.states += other.states


# -----------------------------------------------------------------------------
# Vectorized switching rules
# -----------------------------------------------------------------------------
def resolve_active(code: np.ndarray, flips: np.ndarray, prev_active: int) -> np.ndarray:
    """Active gateway per slot from set codes (0 = none, 1/2 = set) and flips."""
    n = code.shape[0]
    idx = np.where(code > 0, np.arange(n), -1)
    last = np.maximum.accumulate(idx)
    parity_total = np.cumsum(flips, dtype=np.int64)
    has_set = last >= 0
    safe_last = np.where(has_set, last, 0)
    base = np.where(has_set, code[safe_last], prev_active)
    since = np.where(has_set, parity_total - parity_total[safe_last], parity_total)
    return np.where(since % 2 == 0, base, 3 - base).astype(np.int8)


def active_path(
    scheme: SchemeKind, prev_active: int, snr1: np.ndarray, snr2: np.ndarray, theta: float
) -> np.ndarray:
    """Gateway active in each slot, vectorized counterpart of `switching.step`."""
    n = snr1.shape[0]
    if scheme in (SchemeKind.SINGLE, SchemeKind.MRC):
        return np.full(n, 1 if scheme is SchemeKind.SINGLE else prev_active, dtype=np.int8)
    no_flips = np.zeros(n, dtype=np.int64)
    if scheme is SchemeKind.SC:
        code = np.where(snr2 > snr1, 2, np.where(snr1 > snr2, 1, 0))
        return resolve_active(code, no_flips, prev_active)
    below1, below2 = snr1 < theta, snr2 < theta
    code = np.where(below1 & ~below2, 2, np.where(~below1 & below2, 1, 0))
    if scheme is SchemeKind.MSSC:
        return resolve_active(code, no_flips, prev_active)
    # SSC: both below -> the active gateway is left regardless of the other.
    return resolve_active(code, (below1 & below2).astype(np.int64), prev_active)


def mssc_states(
    prev: np.ndarray, snr1: np.ndarray, snr2: np.ndarray, theta: float
) -> np.ndarray:
    """Markov state (1..6) of each slot given the previously active gateway."""
    b1, b2 = snr1 < theta, snr2 < theta
    on1 = np.where(~b1, 1, np.where(b2, 2, 3))
    on2 = np.where(~b2, 4, np.where(b1, 5, 6))
    return np.where(prev == 1, on1, on2)


# -----------------------------------------------------------------------------
# Per-worker simulator
# -----------------------------------------------------------------------------
class SlotSimulator:
    """Simulates consecutive slots of one scheme on one RNG stream.

    Attributes:
      config: Run configuration (scenario, scheme, e2e flag).
      rng: The worker's generator.
      prev_active: Gateway active at the end of the last processed slot.
    """

    def __init__(self, config: SimConfig, rng: np.random.Generator) -> None:
        self.config = config
        self.rng = rng
        self.prev_active = 1

    def block(self, n: int, skip: int = 0) -> _Tally:
        """Simulate `n` slots, counting only those at index >= `skip`."""
        sc = self.config.scenario
        scheme = self.config.scheme
        batch = sample_pairs(sc.fade_ul, self.rng, n)
        snr1 = sc.cs_ul * batch.g1_lin
        snr2 = sc.cs_ul * batch.g2_lin
        theta = sc.theta

        active = active_path(scheme, self.prev_active, snr1, snr2, theta)
        prev = np.concatenate(([self.prev_active], active[:-1])).astype(np.int8)
        if scheme is SchemeKind.MRC:
            snr = snr1 + snr2
        else:
            snr = np.where(active == 1, snr1, snr2)
        if self.config.e2e:
            gamma_g = sc.cs_dl * attenuation_db_to_gain(sample_fade(sc.fade_dl, self.rng, n))
            snr = gamma_g * snr / (gamma_g + snr + 1.0)

        tally = _Tally(slots=n - skip)
        tally.outages = int(np.count_nonzero(snr[skip:] < sc.gamma_th))
        tally.switches = int(np.count_nonzero(active[skip:] != prev[skip:]))
        if scheme is SchemeKind.MSSC:
            states = mssc_states(prev[skip:], snr1[skip:], snr2[skip:], theta)
            tally.states = np.bincount(states - 1, minlength=6).astype(np.int64)
        self.prev_active = int(active[-1])
        return tally

    def simulate(self, counted: int) -> _Tally:
        """Run `burn_in` warm-up slots then `counted` slots."""
        total = self.config.burn_in + counted
        size = self.config.block_size
        out = _Tally()
        done = 0
        while done < total:
            n = min(size, total - done)
            skip = max(0, min(n, self.config.burn_in - done))
            out.merge(self.block(n, skip))
            done += n
        return out


def _simulate_share(config: SimConfig, seed_seq: np.random.SeedSequence, counted: int) -> _Tally:
    """Worker entry point (top-level so it pickles)."""
    rng = np.random.Generator(np.random.PCG64(seed_seq))
    return SlotSimulator(config, rng).simulate(counted)


def _shares(slots: int, workers: int) -> list[int]:
    base, extra = divmod(slots, workers)
    return [base + (1 if i < extra else 0) for i in range(workers)]


def _halfwidth(count: int, n: int) -> tuple[float, float | None, bool]:
    p = count / n
    if count < MIN_EVENTS_FOR_CI:
        return p, None, True
    return p, Z95 * math.sqrt(p * (1.0 - p) / n), False


# -----------------------------------------------------------------------------
# Public API
# -----------------------------------------------------------------------------
def run(config: SimConfig) -> SimReport:
    """Simulate `config.slots` slots and report outage / switching estimates.

    Raises:
      ConfigError: If the configuration is invalid.
    """
    if not isinstance(config, SimConfig):
        raise ConfigError("run() expects a SimConfig")
    with tracer.start_as_current_span("sim.run") as span:
        span.set_attribute("scheme", config.scheme.value)
        span.set_attribute("slots", config.slots)
        span.set_attribute("workers", config.workers)
        t0 = time.perf_counter()

        streams = np.random.SeedSequence(config.seed, spawn_key=config.stream_key).spawn(
            config.workers
        )
        shares = _shares(config.slots, config.workers)
        if config.workers == 1:
            tallies = [_simulate_share(config, streams[0], shares[0])]
        else:
            pool_size = min(config.workers, settings.MAX_WORKERS)
            with ProcessPoolExecutor(max_workers=pool_size) as pool:
                futures = [
                    pool.submit(_simulate_share, config, s, n) for s, n in zip(streams, shares)
                ]
                # Worker order, not completion order.
                tallies = [f.result() for f in futures]

        total = _Tally()
        for t in tallies:
            total.merge(t)

        p_out, ci_out, bad_out = _halfwidth(total.outages, total.slots)
        p_sw, ci_sw, bad_sw = _halfwidth(total.switches, total.slots)
        wall_ms = (time.perf_counter() - t0) * 1000.0
        states = (
            tuple(float(c) / total.slots for c in total.states)
            if config.scheme is SchemeKind.MSSC
            else None
        )
        report = SimReport(
            scheme=config.scheme,
            outage_est=p_out,
            outage_ci_halfwidth=ci_out,
            outage_unreliable=bad_out,
            switch_prob_est=p_sw,
            switch_ci_halfwidth=ci_sw,
            switch_unreliable=bad_sw,
            outage_count=total.outages,
            switch_count=total.switches,
            slots_used=total.slots,
            seed=config.seed,
            workers=config.workers,
            wall_time_ms=round(wall_ms, 1),
            state_freq=states,
        )

        sim_slots_total.add(total.slots, {"scheme": config.scheme.value})
        sim_run_ms.record(wall_ms, {"scheme": config.scheme.value})
        span.set_attribute("outage_est", p_out)
        logger.info(
            "sim.run.done",
            scheme=config.scheme.value,
            e2e=config.e2e,
            slots=total.slots,
            outage=p_out,
            switch_prob=p_sw,
            wall_ms=round(wall_ms, 1),
        )
        return report


def sweep(config: SimConfig, axis: SweepAxis, values: list[float]) -> OutageCurve:
    """One `run` per value of `axis`; point i uses stream key (*stream_key, i).

    Raises:
      DomainError: If `values` is empty or not strictly monotone.
    """
    check_monotone(values)
    with tracer.start_as_current_span("sim.sweep") as span:
        span.set_attribute("axis", axis.value)
        span.set_attribute("points", len(values))
        points = []
        for i, v in enumerate(values):
            cfg = replace(
                config,
                scenario=apply_axis(config.scenario, axis, v),
                stream_key=(*config.stream_key, i),
            )
            rep = run(cfg)
            points.append(
                CurvePoint(
                    x=v,
                    outage=rep.outage_est,
                    ci_halfwidth=rep.outage_ci_halfwidth,
                    unreliable=rep.outage_unreliable,
                    switch_prob=rep.switch_prob_est,
                    switch_ci_halfwidth=rep.switch_ci_halfwidth,
                )
            )
        meta = curve_metadata(config.scenario)
        meta.update(seed=float(config.seed), slots=float(config.slots))
        return OutageCurve(config.scheme, OutageMethod.MONTECARLO, axis, tuple(points), meta)
