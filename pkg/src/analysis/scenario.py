"""Link scenario value type and sweep-axis application.

A `LinkScenario` bundles everything the analytic and simulation layers need
to evaluate one operating point: clear-sky SNRs, the outage and switching
thresholds and the fade laws of the uplink pair and the user downlink.
Sweeps vary one of these along a `SweepAxis` via `apply_axis`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

from src.channel.model import (
    LognormalFade,
    RainFadeParams,
    correlation_from_distance,
    db_to_lin,
)
from src.errors import DomainError


class SweepAxis(str, Enum):
    """Quantity varied along an outage curve."""

    SNR = "snr"  # uplink clear-sky SNR (dB); thresholds fixed
    MARGIN = "margin"  # Gamma_CS - Gamma_th (dB); theta offset preserved
    DISTANCE = "distance"  # gateway separation (km) -> rho(D)
    THETA = "theta"  # absolute switching threshold (dB)
    RHO = "rho"  # correlation coefficient, set directly

    @property
    def label(self) -> str:
        """Column label used in report files."""
        return {
            SweepAxis.SNR: "cs_snr_ul_db",
            SweepAxis.MARGIN: "margin_db",
            SweepAxis.DISTANCE: "distance_km",
            SweepAxis.THETA: "theta_db",
            SweepAxis.RHO: "rho",
        }[self]


@dataclass(frozen=True)
class LinkScenario:
    """One operating point of the forward link.

    Attributes:
      cs_snr_ul_db: Clear-sky feeder uplink SNR Gamma_CS (dB).
      cs_snr_dl_db: Clear-sky user downlink SNR (dB).
      outage_thresh_db: Outage threshold Gamma_th (dB).
      switch_thresh_db: Switching threshold Theta (dB).
      fade_ul: Joint fade law of the two gateways.
      fade_dl: Fade law of the user downlink.
      separation_km: Gateway separation that produced `fade_ul.rho`, or None
        when rho was set directly.
    """

    cs_snr_ul_db: float
    cs_snr_dl_db: float
    outage_thresh_db: float
    switch_thresh_db: float
    fade_ul: RainFadeParams
    fade_dl: LognormalFade
    separation_km: float | None = None

    def __post_init__(self) -> None:
        for name in ("cs_snr_ul_db", "cs_snr_dl_db", "outage_thresh_db", "switch_thresh_db"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")
        if self.separation_km is not None and not self.separation_km >= 0.0:
            raise DomainError(f"separation_km must be >= 0, got {self.separation_km}")

    # Linear-domain views
    @property
    def gamma_th(self) -> float:
        """Outage threshold, linear."""
        return db_to_lin(self.outage_thresh_db)

    @property
    def theta(self) -> float:
        """Switching threshold, linear."""
        return db_to_lin(self.switch_thresh_db)

    @property
    def cs_ul(self) -> float:
        """Clear-sky uplink SNR, linear."""
        return db_to_lin(self.cs_snr_ul_db)

    @property
    def cs_dl(self) -> float:
        """Clear-sky downlink SNR, linear."""
        return db_to_lin(self.cs_snr_dl_db)

    # Margins: the attenuation a gateway may suffer before crossing a threshold.
    @property
    def ul_margin_db(self) -> float:
        """Gamma_CS - Gamma_th on the uplink."""
        return self.cs_snr_ul_db - self.outage_thresh_db

    @property
    def switch_margin_db(self) -> float:
        """Gamma_CS - Theta on the uplink."""
        return self.cs_snr_ul_db - self.switch_thresh_db

    @property
    def dl_margin_db(self) -> float:
        """Clear-sky downlink SNR minus Gamma_th."""
        return self.cs_snr_dl_db - self.outage_thresh_db

    @property
    def theta_offset_db(self) -> float:
        """Theta - Gamma_th in dB (0 at the optimal setting)."""
        return self.switch_thresh_db - self.outage_thresh_db

    def with_margin(self, margin_db: float) -> LinkScenario:
        """Move Gamma_th (and Theta with it) to the given uplink margin."""
        th = self.cs_snr_ul_db - margin_db
        return replace(self, outage_thresh_db=th, switch_thresh_db=th + self.theta_offset_db)

    def with_rho(self, rho: float) -> LinkScenario:
        """Copy with the uplink correlation set directly (no separation)."""
        return replace(self, fade_ul=self.fade_ul.with_rho(rho), separation_km=None)

    def with_separation(self, separation_km: float) -> LinkScenario:
        """Copy with the uplink correlation taken from the gateway separation."""
        rho = correlation_from_distance(separation_km)
        return replace(self, fade_ul=self.fade_ul.with_rho(rho), separation_km=separation_km)


def apply_axis(scenario: LinkScenario, axis: SweepAxis, value: float) -> LinkScenario:
    """Return `scenario` with the quantity on `axis` set to `value`.

    Raises:
      DomainError: For an invalid distance or correlation.
    """
    if axis is SweepAxis.SNR:
        return replace(scenario, cs_snr_ul_db=value)
    if axis is SweepAxis.MARGIN:
        return scenario.with_margin(value)
    if axis is SweepAxis.DISTANCE:
        return scenario.with_separation(value)
    if axis is SweepAxis.THETA:
        return replace(scenario, switch_thresh_db=value)
    return scenario.with_rho(value)


def check_monotone(values: list[float]) -> None:
    """Sweep values must be non-empty and strictly monotone.

    Raises:
      DomainError: Otherwise.
    """
    if not values:
        raise DomainError("sweep values must not be empty")
    if len(values) > 1:
        diffs = [b - a for a, b in zip(values, values[1:])]
        if not (all(d > 0 for d in diffs) or all(d < 0 for d in diffs)):
            raise DomainError("sweep values must be strictly monotone")
