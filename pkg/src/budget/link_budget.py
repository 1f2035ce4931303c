"""Clear-sky link budget.

    SNR_CS = EIRP - FSL + G/T - k - 10 log10(B)      (all in dB units)

with k = -228.6 dBW/K/Hz.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from src.errors import DomainError

BOLTZMANN_DBW = -228.6


@dataclass(frozen=True)
class BudgetEntry:
    """One hop of the link budget.

    Attributes:
      eirp_dbw: Transmit EIRP (dBW).
      free_space_loss_db: Free-space path loss (dB).
      g_over_t_dbk: Receiver figure of merit G/T (dB/K).
      bandwidth_hz: Noise bandwidth (Hz, > 0).
      boltzmann_dbw: Boltzmann constant (dBW/K/Hz).
    """

    eirp_dbw: float
    free_space_loss_db: float
    g_over_t_dbk: float
    bandwidth_hz: float
    boltzmann_dbw: float = BOLTZMANN_DBW

    def __post_init__(self) -> None:
        if not (math.isfinite(self.bandwidth_hz) and self.bandwidth_hz > 0.0):
            raise DomainError(f"bandwidth_hz must be > 0, got {self.bandwidth_hz}")
        for name in ("eirp_dbw", "free_space_loss_db", "g_over_t_dbk", "boltzmann_dbw"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")

    @property
    def bandwidth_db(self) -> float:
        """Bandwidth in dB-Hz."""
        return 10.0 * math.log10(self.bandwidth_hz)


def clear_sky_snr(entry: BudgetEntry) -> float:
    """Clear-sky SNR (dB) of one hop."""
    return (
        entry.eirp_dbw
        - entry.free_space_loss_db
        + entry.g_over_t_dbk
        - entry.boltzmann_dbw
        - entry.bandwidth_db
    )
