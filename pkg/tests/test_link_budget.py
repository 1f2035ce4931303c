"""Clear-sky link budget."""
from __future__ import annotations

import math

import pytest

from src.budget.link_budget import BOLTZMANN_DBW, BudgetEntry, clear_sky_snr
from src.errors import DomainError

UPLINK = BudgetEntry(76.5, 218.3, 31.45, 1.0e9)
DOWNLINK = BudgetEntry(72.5, 210.5, 20.3, 9.12e8)


def test_reference_hops() -> None:
    """Ensures: the reference feeder uplink and user downlink budgets."""
    assert clear_sky_snr(UPLINK) == pytest.approx(28.25, abs=1e-9)
    assert abs(clear_sky_snr(UPLINK) - 28.3) < 0.1
    assert clear_sky_snr(DOWNLINK) == pytest.approx(21.3, abs=0.05)


def test_doubling_bandwidth_costs_three_db() -> None:
    """Ensures: twice the bandwidth costs 10 log10(2) dB of SNR."""
    wide = BudgetEntry(76.5, 218.3, 31.45, 2.0e9)
    assert clear_sky_snr(UPLINK) - clear_sky_snr(wide) == pytest.approx(
        10.0 * math.log10(2.0), abs=1e-12
    )


def test_unit_coefficients() -> None:
    """Ensures: each dB term moves the SNR by exactly one dB in its direction."""
    base = clear_sky_snr(UPLINK)
    assert clear_sky_snr(BudgetEntry(77.5, 218.3, 31.45, 1.0e9)) == pytest.approx(base + 1.0)
    assert clear_sky_snr(BudgetEntry(76.5, 219.3, 31.45, 1.0e9)) == pytest.approx(base - 1.0)
    assert clear_sky_snr(BudgetEntry(76.5, 218.3, 32.45, 1.0e9)) == pytest.approx(base + 1.0)
    shifted = BudgetEntry(76.5, 218.3, 31.45, 1.0e9, boltzmann_dbw=BOLTZMANN_DBW + 1.0)
    assert clear_sky_snr(shifted) == pytest.approx(base - 1.0)


@pytest.mark.parametrize("bandwidth", [0.0, -1.0, math.nan, math.inf])
def test_rejects_bad_bandwidth(bandwidth: float) -> None:
    """Ensures: non-positive or non-finite bandwidth raises DomainError."""
    with pytest.raises(DomainError):
        BudgetEntry(76.5, 218.3, 31.45, bandwidth)


def test_rejects_non_finite_terms() -> None:
    """Ensures: a NaN dB term raises DomainError."""
    with pytest.raises(DomainError):
        BudgetEntry(math.nan, 218.3, 31.45, 1.0e9)
