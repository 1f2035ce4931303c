"""Shared fixtures: the illustrative fade law and two operating points.

`default_scenario` is the bundled default (Gamma_th = 10 dB, uplink margin
18.3 dB). `margin10` moves Gamma_th to 18.3 dB so that outage events are
frequent enough for Monte Carlo oracles at 1e5-1e6 slots; `asym_margin10` gives
gateway 2 a rainier climate. `record_events` captures a module's log events.
"""
from __future__ import annotations

from collections.abc import Callable
from dataclasses import replace
from types import ModuleType

import numpy as np
import pytest

from src.analysis.scenario import LinkScenario
from src.channel.model import LognormalFade, RainFadeParams, correlation_from_distance

RHO_20KM = correlation_from_distance(20.0)


@pytest.fixture
def fade_ul() -> RainFadeParams:
    """Identical gateways 20 km apart."""
    return RainFadeParams(m1=-0.2, s1=1.1, m2=-0.2, s2=1.1, rho=RHO_20KM)


@pytest.fixture
def default_scenario(fade_ul: RainFadeParams) -> LinkScenario:
    """Reference clear-sky SNRs with theta at the outage threshold."""
    return LinkScenario(
        cs_snr_ul_db=28.3,
        cs_snr_dl_db=21.3,
        outage_thresh_db=10.0,
        switch_thresh_db=10.0,
        fade_ul=fade_ul,
        fade_dl=LognormalFade(m=-1.0, s=0.9),
    )


@pytest.fixture
def margin10(default_scenario: LinkScenario) -> LinkScenario:
    """Default scenario at a 10 dB uplink margin."""
    return default_scenario.with_margin(10.0)


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator for sampling tests."""
    return np.random.Generator(np.random.PCG64(12345))


@pytest.fixture
def asym_margin10(margin10: LinkScenario) -> LinkScenario:
    """`margin10` with gateway 2 in a rainier climate (larger ln-mean)."""
    return replace(margin10, fade_ul=replace(margin10.fade_ul, m2=0.6))


class EventRecorder:
    """Stand-in for a module logger that keeps (level, event) pairs."""

    def __init__(self) -> None:
        self.events: list[tuple[str, str]] = []

    def __getattr__(self, level: str) -> Callable[..., None]:
        def emit(event: str, **_: object) -> None:
            self.events.append((level, event))

        return emit


@pytest.fixture
def record_events(monkeypatch: pytest.MonkeyPatch) -> Callable[[ModuleType], EventRecorder]:
    """Swap a module's `logger` for an EventRecorder for the test's duration."""

    def patch(module: ModuleType) -> EventRecorder:
        recorder = EventRecorder()
        monkeypatch.setattr(module, "logger", recorder)
        return recorder

    return patch
