"""Scenario documents: pydantic schema, loader and resolution to domain types.

A scenario is a JSON document bundling the link operating point, the fade
laws, the gateway geometry, simulation defaults and optional link-budget
blocks. Unknown keys are rejected at every level.

Resolution rules:
  - `rho: null` -> derived from `geometry.separation_km`.
  - A missing `cs_snr_*_db` is derived from the matching budget block; when
    both are present the explicit value wins.
  - A missing `switch_thresh_db` defaults to `outage_thresh_db`.

Bare names (no suffix, no path separator) are looked up in
`settings.SCENARIO_DIR`, e.g. `load_scenario("default")`.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from src.analysis.scenario import LinkScenario
from src.budget.link_budget import BOLTZMANN_DBW, BudgetEntry, clear_sky_snr
from src.channel.model import LognormalFade, RainFadeParams, SiteGeometry
from src.config import settings
from src.errors import ConfigError, DomainError
from src.obs.logging import get_logger

logger = get_logger(__name__)

# Explicit and budget-derived clear-sky SNRs further apart than this are logged.
BUDGET_MISMATCH_DB = 0.1


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class LinkBlock(_Strict):
    """Clear-sky SNRs and thresholds (dB); missing SNRs come from the budget."""

    cs_snr_ul_db: float | None = None
    cs_snr_dl_db: float | None = None
    outage_thresh_db: float
    switch_thresh_db: float | None = None


class UplinkFadeBlock(_Strict):
    """ln-attenuation laws of the two gateways; `rho: null` derives it from the separation."""

    m1: float
    s1: float = Field(gt=0)
    m2: float
    s2: float = Field(gt=0)
    rho: float | None = Field(default=None, ge=0, le=1)


class DownlinkFadeBlock(_Strict):
    """ln-attenuation law of the user downlink."""

    m: float
    s: float = Field(gt=0)


class GeometryBlock(_Strict):
    """Gateway separation in km."""

    separation_km: float = Field(ge=0)


class SimulationBlock(_Strict):
    """Monte Carlo defaults; command-line flags override each field."""

    slots: int = Field(default=1_000_000, ge=1_000)
    seed: int = Field(default=0, ge=0, lt=2**64)
    workers: int = Field(default=1, ge=1)
    burn_in: int = Field(default=10_000, ge=0)
    slot_seconds: float = Field(default=1.0, gt=0)


class BudgetBlock(_Strict):
    """One hop of a clear-sky link budget."""

    eirp_dbw: float
    free_space_loss_db: float
    g_over_t_dbk: float
    bandwidth_hz: float = Field(gt=0)
    boltzmann_dbw: float = BOLTZMANN_DBW

    def to_entry(self) -> BudgetEntry:
        """Domain entry for `clear_sky_snr`."""
        return BudgetEntry(**self.model_dump())


class BudgetPair(_Strict):
    """Optional uplink and downlink budgets."""

    uplink: BudgetBlock | None = None
    downlink: BudgetBlock | None = None


class ScenarioFile(_Strict):
    """Top-level scenario document."""

    name: str
    description: str = ""
    link: LinkBlock
    fade_ul: UplinkFadeBlock
    fade_dl: DownlinkFadeBlock
    geometry: GeometryBlock
    simulation: SimulationBlock = SimulationBlock()
    budget: BudgetPair | None = None
    metadata: dict[str, str] = Field(default_factory=dict)


@dataclass(frozen=True)
class ResolvedScenario:
    """A validated scenario turned into domain objects.

    Attributes:
      name: Scenario name.
      scenario: Link operating point.
      geometry: Gateway separation.
      simulation: Simulation defaults from the file.
      source_sha256: Hash of the document bytes (report headers).
      budget_snr_db: Budget-derived clear-sky SNRs, keyed 'uplink'/'downlink'.
      document: The parsed document.
    """

    name: str
    scenario: LinkScenario
    geometry: SiteGeometry
    simulation: SimulationBlock
    source_sha256: str
    budget_snr_db: dict[str, float]
    document: ScenarioFile


def resolve_path(ref: str | Path) -> Path:
    """Map a bare scenario name to the bundled directory; leave paths alone."""
    p = Path(ref)
    if p.suffix or len(p.parts) > 1:
        return p
    return settings.SCENARIO_DIR / f"{p.name}.json"


def _clear_sky(
    explicit: float | None, block: BudgetBlock | None, hop: str, budget_snr: dict[str, float]
) -> float:
    derived = None
    if block is not None:
        derived = clear_sky_snr(block.to_entry())
        budget_snr[hop] = derived
    if explicit is None:
        if derived is None:
            key = "cs_snr_ul_db" if hop == "uplink" else "cs_snr_dl_db"
            raise ConfigError(f"{key} missing and no {hop} budget block given")
        return derived
    if derived is not None and abs(derived - explicit) > BUDGET_MISMATCH_DB:
        logger.info("scenario.budget_mismatch", hop=hop, explicit_db=explicit, budget_db=derived)
    return explicit


def resolve(doc: ScenarioFile, source_sha256: str = "") -> ResolvedScenario:
    """Turn a validated document into domain objects.

    Raises:
      ConfigError: If a clear-sky SNR can be neither read nor derived, or a
        sub-structure violates its domain invariants.
    """
    budget = doc.budget or BudgetPair()
    budget_snr: dict[str, float] = {}
    try:
        geometry = SiteGeometry(doc.geometry.separation_km)
        rho = doc.fade_ul.rho if doc.fade_ul.rho is not None else geometry.rho
        cs_ul = _clear_sky(doc.link.cs_snr_ul_db, budget.uplink, "uplink", budget_snr)
        cs_dl = _clear_sky(doc.link.cs_snr_dl_db, budget.downlink, "downlink", budget_snr)
        th = doc.link.outage_thresh_db
        scenario = LinkScenario(
            cs_snr_ul_db=cs_ul,
            cs_snr_dl_db=cs_dl,
            outage_thresh_db=th,
            switch_thresh_db=th if doc.link.switch_thresh_db is None else doc.link.switch_thresh_db,
            fade_ul=RainFadeParams(
                doc.fade_ul.m1, doc.fade_ul.s1, doc.fade_ul.m2, doc.fade_ul.s2, rho
            ),
            fade_dl=LognormalFade(doc.fade_dl.m, doc.fade_dl.s),
            separation_km=geometry.separation_km if doc.fade_ul.rho is None else None,
        )
    except DomainError as exc:
        raise ConfigError(f"scenario '{doc.name}': {exc}") from exc
    if doc.simulation.burn_in >= doc.simulation.slots:
        raise ConfigError(f"scenario '{doc.name}': burn_in must be < slots")
    return ResolvedScenario(
        name=doc.name,
        scenario=scenario,
        geometry=geometry,
        simulation=doc.simulation,
        source_sha256=source_sha256,
        budget_snr_db=budget_snr,
        document=doc,
    )


def load_scenario(ref: str | Path) -> ResolvedScenario:
    """Read, validate and resolve a scenario file or bundled scenario name.

    Raises:
      OSError: If the file cannot be read.
      ConfigError: If the document is not valid JSON or fails validation.
    """
    path = resolve_path(ref)
    raw = path.read_bytes()
    try:
        doc = ScenarioFile.model_validate(json.loads(raw.decode("utf-8")))
    except (ValidationError, json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ConfigError(f"invalid scenario {path}: {exc}") from exc
    resolved = resolve(doc, hashlib.sha256(raw).hexdigest())
    logger.info(
        "scenario.loaded",
        path=str(path),
        name=resolved.name,
        rho=resolved.scenario.fade_ul.rho,
        sha256=resolved.source_sha256[:12],
    )
    return resolved
