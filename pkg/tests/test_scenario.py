"""Scenario documents: schema validation, resolution and bundled files."""
from __future__ import annotations

import copy
import hashlib
import json
from pathlib import Path
from typing import Any

import pytest

from src.channel.model import correlation_from_distance
from src.config import settings
from src.errors import ConfigError
from src.scenario.schema import ScenarioFile, load_scenario, resolve, resolve_path

BASE_DOC: dict[str, Any] = {
    "name": "t",
    "link": {"cs_snr_ul_db": 28.3, "cs_snr_dl_db": 21.3, "outage_thresh_db": 10.0},
    "fade_ul": {"m1": -0.2, "s1": 1.1, "m2": -0.2, "s2": 1.1, "rho": None},
    "fade_dl": {"m": -1.0, "s": 0.9},
    "geometry": {"separation_km": 20.0},
}
UPLINK_BUDGET = {
    "eirp_dbw": 76.5,
    "free_space_loss_db": 218.3,
    "g_over_t_dbk": 31.45,
    "bandwidth_hz": 1.0e9,
}


def _doc(**changes: Any) -> dict[str, Any]:
    doc = copy.deepcopy(BASE_DOC)
    doc.update(changes)
    return doc


def _write(tmp_path: Path, doc: dict[str, Any]) -> Path:
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    return path


def test_bundled_default_loads() -> None:
    """Bundled default scenario.

    Ensures:
      - rho comes from the 20 km separation, which is reported,
      - the margin and simulation settings match the file.
    """
    rs = load_scenario("default")
    assert rs.name == "default"
    assert rs.scenario.fade_ul.rho == pytest.approx(correlation_from_distance(20.0))
    assert rs.scenario.ul_margin_db == pytest.approx(18.3)
    assert rs.scenario.theta_offset_db == 0.0
    assert rs.scenario.separation_km == 20.0
    assert rs.simulation.slots == 1_000_000
    assert len(rs.source_sha256) == 64


def test_bundled_reference_budget() -> None:
    """Ensures: budget SNRs are computed but explicit link values win over them."""
    rs = load_scenario("reference_system")
    assert rs.budget_snr_db["uplink"] == pytest.approx(28.25, abs=1e-9)
    assert rs.budget_snr_db["downlink"] == pytest.approx(21.3, abs=0.05)
    # Explicit values win over the budget.
    assert rs.scenario.cs_snr_ul_db == 28.3
    assert rs.scenario.switch_thresh_db == rs.scenario.outage_thresh_db


def test_resolve_path() -> None:
    """Ensures: bare names resolve in the scenario dir and paths stay as given."""
    assert resolve_path("default") == settings.SCENARIO_DIR / "default.json"
    assert resolve_path("x/y.json") == Path("x/y.json")
    assert resolve_path("y.json") == Path("y.json")


def test_sha256_is_of_the_bytes(tmp_path: Path) -> None:
    """Ensures: the digest is taken over the raw file bytes."""
    path = _write(tmp_path, BASE_DOC)
    assert load_scenario(path).source_sha256 == hashlib.sha256(path.read_bytes()).hexdigest()


def test_explicit_rho_wins(tmp_path: Path) -> None:
    """Ensures: an explicit rho overrides geometry and clears the separation."""
    doc = _doc(fade_ul={**BASE_DOC["fade_ul"], "rho": 0.3})
    sc = load_scenario(_write(tmp_path, doc)).scenario
    assert sc.fade_ul.rho == 0.3
    assert sc.separation_km is None


def test_budget_fills_missing_snr() -> None:
    """Ensures: a missing clear-sky SNR is filled from the budget."""
    doc = _doc(
        link={"cs_snr_dl_db": 21.3, "outage_thresh_db": 10.0},
        budget={"uplink": UPLINK_BUDGET},
    )
    rs = resolve(ScenarioFile.model_validate(doc))
    assert rs.scenario.cs_snr_ul_db == pytest.approx(28.25, abs=1e-9)


def test_missing_snr_without_budget() -> None:
    """Ensures: no SNR and no budget is a ConfigError."""
    doc = _doc(link={"cs_snr_dl_db": 21.3, "outage_thresh_db": 10.0})
    with pytest.raises(ConfigError, match="cs_snr_ul_db"):
        resolve(ScenarioFile.model_validate(doc))


@pytest.mark.parametrize(
    "doc",
    [
        _doc(extra_key=1),
        _doc(fade_ul={**BASE_DOC["fade_ul"], "s1": 0.0}),
        _doc(fade_ul={**BASE_DOC["fade_ul"], "rho": 1.5}),
        _doc(geometry={"separation_km": -1.0}),
        _doc(simulation={"slots": 10}),
        _doc(simulation={"slots": 5000, "burn_in": 5000}),
        _doc(fade_dl={"m": -1.0, "s": 0.9, "k": 2}),
    ],
)
def test_invalid_documents(tmp_path: Path, doc: dict[str, Any]) -> None:
    """Ensures: each malformed document is a ConfigError."""
    with pytest.raises(ConfigError):
        load_scenario(_write(tmp_path, doc))


def test_not_json(tmp_path: Path) -> None:
    """Ensures: unparsable files are a ConfigError."""
    path = tmp_path / "bad.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_scenario(path)


def test_missing_file(tmp_path: Path) -> None:
    """Ensures: a missing scenario file surfaces as OSError."""
    with pytest.raises(OSError):
        load_scenario(tmp_path / "absent.json")
