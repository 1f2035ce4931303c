"""Environment-backed settings."""
from __future__ import annotations

from pathlib import Path

import pytest

from src.config import load_settings


def test_defaults_point_at_bundled_scenarios(monkeypatch: pytest.MonkeyPatch) -> None:
    """Ensures: without overrides the bundled scenarios and a usable worker cap are found."""
    monkeypatch.delenv("GWDIV_SCENARIO_DIR", raising=False)
    monkeypatch.delenv("GWDIV_MAX_WORKERS", raising=False)
    s = load_settings()
    assert (s.SCENARIO_DIR / "default.json").is_file()
    assert s.MAX_WORKERS >= 1


def test_environment_overrides(monkeypatch: pytest.MonkeyPatch, tmp_path: Path) -> None:
    """Ensures: every documented variable reaches Settings."""
    monkeypatch.setenv("GWDIV_SCENARIO_DIR", str(tmp_path))
    monkeypatch.setenv("GWDIV_MAX_WORKERS", "3")
    monkeypatch.setenv("LOG_LEVEL", "debug")
    monkeypatch.setenv("LOG_JSON", "yes")
    s = load_settings()
    assert s.SCENARIO_DIR == tmp_path
    assert s.MAX_WORKERS == 3
    assert s.LOG_JSON is True


@pytest.mark.parametrize(
    ("key", "value", "match"),
    [
        ("LOG_LEVEL", "LOUD", "LOG_LEVEL"),
        ("GWDIV_MAX_WORKERS", "0", "GWDIV_MAX_WORKERS"),
        ("GWDIV_MAX_WORKERS", "four", "GWDIV_MAX_WORKERS must be an integer"),
        ("GWDIV_MAX_WORKERS", "2.5", "GWDIV_MAX_WORKERS must be an integer"),
    ],
)
def test_invalid_settings(
    monkeypatch: pytest.MonkeyPatch, key: str, value: str, match: str
) -> None:
    """Ensures: a bad variable is rejected with its name in the message."""
    monkeypatch.setenv(key, value)
    with pytest.raises(ValueError, match=match):
        load_settings()


def test_blank_worker_cap_uses_default(monkeypatch: pytest.MonkeyPatch) -> None:
    """Ensures: an empty GWDIV_MAX_WORKERS falls back to the CPU count."""
    monkeypatch.setenv("GWDIV_MAX_WORKERS", " ")
    assert load_settings().MAX_WORKERS >= 1
