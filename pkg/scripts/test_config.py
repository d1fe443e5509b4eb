"""
Tests for environment-driven settings.
"""

import pytest

from src.config import ENV_KEYS, get_settings
from src.errors import ConfigError


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for key in ENV_KEYS.values():
        monkeypatch.delenv(key, raising=False)


def test_defaults():
    settings = get_settings()
    assert settings.threads == 1
    assert settings.dense_limit == 4000
    assert settings.walk_step_cap == 10_000
    assert settings.log_level == "WARNING"


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("DENSITOMETER_THREADS", "4")
    monkeypatch.setenv("DENSITOMETER_LOG_LEVEL", "debug")
    settings = get_settings()
    assert settings.threads == 4
    assert settings.log_level == "DEBUG"


def test_explicit_overrides_win(monkeypatch):
    monkeypatch.setenv("DENSITOMETER_DENSE_LIMIT", "100")
    assert get_settings(dense_limit=50).dense_limit == 50
    assert get_settings(dense_limit=None).dense_limit == 100


def test_blank_values_are_ignored(monkeypatch):
    monkeypatch.setenv("DENSITOMETER_THREADS", "  ")
    assert get_settings().threads == 1


@pytest.mark.parametrize("value", ["many", "0"])
def test_bad_thread_count(monkeypatch, value):
    monkeypatch.setenv("DENSITOMETER_THREADS", value)
    with pytest.raises(ConfigError, match="DENSITOMETER_THREADS"):
        get_settings()
