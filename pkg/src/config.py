"""
Runtime settings loaded from the environment (and an optional .env file).
"""

import os
from typing import Any, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError

from src.errors import ConfigError

load_dotenv()

ENV_KEYS = {
    "threads": "DENSITOMETER_THREADS",
    "dense_limit": "DENSITOMETER_DENSE_LIMIT",
    "exact_start_limit": "DENSITOMETER_EXACT_START_LIMIT",
    "sampled_starts": "DENSITOMETER_SAMPLED_STARTS",
    "closure_cap": "DENSITOMETER_CLOSURE_CAP",
    "walk_step_cap": "DENSITOMETER_WALK_STEP_CAP",
    "log_level": "DENSITOMETER_LOG_LEVEL",
}


class Settings(BaseModel):
    """Validated knobs shared by the library and the CLI."""

    threads: int = Field(default=1, ge=1)
    dense_limit: int = Field(default=4000, ge=1)
    exact_start_limit: int = Field(default=5000, ge=1)
    sampled_starts: int = Field(default=32, ge=1)
    closure_cap: int = Field(default=2_000_000, ge=1)
    walk_step_cap: int = Field(default=10_000, ge=1)
    log_level: str = "WARNING"


def _read_env() -> dict:
    values = {}
    for field, key in ENV_KEYS.items():
        raw = os.getenv(key)
        if raw is None or raw.strip() == "":
            continue
        if field == "log_level":
            values[field] = raw.strip().upper()
            continue
        try:
            values[field] = int(raw)
        except ValueError:
            raise ConfigError(f"{key} must be an integer, got {raw!r}")
    return values


def get_settings(**overrides: Optional[Any]) -> Settings:
    """
    Build settings from the environment, then apply explicit overrides.

    Args:
        **overrides: Field values that win over the environment; None entries are ignored

    Returns:
        Validated Settings instance
    """
    values = _read_env()
    values.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return Settings(**values)
    except ValidationError as e:
        first = e.errors()[0]
        field = first["loc"][0] if first["loc"] else "settings"
        key = ENV_KEYS.get(field, field)
        raise ConfigError(f"{key}: {first['msg']}")


if __name__ == "__main__":
    print(get_settings().model_dump())
