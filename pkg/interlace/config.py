from __future__ import annotations

import os
from typing import Any, Mapping, Optional

from pydantic import BaseModel, Field

ENV_PREFIX = "INTERLACE_"
BFS_UNIVERSE_CEILING = 12


class Settings(BaseModel):
    """Budgets and runtime knobs shared by every service."""

    enumeration_cap: int = Field(
        default=200_000,
        gt=0,
        description="Maximum number of sets or points an enumeration may produce.",
    )
    search_element_bound: int = Field(
        default=256,
        gt=0,
        description="Largest element the spreading search may place in L.",
    )
    radius_search_limit: int = Field(
        default=10**15,
        gt=0,
        description="Largest radius tried when building a radii ladder.",
    )
    bfs_universe_limit: int = Field(
        default=12,
        ge=1,
        le=BFS_UNIVERSE_CEILING,
        description="Largest #(A ∪ B) accepted by the BFS oracle.",
    )
    jobs: int = Field(default=1, ge=1, le=256)
    log_level: str = Field(default="WARNING", pattern=r"^(DEBUG|INFO|WARNING|ERROR|CRITICAL)$")

    model_config = {
        "frozen": True,
        "json_schema_extra": {
            "example": {
                "enumeration_cap": 200000,
                "search_element_bound": 256,
                "radius_search_limit": 1000000000000000,
                "bfs_universe_limit": 12,
                "jobs": 4,
                "log_level": "INFO",
            }
        },
    }

    @classmethod
    def from_env(cls, environ: Optional[Mapping[str, str]] = None) -> Settings:
        environ = os.environ if environ is None else environ
        values: dict[str, Any] = {}
        for name in cls.model_fields:
            key = f"{ENV_PREFIX}{name.upper()}"
            if key in environ:
                values[name] = environ[key]
        return cls(**values)


_settings: Optional[Settings] = None


def get_settings() -> Settings:
    global _settings
    if _settings is None:
        _settings = Settings.from_env()
    return _settings


def configure_settings(**overrides: Any) -> Settings:
    """Replace the shared settings with a copy carrying the given overrides."""
    global _settings
    current = get_settings()
    updates = {key: value for key, value in overrides.items() if value is not None}
    _settings = Settings(**{**current.model_dump(), **updates})
    return _settings


def reset_settings() -> None:
    global _settings
    _settings = None
