# src/robust_meas/config.py
import logging
import os
import sys
from functools import lru_cache

from dotenv import load_dotenv
from pydantic import BaseModel, Field

# Values set in a local .env take effect unless already exported.
load_dotenv()

SCHEMA_VERSION = "1.0"

ENV_PREFIX = "ROBUST_MEAS_"


class Settings(BaseModel):
    """Process-wide defaults; explicit function arguments always win."""

    search_budget: int = Field(default=200_000, ge=1)
    exact_vertex_limit: int = Field(default=256, ge=1)
    witness_vertex_limit: int = Field(default=2**20, ge=1)
    tolerance: float = Field(default=1e-9, gt=0)
    log_level: str = "WARNING"

    @classmethod
    def from_env(cls) -> "Settings":
        values = {}
        for name in cls.model_fields:
            raw = os.getenv(ENV_PREFIX + name.upper())
            if raw is not None:
                values[name] = raw
        return cls.model_validate(values)


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return Settings.from_env()


def configure_logging(level: str | None = None) -> None:
    """Send log records to stderr; stdout carries data (and the MCP stdio stream)."""
    level = (level or get_settings().log_level).upper()
    logging.basicConfig(
        stream=sys.stderr,
        level=getattr(logging, level, logging.WARNING),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
