"""
Process-level settings using pydantic-settings.

Experiment parameters live in the experiment config file (see src/vtsim/cli/config_file.py);
these settings only cover how the process runs: logging, default seed, parallelism.
"""

from functools import lru_cache

from pydantic import field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Settings loaded from environment variables and .env."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    log_level: str = "INFO"
    app_env: str = "local"  # local, ci, test, production

    # Used when neither --seed nor sim.seed is given
    default_seed: int = 7

    # Replications run in a process pool when > 1
    replication_workers: int = 1

    output_dir: str = "out"

    @field_validator("log_level", mode="before")
    @classmethod
    def normalize_level(cls, v: str) -> str:
        return v.strip().upper() if isinstance(v, str) and v.strip() else "INFO"

    @field_validator("replication_workers")
    @classmethod
    def at_least_one_worker(cls, v: int) -> int:
        return max(1, v)

    @property
    def is_production(self) -> bool:
        return self.app_env.lower() == "production"


@lru_cache
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()
