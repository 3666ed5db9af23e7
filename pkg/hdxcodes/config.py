"""
Configuration Module

Manages run configuration using pydantic-settings.
Loads HDX_* environment variables (and an optional .env file) and provides
typed defaults for enumeration budgets, eigensolver limits and logging.
"""

import logging
from functools import lru_cache

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Library and CLI settings loaded from environment variables."""

    model_config = SettingsConfigDict(
        env_prefix="HDX_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Parallelism
    threads: int = Field(default=1, ge=1, le=256, description="Cap on internal parallelism")

    # Size budgets
    budget_group: int = Field(
        default=500_000,
        ge=1,
        description="Maximum number of group elements produced by the BFS closure",
    )
    budget_rank: int = Field(
        default=8_000,
        ge=1,
        description="Maximum |X(2)| for exact elimination of the global parity matrix",
    )
    budget_enum: int = Field(
        default=2_000_000,
        ge=1,
        description="Maximum number of local codewords enumerated by brute-force oracles",
    )
    budget_min_weight: int = Field(
        default=10_000_000,
        ge=1,
        description="Maximum q^dim for exact minimum-weight enumeration",
    )

    # Spectral analysis
    dense_eig_limit: int = Field(default=8_192, ge=2, description="Largest dense eigensolve")
    power_tol: float = Field(default=1e-10, gt=0.0, le=1e-3)
    power_max_iter: int = Field(default=100_000, ge=10)
    symmetry_tol: float = Field(default=1e-12, gt=0.0, le=1e-3)

    # Random walks
    walk_dense_limit: int = Field(
        default=20_000,
        ge=1,
        description="Largest edge count for exact identity residuals",
    )
    walk_sample_vectors: int = Field(default=10_000, ge=1)

    # Reports
    report_schema_version: str = Field(default="1.0")
    log_level: str = Field(default="INFO")

    @field_validator("log_level", mode="before")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Accept any standard logging level name, case-insensitively."""
        if isinstance(v, str) and isinstance(logging.getLevelName(v.upper()), int):
            return v.upper()
        raise ValueError(f"Unknown log level: {v!r}")


@lru_cache()
def get_settings() -> Settings:
    """
    Get cached settings instance.

    Returns:
        Settings: Settings loaded once per process
    """
    return Settings()


settings = get_settings()
