"""Application configuration using pydantic-settings."""

from functools import lru_cache

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    model_config = SettingsConfigDict(
        env_prefix="REPLIRATE_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Logging
    log_level: str = "INFO"

    # Interval Settings
    hdi_level: float = Field(default=0.95, gt=0.0, lt=1.0)
    separation_tolerance: float = Field(default=1e-3, gt=0.0, lt=0.5)

    # Posterior Grid Settings
    grid_mu: int = Field(default=200, ge=2)
    grid_rho: int = Field(default=200, ge=2)
    fisher_step: float = Field(default=1e-4, gt=0.0)

    # Quadrature Settings
    gh_nodes: int = Field(default=256, ge=8)
    gh_tolerance: float = Field(default=1e-6, gt=0.0)
    undefined_rho_tolerance: float = Field(default=1e-10, ge=0.0)

    # Monte Carlo Settings
    mc_draws: int = Field(default=300_000, ge=1)
    mc_seed: int = 20260101
    mc_chunk_size: int = Field(default=50_000, ge=1)
    workers: int = Field(default=1, ge=1)
    rho_ddof: int = Field(default=1, ge=0)
    clamp_warning_fraction: float = 0.001  # share of clamped rho draws that triggers a warning

    # Output Settings
    output_format: str = "csv"
    float_digits: int = 17

    # Application Info
    app_name: str = "replirate"


@lru_cache
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()
