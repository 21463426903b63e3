"""
Runtime settings for the estimation simulator.
Centralized knobs with environment variable support (prefix SIM_).
"""

from typing import Literal

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Process-wide settings loaded from environment variables or `.env`."""

    model_config = SettingsConfigDict(
        env_prefix="SIM_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Logging
    log_level: str = Field(default="INFO")
    log_format: Literal["console", "json"] = Field(default="console")

    # Execution
    n_jobs: int = Field(default=-1, description="joblib workers for Monte Carlo runs")
    chunk_steps: int = Field(default=4096, ge=1, description="rounds per block of random draws")

    # Experiment defaults
    default_seed: int = Field(default=20240601, ge=0)
    default_output_dir: str = Field(default="results")

    # Theory constants
    k_max_for_inf: int = Field(default=1_000_000, ge=1)
    g_grid_step: float = Field(default=0.01, gt=0.0, le=0.01)


# Global settings instance
settings = Settings()
