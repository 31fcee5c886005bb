"""Configuration for FSS Toolkit."""

from __future__ import annotations

import os

from pydantic import BaseModel, Field


def _env_flag(name: str, default: str = "") -> bool:
    return os.getenv(name, default).lower() in ("1", "true", "yes")


class ToolkitConfig(BaseModel):
    """Runtime configuration, loaded from environment variables."""

    seed: int = Field(
        default_factory=lambda: int(os.getenv("FSS_SEED", "0")),
        description="Master seed used when a command does not pass one",
    )
    workers: int = Field(
        default_factory=lambda: int(os.getenv("FSS_WORKERS", "1")),
        ge=1,
        description="Worker threads for replicate loops",
    )
    log_level: str = Field(
        default_factory=lambda: os.getenv("FSS_LOG_LEVEL", "WARNING"),
        description="Logging level",
    )
    debug: bool = Field(
        default_factory=lambda: _env_flag("FSS_DEBUG"),
        description="Enable debug logging",
    )
    quad_tol: float = Field(
        default_factory=lambda: float(os.getenv("FSS_QUAD_TOL", "1e-11")),
        gt=0.0,
        description="Absolute tolerance for adaptive quadrature",
    )
    grid_seeds: int = Field(
        default_factory=lambda: int(os.getenv("FSS_GRID_SEEDS", "32")),
        ge=0,
        description="Low-discrepancy starting points for the sphere optimizer",
    )
    max_iter: int = Field(
        default_factory=lambda: int(os.getenv("FSS_MAX_ITER", "1000")),
        ge=1,
        description="Maximum Riemannian gradient steps",
    )


def get_config() -> ToolkitConfig:
    """Read a fresh configuration from the environment."""
    return ToolkitConfig()
