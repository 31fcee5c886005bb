"""Models for Fréchet mean estimation and modulation curves."""

from __future__ import annotations

from enum import Enum

from pydantic import BaseModel, Field, model_validator

from fss_toolkit.models.geometry import SpherePoint


class MeanMode(str, Enum):
    """Which sample Fréchet mean to compute."""

    GLOBAL = "global"
    LOCAL = "local"


class FrechetMeanOptions(BaseModel):
    """Tuning knobs for ``frechet_mean``."""

    grid_seeds: int = Field(32, ge=0, description="Low-discrepancy seeds on S^m")
    max_iter: int = Field(1000, ge=1, description="Riemannian gradient steps")
    tolerance: float = Field(1e-10, gt=0.0, description="Gradient-norm stopping threshold")
    step: float = Field(0.5, gt=0.0, description="Initial step before Armijo backtracking")
    tie_tolerance: float = Field(1e-12, ge=0.0, description="F_n gap treated as a tie")
    anchor: SpherePoint | None = Field(
        None,
        description="Start the descent only here and return the local mean it reaches",
    )


class FrechetMeanResult(BaseModel):
    """A sample Fréchet mean and its certificate."""

    mean: SpherePoint
    value: float = Field(..., ge=0.0, description="F_n at the mean")
    candidates_evaluated: int = Field(..., ge=1)
    tie_flag: bool = False
    gradient_norm: float = Field(..., ge=0.0)
    iterations: int = Field(0, ge=0, description="Gradient steps taken (0 on S^1)")


class ModulationEntry(BaseModel):
    """One point n -> m_n of a modulation curve."""

    n: int = Field(..., ge=1)
    modulation: float = Field(..., ge=0.0)
    se: float = Field(..., ge=0.0)
    replicates: int = Field(..., ge=1)


class ModulationCurve(BaseModel):
    """The map n -> m_n with Monte Carlo standard errors."""

    entries: list[ModulationEntry] = Field(..., min_length=1)

    @model_validator(mode="after")
    def _increasing(self) -> ModulationCurve:
        ns = [e.n for e in self.entries]
        if any(b <= a for a, b in zip(ns, ns[1:])):
            raise ValueError("Modulation curve sample sizes must be strictly increasing")
        return self

    @property
    def ns(self) -> list[int]:
        return [e.n for e in self.entries]

    @property
    def values(self) -> list[float]:
        return [e.modulation for e in self.entries]


class BootstrapModulation(BaseModel):
    """Bootstrap estimate of m_n for one observed sample."""

    estimate: float = Field(..., ge=0.0)
    se: float = Field(..., ge=0.0)
    n: int = Field(..., ge=2)
    B: int = Field(..., ge=1)
    seed: int
