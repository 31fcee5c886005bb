"""Ingested observational data."""

from __future__ import annotations

import math
from enum import Enum

from pydantic import BaseModel, Field, field_validator

from fss_toolkit.models.geometry import Sample


class AngleUnit(str, Enum):
    """Unit of the raw angle column."""

    DEGREES = "degrees"
    RADIANS = "radians"

    @classmethod
    def parse(cls, flag: str) -> AngleUnit:
        aliases = {"deg": cls.DEGREES, "degrees": cls.DEGREES, "rad": cls.RADIANS, "radians": cls.RADIANS}
        try:
            return aliases[flag.strip().lower()]
        except KeyError:
            raise ValueError(f"Unknown angle unit '{flag}'. Use deg or rad") from None


class AngleDataset(BaseModel):
    """Directions in radians, wrapped into [-pi, pi)."""

    name: str
    angles: list[float]
    source_unit: AngleUnit
    skipped_calm: int = Field(0, ge=0, description="Rows dropped because they were flagged calm")

    @field_validator("angles")
    @classmethod
    def _wrapped(cls, v: list[float]) -> list[float]:
        for a in v:
            if not -math.pi <= a < math.pi:
                raise ValueError(f"Angle {a!r} is not wrapped into [-pi, pi)")
        return v

    @property
    def n(self) -> int:
        return len(self.angles)

    def to_sample(self) -> Sample:
        return Sample(dim=1, points=self.angles)
