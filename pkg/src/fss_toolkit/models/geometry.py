"""Geometric value types: points, tangent vectors, polar coordinates, samples."""

from __future__ import annotations

import math
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

# Tolerances shared by the geometry validators
UNIT_NORM_TOL = 1e-12
TANGENT_NORM_TOL = 1e-12


def wrap_angle(a: Any) -> Any:
    """Wrap angles into [-pi, pi), mapping pi to -pi.

    Works on Python floats and numpy arrays alike.
    """
    if isinstance(a, np.ndarray):
        x = np.asarray(a, dtype=float)
        w = np.mod(x + math.pi, 2.0 * math.pi) - math.pi
        w = np.where(w >= math.pi, w - 2.0 * math.pi, w)
        # values already in range are returned unchanged
        return np.where((x >= -math.pi) & (x < math.pi), x, w)
    x = float(a)
    if -math.pi <= x < math.pi:
        return x
    w = math.fmod(x + math.pi, 2.0 * math.pi)
    if w < 0.0:
        w += 2.0 * math.pi
    w -= math.pi
    # fmod/add rounding can land exactly on pi
    if w >= math.pi:
        w -= 2.0 * math.pi
    return w


class SpherePoint(BaseModel):
    """A point on S^m.

    For m = 1 the single coordinate is an angle in [-pi, pi); for m >= 2 the
    coordinates are a unit vector of length m + 1 in the ambient space.
    """

    model_config = ConfigDict(frozen=True)

    dim: int = Field(..., ge=1, description="Sphere dimension m")
    coords: tuple[float, ...] = Field(
        ..., description="(angle,) on S^1, ambient unit vector of length m+1 otherwise"
    )

    @model_validator(mode="before")
    @classmethod
    def _wrap_circle(cls, data: Any) -> Any:
        if isinstance(data, dict) and data.get("dim") == 1:
            coords = data.get("coords")
            if coords is not None and len(coords) == 1:
                data = {**data, "coords": (wrap_angle(float(coords[0])),)}
        return data

    @model_validator(mode="after")
    def _check_shape(self) -> SpherePoint:
        if self.dim == 1:
            if len(self.coords) != 1:
                raise ValueError(f"S^1 points carry one angle, got {len(self.coords)} values")
            return self
        if len(self.coords) != self.dim + 1:
            raise ValueError(
                f"S^{self.dim} points need {self.dim + 1} coordinates, got {len(self.coords)}"
            )
        norm = math.sqrt(math.fsum(c * c for c in self.coords))
        if abs(norm - 1.0) > UNIT_NORM_TOL:
            raise ValueError(f"Point is not on the unit sphere (norm {norm!r})")
        return self

    # ------------------------------------------------------------------
    # Constructors
    # ------------------------------------------------------------------

    @classmethod
    def on_circle(cls, angle: float) -> SpherePoint:
        return cls(dim=1, coords=(float(angle),))

    @classmethod
    def from_vector(cls, vector: Any, normalize: bool = True) -> SpherePoint:
        """Build a point on S^m from an ambient vector of length m + 1."""
        v = np.asarray(vector, dtype=float).ravel()
        if v.size < 3:
            raise ValueError("Use on_circle() for S^1; ambient vectors need length >= 3")
        if normalize:
            norm = float(np.linalg.norm(v))
            if norm == 0.0:
                raise ValueError("Cannot normalize the zero vector")
            v = v / norm
        return cls(dim=v.size - 1, coords=tuple(float(c) for c in v))

    @classmethod
    def north_pole(cls, dim: int) -> SpherePoint:
        if dim == 1:
            return cls.on_circle(0.0)
        coords = [0.0] * (dim + 1)
        coords[0] = 1.0
        return cls(dim=dim, coords=tuple(coords))

    # ------------------------------------------------------------------
    # Views
    # ------------------------------------------------------------------

    @property
    def angle(self) -> float:
        if self.dim != 1:
            raise AttributeError("Only S^1 points have an angle")
        return self.coords[0]

    @property
    def vector(self) -> np.ndarray:
        """Ambient embedding; S^1 points embed as (cos a, sin a)."""
        if self.dim == 1:
            a = self.coords[0]
            return np.array([math.cos(a), math.sin(a)])
        return np.array(self.coords, dtype=float)


class TangentVector(BaseModel):
    """A tangent vector at ``base`` in normal coordinates of length m."""

    model_config = ConfigDict(frozen=True)

    dim: int = Field(..., ge=1)
    base: SpherePoint
    coords: tuple[float, ...]

    @model_validator(mode="after")
    def _check(self) -> TangentVector:
        if self.base.dim != self.dim:
            raise ValueError("Tangent vector and base point dimensions differ")
        if len(self.coords) != self.dim:
            raise ValueError(f"Expected {self.dim} tangent coordinates, got {len(self.coords)}")
        if self.norm > math.pi + TANGENT_NORM_TOL:
            raise ValueError(f"Tangent vector norm {self.norm} exceeds pi")
        return self

    @property
    def array(self) -> np.ndarray:
        return np.array(self.coords, dtype=float)

    @property
    def norm(self) -> float:
        return math.sqrt(math.fsum(c * c for c in self.coords))


class PolarPoint(BaseModel):
    """Polar coordinates (theta, q) about the north pole: p = (cos theta, sin theta q)."""

    model_config = ConfigDict(frozen=True)

    theta: float = Field(..., ge=0.0, le=math.pi, description="Polar angle in radians")
    direction: tuple[float, ...] = Field(..., description="Unit vector q on S^{m-1}")
    degenerate: bool = Field(
        False, description="True at the poles, where the direction is canonical (1, 0, ..., 0)"
    )

    @field_validator("direction")
    @classmethod
    def _unit_direction(cls, v: tuple[float, ...]) -> tuple[float, ...]:
        norm = math.sqrt(math.fsum(c * c for c in v))
        if not v or abs(norm - 1.0) > UNIT_NORM_TOL:
            raise ValueError(f"Direction must be a unit vector (norm {norm!r})")
        return v


class Sample(BaseModel):
    """An ordered sample X_1, ..., X_n on S^m.

    ``points`` has shape (n,) of angles on S^1 and (n, m + 1) of unit vectors
    otherwise. The array is read-only once validated.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    dim: int = Field(..., ge=1)
    points: np.ndarray

    @field_validator("points", mode="before")
    @classmethod
    def _as_array(cls, v: Any) -> np.ndarray:
        return np.array(v, dtype=float)

    @model_validator(mode="after")
    def _check(self) -> Sample:
        pts = self.points
        if self.dim == 1:
            if pts.ndim != 1:
                raise ValueError("S^1 samples are one-dimensional arrays of angles")
            if not np.all(np.isfinite(pts)):
                raise ValueError("Sample contains non-finite angles")
            pts[...] = wrap_angle(pts)
        else:
            if pts.ndim != 2 or pts.shape[1] != self.dim + 1:
                raise ValueError(f"S^{self.dim} samples need shape (n, {self.dim + 1})")
            norms = np.linalg.norm(pts, axis=1)
            if not np.all(np.abs(norms - 1.0) <= UNIT_NORM_TOL):
                raise ValueError("Sample contains points off the unit sphere")
        if pts.shape[0] < 1:
            raise ValueError("A sample needs at least one point")
        pts.setflags(write=False)
        return self

    @classmethod
    def from_points(cls, points: list[SpherePoint]) -> Sample:
        if not points:
            raise ValueError("A sample needs at least one point")
        dim = points[0].dim
        if any(p.dim != dim for p in points):
            raise ValueError("All sample points must share one dimension")
        if dim == 1:
            return cls(dim=1, points=[p.angle for p in points])
        return cls(dim=dim, points=[p.coords for p in points])

    @property
    def n(self) -> int:
        return int(self.points.shape[0])

    def __len__(self) -> int:
        return self.n

    def point(self, index: int) -> SpherePoint:
        if self.dim == 1:
            return SpherePoint.on_circle(float(self.points[index]))
        return SpherePoint(dim=self.dim, coords=tuple(float(c) for c in self.points[index]))

    def take(self, indices: np.ndarray) -> Sample:
        """Sub- or re-sample by index (used by the bootstrap)."""
        return Sample(dim=self.dim, points=self.points[indices])
