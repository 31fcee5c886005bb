"""Distribution specifications on S^1 and S^m.

Specs are immutable pydantic models tagged by ``type`` so that they
round-trip through the JSON files the CLI reads::

    {"type": "von_mises", "mu": 0.0, "kappa": 0.5}
    {"type": "ring_mixture", "m": 4, "theta": 2.0, "alpha": 0.3}
"""

from __future__ import annotations

import math
from typing import Annotated, Any, Literal, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, field_validator, model_validator
from scipy.integrate import trapezoid

from fss_toolkit.models.geometry import SpherePoint, wrap_angle

MASS_TOL = 1e-10


class _Spec(BaseModel):
    model_config = ConfigDict(frozen=True)

    @property
    def dim(self) -> int:
        return 1


# ---------------------------------------------------------------------------
# Circle laws
# ---------------------------------------------------------------------------


class VonMisesCircle(_Spec):
    """von Mises law on S^1."""

    type: Literal["von_mises"] = "von_mises"
    mu: float = Field(0.0, description="Mean direction in radians")
    kappa: float = Field(..., ge=0.0, description="Concentration")

    @field_validator("mu")
    @classmethod
    def _wrap(cls, v: float) -> float:
        return wrap_angle(v)


class ConditionedVonMises(_Spec):
    """von Mises law conditioned on a union of disjoint closed arcs."""

    type: Literal["conditioned_von_mises"] = "conditioned_von_mises"
    mu: float = Field(0.0, description="Mean direction of the unconditioned law")
    kappa: float = Field(..., ge=0.0)
    support: tuple[tuple[float, float], ...] = Field(
        ..., min_length=1, description="Disjoint arcs [a, b] with -pi <= a < b <= pi"
    )

    @field_validator("mu")
    @classmethod
    def _wrap(cls, v: float) -> float:
        return wrap_angle(v)

    @field_validator("support")
    @classmethod
    def _disjoint(cls, v: tuple[tuple[float, float], ...]) -> tuple[tuple[float, float], ...]:
        arcs = sorted((float(a), float(b)) for a, b in v)
        for a, b in arcs:
            if not -math.pi <= a < b <= math.pi:
                raise ValueError(f"Arc [{a}, {b}] must satisfy -pi <= a < b <= pi")
        for (_, b0), (a1, _) in zip(arcs, arcs[1:]):
            if a1 <= b0:
                raise ValueError("Support arcs must be disjoint")
        return tuple(arcs)

    @property
    def support_length(self) -> float:
        return sum(b - a for a, b in self.support)


class TwoPointCircle(_Spec):
    """Mass ``w`` at angle ``a`` and ``1 - w`` at angle ``b``."""

    type: Literal["two_point"] = "two_point"
    a: float
    b: float
    w: float = Field(..., ge=0.0, le=1.0, description="Probability of a")

    @field_validator("a", "b")
    @classmethod
    def _wrap(cls, v: float) -> float:
        return wrap_angle(v)


# ---------------------------------------------------------------------------
# Sphere laws
# ---------------------------------------------------------------------------


class _SphereSpec(_Spec):
    m: int = Field(..., ge=2, description="Sphere dimension")

    @property
    def dim(self) -> int:
        return self.m

    @property
    def center(self) -> SpherePoint:
        return SpherePoint.north_pole(self.m)


class VonMisesFisher(_SphereSpec):
    """von Mises-Fisher law on S^m with mean direction ``mu`` (north pole by default)."""

    type: Literal["vmf"] = "vmf"
    kappa: float = Field(..., ge=0.0)
    mu: tuple[float, ...] | None = Field(None, description="Mean direction, length m + 1")

    @model_validator(mode="after")
    def _check_mu(self) -> VonMisesFisher:
        if self.mu is not None:
            if len(self.mu) != self.m + 1:
                raise ValueError(f"mu needs {self.m + 1} coordinates")
            norm = math.sqrt(math.fsum(c * c for c in self.mu))
            if abs(norm - 1.0) > 1e-9:
                raise ValueError(f"mu must be a unit vector (norm {norm!r})")
        return self

    @property
    def center(self) -> SpherePoint:
        if self.mu is None:
            return SpherePoint.north_pole(self.m)
        return SpherePoint.from_vector(self.mu)


class RingMixture(_SphereSpec):
    """Mass ``alpha`` uniform on the ring at polar angle ``theta``, the rest at the north pole."""

    type: Literal["ring_mixture"] = "ring_mixture"
    theta: float = Field(..., gt=0.0, lt=math.pi)
    alpha: float = Field(..., ge=0.0, le=1.0)


class MixingMeasure(BaseModel):
    """Law dP(theta) of the polar angle: atoms plus an optional tabulated density.

    ``density`` holds nonnegative values on a uniform grid over [0, pi] and is
    linearly interpolated in between.
    """

    model_config = ConfigDict(frozen=True)

    atoms: tuple[tuple[float, float], ...] = Field(
        (), description="(theta_j, weight_j) pairs with theta_j in [0, pi]"
    )
    density: tuple[float, ...] | None = Field(
        None, description="Density values on a uniform [0, pi] grid (at least 2 nodes)"
    )

    @model_validator(mode="after")
    def _check(self) -> MixingMeasure:
        for theta, weight in self.atoms:
            if not 0.0 <= theta <= math.pi:
                raise ValueError(f"Atom location {theta} outside [0, pi]")
            if weight < 0.0:
                raise ValueError("Atom weights must be nonnegative")
        if self.density is not None:
            if len(self.density) < 2:
                raise ValueError("A tabulated density needs at least two grid values")
            if any(v < 0.0 for v in self.density):
                raise ValueError("Density values must be nonnegative")
        total = self.atom_mass + self.density_mass
        if abs(total - 1.0) > MASS_TOL:
            raise ValueError(f"Mixing measure has total mass {total!r}, expected 1")
        return self

    @property
    def grid(self) -> np.ndarray:
        if self.density is None:
            return np.empty(0)
        return np.linspace(0.0, math.pi, len(self.density))

    @property
    def atom_mass(self) -> float:
        return math.fsum(w for _, w in self.atoms)

    @property
    def density_mass(self) -> float:
        if self.density is None:
            return 0.0
        return float(trapezoid(np.asarray(self.density), self.grid))

    def density_at(self, theta: float) -> float:
        if self.density is None:
            return 0.0
        return float(np.interp(theta, self.grid, np.asarray(self.density)))


class RotSym(_SphereSpec):
    """Rotationally symmetric law about the north pole, given by its polar-angle law."""

    type: Literal["rot_sym"] = "rot_sym"
    atoms: tuple[tuple[float, float], ...] = ()
    density: tuple[float, ...] | None = None

    @model_validator(mode="after")
    def _check_mixing(self) -> RotSym:
        MixingMeasure(atoms=self.atoms, density=self.density)
        return self

    @property
    def mixing(self) -> MixingMeasure:
        return MixingMeasure(atoms=self.atoms, density=self.density)


CircleSpec = Union[VonMisesCircle, ConditionedVonMises, TwoPointCircle]
SphereSpec = Union[VonMisesFisher, RingMixture, RotSym]

DistributionSpec = Annotated[
    Union[VonMisesCircle, ConditionedVonMises, TwoPointCircle, VonMisesFisher, RingMixture, RotSym],
    Field(discriminator="type"),
]

_SPEC_ADAPTER: TypeAdapter[Any] = TypeAdapter(DistributionSpec)


def parse_spec(data: Any) -> Any:
    """Validate a JSON object (or JSON text) into one of the spec models."""
    if isinstance(data, (str, bytes)):
        return _SPEC_ADAPTER.validate_json(data)
    return _SPEC_ADAPTER.validate_python(data)


def is_circle_spec(spec: Any) -> bool:
    return isinstance(spec, (VonMisesCircle, ConditionedVonMises, TwoPointCircle))
