"""Sampling, densities and population moments of the built-in laws.

Every sampler is a pure function of ``(spec, n, stream)``. Circle laws are
centred wherever their ``mu`` says; sphere laws are built about the north
pole (von Mises-Fisher may be rotated to any ``mu``).
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import optimize, special

from fss_toolkit.models.distribution import (
    ConditionedVonMises,
    MixingMeasure,
    RingMixture,
    RotSym,
    TwoPointCircle,
    VonMisesCircle,
    VonMisesFisher,
    is_circle_spec,
)
from fss_toolkit.models.geometry import Sample, SpherePoint, wrap_angle
from fss_toolkit.quadrature import integrate_1d
from fss_toolkit.sphere_geometry import rotation_from_north
from fss_toolkit.streams import RandomStream
from fss_toolkit.utils.errors import FSSValidationError

logger = logging.getLogger("fss_toolkit.distributions")

MAX_REJECTIONS = 1_000_000
CIRCLE_SCAN_POINTS = 360


# ---------------------------------------------------------------------------
# Polar-angle laws of rotationally symmetric specs
# ---------------------------------------------------------------------------


class PolarAngleLaw(BaseModel):
    """Law of the polar angle theta = d(X, mu): atoms plus a continuous part.

    ``density`` is the (sub-probability) density of the continuous part on
    [0, pi]; ``breakpoints`` are kinks handed to the quadrature.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    atoms: tuple[tuple[float, float], ...] = ()
    density: Callable[[float], float] | None = None
    density_mass: float = Field(0.0, ge=0.0)
    density_at_pi: float = Field(0.0, ge=0.0)
    breakpoints: tuple[float, ...] = ()

    @classmethod
    def from_mixing(cls, mixing: MixingMeasure) -> PolarAngleLaw:
        if mixing.density is None:
            return cls(atoms=mixing.atoms)
        grid = mixing.grid
        return cls(
            atoms=mixing.atoms,
            density=mixing.density_at,
            density_mass=mixing.density_mass,
            density_at_pi=float(mixing.density[-1]),
            breakpoints=tuple(float(t) for t in grid[1:-1]),
        )

    def expect(self, g: Callable[[float], float]) -> float:
        """E[g(theta)] under this law."""
        total = math.fsum(w * g(t) for t, w in self.atoms if w > 0.0)
        if self.density is not None and self.density_mass > 0.0:
            dens = self.density
            total += integrate_1d(lambda t: g(t) * dens(t), 0.0, math.pi, points=self.breakpoints)
        return total


def _vmf_log_norm(m: int, kappa: float) -> float:
    """log C_m(kappa) of the vMF density on S^m w.r.t. surface measure."""
    p = m + 1
    if kappa == 0.0:
        return math.lgamma(p / 2.0) - math.log(2.0) - (p / 2.0) * math.log(math.pi)
    nu = p / 2.0 - 1.0
    return (
        nu * math.log(kappa)
        - (p / 2.0) * math.log(2.0 * math.pi)
        - math.log(float(special.ive(nu, kappa)))
        - kappa
    )


def polar_angle_law(spec: Any) -> PolarAngleLaw:
    """Law of d(X, mu) for the rotationally symmetric sphere specs."""
    if isinstance(spec, RingMixture):
        return PolarAngleLaw(atoms=((0.0, 1.0 - spec.alpha), (spec.theta, spec.alpha)))
    if isinstance(spec, RotSym):
        return PolarAngleLaw.from_mixing(spec.mixing)
    if isinstance(spec, VonMisesFisher):
        m, kappa = spec.m, spec.kappa
        # area of S^{m-1} times C_m(kappa), folded into one log constant
        log_c = (
            _vmf_log_norm(m, kappa)
            + math.log(2.0)
            + (m / 2.0) * math.log(math.pi)
            - math.lgamma(m / 2.0)
        )

        def dens(t: float) -> float:
            s = math.sin(t)
            if s <= 0.0:
                return 0.0
            return math.exp(log_c + kappa * math.cos(t) + (m - 1) * math.log(s))

        return PolarAngleLaw(density=dens, density_mass=1.0)
    raise FSSValidationError(f"{type(spec).__name__} has no polar-angle law about a pole")


# ---------------------------------------------------------------------------
# Densities
# ---------------------------------------------------------------------------


def _von_mises_pdf(x: Any, mu: float, kappa: float) -> Any:
    return np.exp(kappa * (np.cos(np.asarray(x) - mu) - 1.0)) / (
        2.0 * math.pi * float(special.i0e(kappa))
    )


def _in_support(spec: ConditionedVonMises, x: np.ndarray) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    inside = np.zeros(x.shape, dtype=bool)
    for a, b in spec.support:
        inside |= (x >= a) & (x <= b)
        if b >= math.pi:
            # pi and -pi are the same point
            inside |= x == -math.pi
    return inside


def support_mass(spec: ConditionedVonMises) -> float:
    """Probability of the support arcs under the unconditioned von Mises law."""
    return math.fsum(
        integrate_1d(lambda t: float(_von_mises_pdf(t, spec.mu, spec.kappa)), a, b)
        for a, b in spec.support
    )


def density(spec: Any, x: SpherePoint) -> float:
    """Density of a continuous spec at ``x`` (w.r.t. arc length / surface measure)."""
    if x.dim != spec.dim:
        raise FSSValidationError(f"Point on S^{x.dim} but spec lives on S^{spec.dim}")
    if isinstance(spec, VonMisesCircle):
        return float(_von_mises_pdf(x.angle, spec.mu, spec.kappa))
    if isinstance(spec, ConditionedVonMises):
        if not _in_support(spec, np.array([x.angle]))[0]:
            return 0.0
        mass = support_mass(spec)
        if mass <= 0.0:
            raise FSSValidationError("Support carries no probability mass")
        return float(_von_mises_pdf(x.angle, spec.mu, spec.kappa)) / mass
    if isinstance(spec, VonMisesFisher):
        dot = float(np.clip(spec.center.vector @ x.vector, -1.0, 1.0))
        return math.exp(_vmf_log_norm(spec.m, spec.kappa) + spec.kappa * dot)
    raise FSSValidationError(f"{type(spec).__name__} has no density")


def antipodal_density(spec: Any) -> float:
    """Density f at the antipode of the circle mean direction."""
    if not is_circle_spec(spec):
        raise FSSValidationError("antipodal_density is defined for circle specs only")
    if isinstance(spec, TwoPointCircle):
        center = circle_population_mean(spec)
        antipode = wrap_angle(center + math.pi)
        if min(abs(wrap_angle(spec.a - antipode)), abs(wrap_angle(spec.b - antipode))) < 1e-12:
            raise FSSValidationError("Atom at the antipode: no continuous density there")
        return 0.0
    return density(spec, SpherePoint.on_circle(spec.mu + math.pi))


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------


def _uniform_directions(rng: np.random.Generator, n: int, m: int) -> np.ndarray:
    """n points uniform on S^{m-1}, as rows of length m."""
    z = rng.standard_normal((n, m))
    norms = np.linalg.norm(z, axis=1)
    while np.any(norms == 0.0):
        bad = norms == 0.0
        z[bad] = rng.standard_normal((int(bad.sum()), m))
        norms = np.linalg.norm(z, axis=1)
    return z / norms[:, None]


def _polar_points(cos_theta: np.ndarray, directions: np.ndarray) -> np.ndarray:
    sin_theta = np.sqrt(np.clip(1.0 - cos_theta**2, 0.0, None))
    return np.column_stack([cos_theta, sin_theta[:, None] * directions])


def _wood_cosines(rng: np.random.Generator, n: int, m: int, kappa: float) -> np.ndarray:
    """cos(theta) of vMF draws on S^m by Wood's rejection scheme."""
    b = m / (math.sqrt(4.0 * kappa**2 + m**2) + 2.0 * kappa)
    x0 = (1.0 - b) / (1.0 + b)
    c = kappa * x0 + m * math.log(1.0 - x0**2)
    accepted: list[np.ndarray] = []
    count = 0
    while count < n:
        batch = max(n - count, 16)
        z = rng.beta(m / 2.0, m / 2.0, size=batch)
        w = (1.0 - (1.0 + b) * z) / (1.0 - (1.0 - b) * z)
        u = rng.random(batch)
        ok = kappa * w + m * np.log1p(-x0 * w) - c >= np.log(u)
        accepted.append(w[ok])
        count += int(ok.sum())
    return np.concatenate(accepted)[:n]


def _sample_conditioned(spec: ConditionedVonMises, n: int, rng: np.random.Generator) -> np.ndarray:
    kept: list[np.ndarray] = []
    count = 0
    rejections = 0
    while count < n:
        batch = max(2 * (n - count), 64)
        x = wrap_angle(rng.vonmises(spec.mu, spec.kappa, size=batch))
        ok = _in_support(spec, x)
        kept.append(x[ok])
        count += int(ok.sum())
        rejections += int((~ok).sum())
        if rejections > MAX_REJECTIONS and count < n:
            raise FSSValidationError(
                f"Support mass too small: {rejections} rejections for {count} of {n} draws"
            )
    return np.concatenate(kept)[:n]


def _inverse_tabulated_cdf(mixing: MixingMeasure, u: np.ndarray) -> np.ndarray:
    """Invert the CDF of the piecewise-linear density part (normalized) exactly."""
    grid = mixing.grid
    f = np.asarray(mixing.density, dtype=float)
    h = grid[1] - grid[0]
    seg_mass = 0.5 * h * (f[:-1] + f[1:])
    cum = np.concatenate([[0.0], np.cumsum(seg_mass)])
    target = u * cum[-1]
    idx = np.clip(np.searchsorted(cum, target, side="right") - 1, 0, len(seg_mass) - 1)
    rest = target - cum[idx]
    f0, f1 = f[idx], f[idx + 1]
    slope = (f1 - f0) / h
    # solve f0 s + slope s^2 / 2 = rest on [0, h]
    with np.errstate(divide="ignore", invalid="ignore"):
        disc = np.sqrt(np.clip(f0**2 + 2.0 * slope * rest, 0.0, None))
        quad_root = 2.0 * rest / (f0 + disc)
        lin_root = np.where(f0 > 0.0, rest / f0, 0.0)
    s = np.where(np.abs(slope) > 1e-300, quad_root, lin_root)
    s = np.nan_to_num(np.clip(s, 0.0, h))
    return np.asarray(grid[idx] + s)


def _sample_polar_angles(law_spec: RotSym, n: int, rng: np.random.Generator) -> np.ndarray:
    mixing = law_spec.mixing
    labels = [t for t, _ in mixing.atoms]
    weights = [w for _, w in mixing.atoms]
    if mixing.density is not None:
        weights.append(mixing.density_mass)
    probs = np.asarray(weights) / math.fsum(weights)
    comp = rng.choice(len(probs), size=n, p=probs)
    theta = np.empty(n)
    for j, t in enumerate(labels):
        theta[comp == j] = t
    if mixing.density is not None:
        cont = comp == len(labels)
        theta[cont] = _inverse_tabulated_cdf(mixing, rng.random(int(cont.sum())))
    return theta


def sample(spec: Any, n: int, stream: RandomStream) -> Sample:
    """Draw ``n`` i.i.d. points from ``spec`` using the substream ``stream``."""
    if n < 1:
        raise FSSValidationError(f"Sample size must be at least 1, got {n}")
    rng = stream.generator()

    if isinstance(spec, VonMisesCircle):
        return Sample(dim=1, points=wrap_angle(rng.vonmises(spec.mu, spec.kappa, size=n)))
    if isinstance(spec, ConditionedVonMises):
        return Sample(dim=1, points=_sample_conditioned(spec, n, rng))
    if isinstance(spec, TwoPointCircle):
        return Sample(dim=1, points=np.where(rng.random(n) < spec.w, spec.a, spec.b))

    m = spec.m
    if isinstance(spec, VonMisesFisher):
        cos_t = _wood_cosines(rng, n, m, spec.kappa)
        pts = _polar_points(cos_t, _uniform_directions(rng, n, m))
        if spec.mu is not None:
            pts = pts @ rotation_from_north(spec.center.vector).T
    elif isinstance(spec, RingMixture):
        on_ring = rng.random(n) < spec.alpha
        directions = _uniform_directions(rng, n, m)
        pts = np.zeros((n, m + 1))
        pts[:, 0] = 1.0
        pts[on_ring, 0] = math.cos(spec.theta)
        pts[on_ring, 1:] = math.sin(spec.theta) * directions[on_ring]
    elif isinstance(spec, RotSym):
        theta = _sample_polar_angles(spec, n, rng)
        directions = _uniform_directions(rng, n, m)
        pts = np.column_stack([np.cos(theta), np.sin(theta)[:, None] * directions])
    else:
        raise FSSValidationError(f"Unknown spec type {type(spec).__name__}")
    pts /= np.linalg.norm(pts, axis=1)[:, None]
    return Sample(dim=m, points=pts)


# ---------------------------------------------------------------------------
# Population Fréchet mean and variance
# ---------------------------------------------------------------------------


def circle_population_frechet(spec: Any, p: float) -> float:
    """F(p) = E[d(X, p)^2] for a circle spec."""
    if isinstance(spec, TwoPointCircle):
        da = wrap_angle(spec.a - p)
        db = wrap_angle(spec.b - p)
        return spec.w * da * da + (1.0 - spec.w) * db * db
    if isinstance(spec, VonMisesCircle):
        return integrate_1d(
            lambda t: t * t * float(_von_mises_pdf(t + p, spec.mu, spec.kappa)),
            -math.pi,
            math.pi,
        )
    if isinstance(spec, ConditionedVonMises):
        mass = support_mass(spec)
        if mass <= 0.0:
            raise FSSValidationError("Support carries no probability mass")
        antipode = wrap_angle(p + math.pi)
        total = 0.0
        for a, b in spec.support:
            total += integrate_1d(
                lambda x: wrap_angle(x - p) ** 2 * float(_von_mises_pdf(x, spec.mu, spec.kappa)),
                a,
                b,
                points=(antipode,),
            )
        return total / mass
    raise FSSValidationError(f"{type(spec).__name__} is not a circle spec")


def _two_point_mean(spec: TwoPointCircle) -> float:
    if spec.w in (0.0, 1.0) or spec.a == spec.b:
        raise FSSValidationError("Two-point law degenerates to a single point")
    # minimizers of w (a - p)^2 + (1 - w)(b' - p)^2 over the three lifts b' of b
    candidates = [wrap_angle(spec.w * spec.a + (1.0 - spec.w) * (spec.b + k * 2.0 * math.pi))
                  for k in (-1, 0, 1)]
    values = [circle_population_frechet(spec, c) for c in candidates]
    best = int(np.argmin(values))
    for j, (c, v) in enumerate(zip(candidates, values)):
        if j != best and abs(v - values[best]) < 1e-12 and abs(wrap_angle(c - candidates[best])) > 1e-9:
            raise FSSValidationError("Two-point law has a non-unique Fréchet mean")
    return candidates[best]


def circle_population_mean(spec: Any) -> float:
    """Population Fréchet mean of a circle spec, checked against a grid scan."""
    if isinstance(spec, TwoPointCircle):
        return _two_point_mean(spec)
    if spec.kappa == 0.0 and isinstance(spec, VonMisesCircle):
        raise FSSValidationError("Uniform law on the circle has no unique Fréchet mean")
    if isinstance(spec, VonMisesCircle):
        return spec.mu

    grid = -math.pi + 2.0 * math.pi * np.arange(CIRCLE_SCAN_POINTS) / CIRCLE_SCAN_POINTS
    values = np.array([circle_population_frechet(spec, float(p)) for p in grid])
    step = 2.0 * math.pi / CIRCLE_SCAN_POINTS
    best = int(np.argmin(values))
    res = optimize.minimize_scalar(
        lambda p: circle_population_frechet(spec, p),
        bounds=(float(grid[best]) - step, float(grid[best]) + step),
        method="bounded",
        options={"xatol": 1e-10},
    )
    found = wrap_angle(float(res.x))
    if abs(wrap_angle(found - spec.mu)) > 1e-6:
        raise FSSValidationError(
            f"Fréchet mean {found:.6f} is not the symmetry center {spec.mu:.6f}"
        )
    # any other valley of comparable depth means the minimizer is not unique
    is_min = (values <= np.roll(values, 1)) & (values <= np.roll(values, -1))
    for j in np.flatnonzero(is_min):
        far = abs(wrap_angle(float(grid[j]) - found)) > 3.0 * step
        if far and values[j] - float(res.fun) < 1e-9:
            raise FSSValidationError("Circle law has a non-unique Fréchet mean")
    logger.debug(f"Circle mean scan confirmed mu={spec.mu}")
    return spec.mu


def population_mean_and_variance(spec: Any) -> tuple[SpherePoint, float]:
    """Population Fréchet mean mu and variance V = E[d(X, mu)^2]."""
    if is_circle_spec(spec):
        mu = circle_population_mean(spec)
        return SpherePoint.on_circle(mu), circle_population_frechet(spec, mu)
    if isinstance(spec, VonMisesFisher) and spec.kappa == 0.0:
        raise FSSValidationError("Uniform law on the sphere has no unique Fréchet mean")
    law = polar_angle_law(spec)
    if isinstance(spec, RingMixture):
        variance = spec.alpha * spec.theta**2
    else:
        variance = law.expect(lambda t: t * t)
    if variance <= 0.0:
        raise FSSValidationError("Law is a point mass at its mean")
    return spec.center, variance


def reference_circle_specs() -> dict[str, Any]:
    """The three circle laws behind the reference modulation curves.

    The middle arc of the third support ends at pi - 0.2, keeping the arcs
    disjoint.
    """
    return {
        "von_mises": VonMisesCircle(mu=0.0, kappa=0.5),
        "conditioned": ConditionedVonMises(
            mu=0.0, kappa=0.5, support=((-math.pi + 0.2, math.pi - 0.2),)
        ),
        "conditioned_with_antipode": ConditionedVonMises(
            mu=0.0,
            kappa=0.5,
            support=(
                (-math.pi, -math.pi + 0.1),
                (-math.pi + 0.2, math.pi - 0.2),
                (math.pi - 0.1, math.pi),
            ),
        ),
    }
