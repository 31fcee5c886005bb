"""Exact geometry of S^1 and S^m: distances, normal-coordinate charts, polar coordinates.

Circle points are angles, sphere points are ambient unit vectors. The
array-level helpers (``distances``, ``log_coords``, ``exp_ambient`` ...) are
what the estimators use in their inner loops; the ``SpherePoint`` level
operations wrap them with validation.
"""

from __future__ import annotations

import math

import numpy as np

from fss_toolkit.models.geometry import (
    PolarPoint,
    Sample,
    SpherePoint,
    TangentVector,
    wrap_angle,
)
from fss_toolkit.utils.errors import CutLocusError, FSSValidationError

__all__ = [
    "CUT_LOCUS_TOL",
    "distances",
    "exp_ambient",
    "exp_map",
    "geodesic_distance",
    "log_ambient",
    "log_coords",
    "log_map",
    "plane_rotation",
    "polar_compose",
    "polar_decompose",
    "rotate_points",
    "rotation_from_north",
    "tangent_basis",
    "theta_cot_theta",
    "wrap_angle",
]

# Distance to pi below which a point counts as antipodal
CUT_LOCUS_TOL = 1e-12

# Deterministic nudge for antipodal points inside batch optimizers
ANTIPODE_NUDGE = 1e-9

TWO_PI = 2.0 * math.pi


def _check_dims(x: SpherePoint, y: SpherePoint) -> None:
    if x.dim != y.dim:
        raise FSSValidationError(f"Dimension mismatch: S^{x.dim} vs S^{y.dim}")


# ---------------------------------------------------------------------------
# Array-level helpers
# ---------------------------------------------------------------------------


def distances(dim: int, base: np.ndarray | float, points: np.ndarray) -> np.ndarray:
    """Geodesic distances from ``base`` to every row of ``points``.

    On S^1 the distance is min(|x - b|, 2 pi - |x - b|). On S^m the angle is
    2 atan2(|x - b|, |x + b|), which equals arccos(x.b), keeps full precision
    near 0 and pi, and is exactly symmetric in its two arguments.
    """
    if dim == 1:
        gap = np.abs(np.asarray(points, dtype=float) - float(base)) % TWO_PI  # type: ignore[arg-type]
        return np.minimum(gap, TWO_PI - gap)
    b = np.asarray(base, dtype=float)
    pts = np.atleast_2d(points)
    return 2.0 * np.arctan2(np.linalg.norm(pts - b, axis=1), np.linalg.norm(pts + b, axis=1))


def tangent_basis(base: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the tangent space at ``base``, shape (m+1, m).

    Householder QR of [base | e_0 ... e_m] orthonormalizes the canonical axes
    against the base point, so the basis is a fixed function of the base.
    """
    b = np.asarray(base, dtype=float)
    q, _ = np.linalg.qr(np.column_stack([b, np.eye(b.size)]))
    return q[:, 1 : b.size]


def log_ambient(
    base: np.ndarray,
    points: np.ndarray,
    nudge_antipodes: bool = False,
) -> np.ndarray:
    """Log map of each row of ``points`` at ``base`` as ambient tangent vectors.

    Antipodal rows raise ``CutLocusError`` unless ``nudge_antipodes`` is set, in
    which case they are moved by ``ANTIPODE_NUDGE`` along the first tangent
    basis direction.
    """
    b = np.asarray(base, dtype=float)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    c = np.clip(pts @ b, -1.0, 1.0)
    perp = pts - c[:, None] * b[None, :]
    s = np.linalg.norm(perp, axis=1)
    d = np.arctan2(s, c)
    cut = d > math.pi - CUT_LOCUS_TOL
    if np.any(cut):
        if not nudge_antipodes:
            raise CutLocusError("Point on the cut locus of the chart base point")
        e = tangent_basis(b)[:, 0]
        pts = pts.copy()
        pts[cut] = math.cos(math.pi - ANTIPODE_NUDGE) * b + math.sin(math.pi - ANTIPODE_NUDGE) * e
        return log_ambient(b, pts, nudge_antipodes=False)
    scale = np.divide(d, s, out=np.zeros_like(d), where=s > 0.0)
    return perp * scale[:, None]


def log_coords(dim: int, base: np.ndarray | float, points: np.ndarray) -> np.ndarray:
    """Normal coordinates of ``points`` at ``base``, shape (n, m)."""
    if dim == 1:
        diff = wrap_angle(np.asarray(points, dtype=float) - float(base))  # type: ignore[arg-type]
        if np.any(np.abs(diff) > math.pi - CUT_LOCUS_TOL):
            raise CutLocusError("Point on the cut locus of the chart base point")
        return np.asarray(diff, dtype=float).reshape(-1, 1)
    b = np.asarray(base, dtype=float)
    return log_ambient(b, points) @ tangent_basis(b)


def exp_ambient(base: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Exponential map of an ambient tangent vector at ``base``."""
    b = np.asarray(base, dtype=float)
    t = float(np.linalg.norm(v))
    if t == 0.0:
        return b.copy()
    out = math.cos(t) * b + math.sin(t) * (np.asarray(v, dtype=float) / t)
    return out / np.linalg.norm(out)


def rotation_from_north(mu: np.ndarray) -> np.ndarray:
    """Orthogonal matrix R with R e_0 = mu (a Householder reflection)."""
    target = np.asarray(mu, dtype=float)
    e0 = np.zeros_like(target)
    e0[0] = 1.0
    u = e0 - target
    norm = float(np.linalg.norm(u))
    if norm < 1e-15:
        return np.eye(target.size)
    u /= norm
    return np.eye(target.size) - 2.0 * np.outer(u, u)


def plane_rotation(ambient_dim: int, angle: float) -> np.ndarray:
    """Rotation by ``angle`` in the (e_0, e_1) plane, taking e_0 towards e_1."""
    rot = np.eye(ambient_dim)
    c, s = math.cos(angle), math.sin(angle)
    rot[0, 0], rot[0, 1] = c, -s
    rot[1, 0], rot[1, 1] = s, c
    return rot


# ---------------------------------------------------------------------------
# Point-level operations
# ---------------------------------------------------------------------------


def geodesic_distance(x: SpherePoint, y: SpherePoint) -> float:
    """Intrinsic distance in [0, pi]."""
    _check_dims(x, y)
    if x.dim == 1:
        d = distances(1, x.angle, np.array([y.angle]))
    else:
        d = distances(x.dim, x.vector, y.vector[None, :])
    return float(d[0])


def log_map(base: SpherePoint, x: SpherePoint) -> TangentVector:
    """Normal coordinates of ``x`` in the chart centred at ``base``."""
    _check_dims(base, x)
    if x.dim == 1:
        coords = log_coords(1, base.angle, np.array([x.angle]))[0]
    else:
        coords = log_coords(x.dim, base.vector, x.vector[None, :])[0]
    return TangentVector(dim=x.dim, base=base, coords=tuple(float(c) for c in coords))


def exp_map(base: SpherePoint, v: TangentVector) -> SpherePoint:
    """Inverse of ``log_map``: follow the geodesic from ``base`` along ``v``."""
    if v.dim != base.dim:
        raise FSSValidationError(f"Dimension mismatch: S^{base.dim} vs tangent dim {v.dim}")
    if v.norm > math.pi:
        raise FSSValidationError(f"Tangent vector norm {v.norm} exceeds pi")
    if base.dim == 1:
        return SpherePoint.on_circle(base.angle + v.coords[0])
    ambient = tangent_basis(base.vector) @ v.array
    return SpherePoint.from_vector(exp_ambient(base.vector, ambient))


def polar_decompose(x: SpherePoint) -> PolarPoint:
    """Polar coordinates about the north pole (angle 0 on S^1)."""
    if x.dim == 1:
        a = x.angle
        if a == 0.0 or a == -math.pi:
            return PolarPoint(theta=abs(a), direction=(1.0,), degenerate=True)
        return PolarPoint(theta=abs(a), direction=(math.copysign(1.0, a),))
    v = x.vector
    tail = v[1:]
    s = float(np.linalg.norm(tail))
    theta = math.atan2(s, float(v[0]))
    if s < 1e-15:
        canonical = (1.0,) + (0.0,) * (x.dim - 1)
        return PolarPoint(theta=theta, direction=canonical, degenerate=True)
    q = tail / s
    return PolarPoint(theta=theta, direction=tuple(float(c) for c in q))


def polar_compose(p: PolarPoint, m: int) -> SpherePoint:
    """Point (cos theta, sin theta q) on S^m."""
    if len(p.direction) != m:
        raise FSSValidationError(f"Direction of length {len(p.direction)} does not fit S^{m}")
    if m == 1:
        return SpherePoint.on_circle(p.theta * p.direction[0])
    v = np.empty(m + 1)
    v[0] = math.cos(p.theta)
    v[1:] = math.sin(p.theta) * np.asarray(p.direction)
    return SpherePoint.from_vector(v)


def rotate_points(sample: Sample, rotation: np.ndarray | float) -> Sample:
    """Apply a rotation matrix (S^m) or an angle shift (S^1) to every point."""
    if sample.dim == 1:
        return Sample(dim=1, points=sample.points + float(rotation))  # type: ignore[arg-type]
    rot = np.asarray(rotation, dtype=float)
    pts = sample.points @ rot.T
    pts /= np.linalg.norm(pts, axis=1)[:, None]
    return Sample(dim=sample.dim, points=pts)


def theta_cot_theta(theta: float) -> float:
    """theta * cot(theta), the transverse Hessian factor of d^2/2 at distance theta.

    Uses the series 1 - theta^2/3 - theta^4/45 below 1e-4 and tends to
    -infinity at pi.
    """
    t = float(theta)
    if abs(t) < 1e-4:
        t2 = t * t
        return 1.0 - t2 / 3.0 - t2 * t2 / 45.0
    if t >= math.pi:
        return -math.inf
    return t * math.cos(t) / math.sin(t)
