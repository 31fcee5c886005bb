"""Tests for distances, charts and polar coordinates on S^1 and S^m."""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from fss_toolkit.models.geometry import PolarPoint, Sample, SpherePoint, TangentVector
from fss_toolkit.sphere_geometry import (
    distances,
    exp_map,
    geodesic_distance,
    log_map,
    plane_rotation,
    polar_compose,
    polar_decompose,
    rotate_points,
    rotation_from_north,
    tangent_basis,
    theta_cot_theta,
)
from fss_toolkit.utils.errors import CutLocusError, FSSValidationError


class TestDistances:
    def test_circle_wraps(self):
        d = geodesic_distance(SpherePoint.on_circle(3.0), SpherePoint.on_circle(-3.0))
        assert d == pytest.approx(2 * math.pi - 6.0)

    def test_sphere_quarter(self):
        d = geodesic_distance(SpherePoint.north_pole(2), SpherePoint.from_vector([0.0, 1.0, 0.0]))
        assert d == pytest.approx(math.pi / 2)

    def test_antipode_is_pi(self):
        north = np.array([1.0, 0.0, 0.0])
        d = distances(2, north, np.array([[-1.0, 0.0, 0.0]]))
        assert d[0] == pytest.approx(math.pi)

    def test_small_angles_keep_precision(self):
        t = 1e-9
        pts = np.array([[math.cos(t), math.sin(t), 0.0]])
        assert distances(2, np.array([1.0, 0.0, 0.0]), pts)[0] == pytest.approx(t, rel=1e-6)

    def test_dimension_mismatch(self):
        with pytest.raises(FSSValidationError):
            geodesic_distance(SpherePoint.north_pole(2), SpherePoint.north_pole(3))

    @pytest.mark.parametrize("m", [1, 2, 3, 5])
    def test_symmetric_and_triangle(self, m):
        rng = np.random.default_rng(m)
        for _ in range(500):
            x, y, z = (_random_point(rng, m) for _ in range(3))
            dxy = geodesic_distance(x, y)
            assert dxy == geodesic_distance(y, x)
            assert 0.0 <= dxy <= math.pi
            assert geodesic_distance(x, z) <= dxy + geodesic_distance(y, z) + 1e-12

    def test_circle_antipode(self):
        d = geodesic_distance(SpherePoint.on_circle(-math.pi), SpherePoint.on_circle(0.0))
        assert d == math.pi


def _random_point(rng, m):
    if m == 1:
        return SpherePoint.on_circle(float(rng.uniform(-math.pi, math.pi)))
    v = rng.standard_normal(m + 1)
    return SpherePoint.from_vector(v / np.linalg.norm(v))


class TestCharts:
    def test_circle_log(self):
        v = log_map(SpherePoint.on_circle(3.0), SpherePoint.on_circle(-3.0))
        assert v.coords[0] == pytest.approx(2 * math.pi - 6.0)

    def test_sphere_log_exp_inverse(self):
        base = SpherePoint.from_vector([1.0, 2.0, -1.0, 0.5])
        x = SpherePoint.from_vector([0.2, -1.0, 0.3, 1.0])
        v = log_map(base, x)
        assert v.norm == pytest.approx(geodesic_distance(base, x))
        back = exp_map(base, v)
        assert np.allclose(back.vector, x.vector, atol=1e-12)

    def test_cut_locus_raises(self):
        with pytest.raises(CutLocusError):
            log_map(SpherePoint.north_pole(2), SpherePoint.from_vector([-1.0, 0.0, 0.0]))
        with pytest.raises(CutLocusError):
            log_map(SpherePoint.on_circle(0.0), SpherePoint.on_circle(math.pi))

    def test_exp_rejects_long_vectors(self):
        base = SpherePoint.north_pole(2)
        with pytest.raises(ValidationError):
            exp_map(base, TangentVector(dim=2, base=base, coords=(4.0, 0.0)))

    def test_tangent_basis_orthonormal(self):
        b = SpherePoint.from_vector([0.3, -0.4, 0.5, 0.7]).vector
        basis = tangent_basis(b)
        assert basis.shape == (4, 3)
        assert np.allclose(basis.T @ basis, np.eye(3), atol=1e-12)
        assert np.allclose(basis.T @ b, 0.0, atol=1e-12)


class TestPolar:
    def test_round_trip(self):
        x = SpherePoint.from_vector([0.1, 0.5, -0.7, 0.2])
        p = polar_decompose(x)
        assert p.theta == pytest.approx(geodesic_distance(SpherePoint.north_pole(3), x))
        assert np.allclose(polar_compose(p, 3).vector, x.vector, atol=1e-12)

    def test_pole_is_degenerate(self):
        p = polar_decompose(SpherePoint.north_pole(2))
        assert p.degenerate
        assert p.theta == 0.0
        assert p.direction == (1.0, 0.0)

    def test_circle(self):
        p = polar_decompose(SpherePoint.on_circle(-1.2))
        assert p.theta == pytest.approx(1.2)
        assert p.direction == (-1.0,)
        assert polar_compose(PolarPoint(theta=1.2, direction=(-1.0,)), 1).angle == pytest.approx(-1.2)


class TestRotations:
    def test_rotation_from_north(self):
        mu = SpherePoint.from_vector([0.2, 0.9, -0.3]).vector
        rot = rotation_from_north(mu)
        assert np.allclose(rot @ np.array([1.0, 0.0, 0.0]), mu)
        assert np.allclose(rot.T @ rot, np.eye(3))

    def test_rotation_preserves_distances(self):
        s = Sample(dim=2, points=[[1.0, 0.0, 0.0], [0.0, 0.6, 0.8]])
        r = rotate_points(s, plane_rotation(3, 0.9))
        before = distances(2, s.points[0], s.points[1:])[0]
        after = distances(2, r.points[0], r.points[1:])[0]
        assert after == pytest.approx(before)

    def test_circle_shift(self):
        s = rotate_points(Sample(dim=1, points=[3.0]), 0.5)
        assert s.points[0] == pytest.approx(3.5 - 2 * math.pi)


class TestThetaCotTheta:
    def test_series_branch(self):
        assert theta_cot_theta(1e-5) == pytest.approx(1.0 - 1e-10 / 3.0, abs=1e-15)
        assert theta_cot_theta(0.0) == 1.0

    def test_branches_agree(self):
        assert theta_cot_theta(0.99e-4) == pytest.approx(theta_cot_theta(1.01e-4), abs=1e-8)

    def test_values(self):
        assert abs(theta_cot_theta(math.pi / 2)) < 1e-15
        assert theta_cot_theta(math.pi) == -math.inf
