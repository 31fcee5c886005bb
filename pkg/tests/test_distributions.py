"""Tests for sampling, densities and population moments."""

import math

import numpy as np
import pytest
from scipy import special

from fss_toolkit.distributions import (
    antipodal_density,
    circle_population_frechet,
    circle_population_mean,
    density,
    reference_circle_specs,
    polar_angle_law,
    population_mean_and_variance,
    sample,
)
from fss_toolkit.models.distribution import (
    ConditionedVonMises,
    RingMixture,
    RotSym,
    TwoPointCircle,
    VonMisesCircle,
    VonMisesFisher,
)
from fss_toolkit.models.geometry import SpherePoint
from fss_toolkit.quadrature import integrate_1d
from fss_toolkit.sphere_geometry import distances
from fss_toolkit.streams import RandomStream
from fss_toolkit.utils.errors import FSSValidationError


class TestStreams:
    def test_same_stream_same_draws(self):
        spec = VonMisesCircle(kappa=1.0)
        a = sample(spec, 50, RandomStream(seed=7).child(3, 1))
        b = sample(spec, 50, RandomStream(seed=7).child(3, 1))
        assert np.array_equal(a.points, b.points)

    def test_children_differ(self):
        spec = VonMisesCircle(kappa=1.0)
        a = sample(spec, 50, RandomStream(seed=7).child(3, 1))
        b = sample(spec, 50, RandomStream(seed=7).child(3, 2))
        assert not np.array_equal(a.points, b.points)

    def test_size_must_be_positive(self):
        with pytest.raises(FSSValidationError):
            sample(VonMisesCircle(kappa=1.0), 0, RandomStream(seed=0))


class TestCircleSampling:
    def test_von_mises_wrapped(self):
        s = sample(VonMisesCircle(mu=3.0, kappa=0.5), 500, RandomStream(seed=1))
        assert s.points.shape == (500,)
        assert np.all(s.points >= -math.pi)
        assert np.all(s.points < math.pi)

    def test_conditioned_stays_in_support(self):
        spec = ConditionedVonMises(kappa=0.5, support=((-2.0, -1.0), (0.5, 1.5)))
        s = sample(spec, 400, RandomStream(seed=2))
        inside = ((s.points >= -2.0) & (s.points <= -1.0)) | ((s.points >= 0.5) & (s.points <= 1.5))
        assert inside.all()

    def test_two_point_atoms(self):
        s = sample(TwoPointCircle(a=0.0, b=1.0, w=0.3), 1000, RandomStream(seed=3))
        at_a = np.isclose(s.points, 0.0, atol=1e-12)
        at_b = np.isclose(s.points, 1.0, atol=1e-12)
        assert np.all(at_a | at_b)
        assert 0.2 < at_a.mean() < 0.4


class TestSphereSampling:
    def test_vmf_concentrates_at_mean(self):
        mu = SpherePoint.from_vector([0.0, 0.6, 0.8])
        spec = VonMisesFisher(m=2, kappa=50.0, mu=mu.coords)
        s = sample(spec, 2000, RandomStream(seed=4))
        ambient = s.points.mean(axis=0)
        ambient /= np.linalg.norm(ambient)
        assert distances(2, mu.vector, ambient[None, :])[0] < 0.05

    def test_ring_polar_angles(self):
        spec = RingMixture(m=3, theta=2.0, alpha=0.4)
        s = sample(spec, 600, RandomStream(seed=5))
        d = distances(3, spec.center.vector, s.points)
        on_ring = np.abs(d - 2.0) < 1e-9
        at_pole = d < 1e-9
        assert np.all(on_ring | at_pole)
        assert 0.3 < on_ring.mean() < 0.5

    def test_rot_sym_tabulated(self):
        spec = RotSym(m=3, atoms=((0.0, 0.5),), density=(0.0, 1.0 / math.pi, 0.0))
        s = sample(spec, 500, RandomStream(seed=6))
        d = distances(3, spec.center.vector, s.points)
        assert np.all(d <= math.pi)
        assert 0.4 < np.mean(d < 1e-9) < 0.6


class TestDensities:
    def test_von_mises_normalized(self):
        spec = VonMisesCircle(mu=0.4, kappa=2.0)
        total = integrate_1d(lambda t: density(spec, SpherePoint.on_circle(t)), -math.pi, math.pi)
        assert total == pytest.approx(1.0, abs=1e-9)

    def test_conditioned_normalized(self):
        spec = ConditionedVonMises(kappa=1.0, support=((-1.0, 0.5), (2.0, 3.0)))
        total = sum(
            integrate_1d(lambda t: density(spec, SpherePoint.on_circle(t)), a, b)
            for a, b in spec.support
        )
        assert total == pytest.approx(1.0, abs=1e-9)
        assert density(spec, SpherePoint.on_circle(1.0)) == 0.0

    def test_vmf_polar_law_normalized(self):
        law = polar_angle_law(VonMisesFisher(m=3, kappa=4.0))
        assert law.expect(lambda t: 1.0) == pytest.approx(1.0, abs=1e-9)

    def test_antipodal_density(self):
        spec = VonMisesCircle(kappa=0.5)
        expected = math.exp(-0.5) / (2 * math.pi * special.i0(0.5))
        assert antipodal_density(spec) == pytest.approx(expected, rel=1e-12)

    def test_antipodal_density_conditioned_is_zero(self):
        assert antipodal_density(reference_circle_specs()["conditioned"]) == 0.0


class TestPopulationMoments:
    def test_ring_variance(self):
        mu, v = population_mean_and_variance(RingMixture(m=4, theta=2.0, alpha=0.25))
        assert v == pytest.approx(0.25 * 4.0)
        assert mu.coords[0] == 1.0

    def test_two_point(self):
        spec = TwoPointCircle(a=0.0, b=1.0, w=0.25)
        assert circle_population_mean(spec) == pytest.approx(0.75)
        assert circle_population_frechet(spec, 0.75) == pytest.approx(0.25 * 0.75**2 + 0.75 * 0.25**2)

    def test_antipodal_two_point_not_unique(self):
        with pytest.raises(FSSValidationError):
            circle_population_mean(TwoPointCircle(a=0.0, b=math.pi, w=0.5))

    def test_uniform_has_no_mean(self):
        with pytest.raises(FSSValidationError):
            population_mean_and_variance(VonMisesCircle(kappa=0.0))
        with pytest.raises(FSSValidationError):
            population_mean_and_variance(VonMisesFisher(m=2, kappa=0.0))

    def test_von_mises_variance(self):
        spec = VonMisesCircle(mu=1.0, kappa=2.0)
        mu, v = population_mean_and_variance(spec)
        assert mu.angle == pytest.approx(1.0)
        expected = integrate_1d(
            lambda t: t * t * density(spec, SpherePoint.on_circle(1.0 + t)), -math.pi, math.pi
        )
        assert v == pytest.approx(expected, rel=1e-9)

    def test_conditioned_mean_is_center(self):
        mu, v = population_mean_and_variance(reference_circle_specs()["conditioned"])
        assert mu.angle == pytest.approx(0.0, abs=1e-12)
        assert v > 0.0

    def test_reference_circle_specs(self):
        specs = reference_circle_specs()
        assert set(specs) == {"von_mises", "conditioned", "conditioned_with_antipode"}
        assert len(specs["conditioned_with_antipode"].support) == 3
