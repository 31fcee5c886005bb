"""Tests for limits, Hessian integrals, classification and regime fitting."""

import math

import numpy as np
import pytest
from scipy import special

from fss_toolkit.distributions import population_mean_and_variance
from fss_toolkit.frechet import monte_carlo_modulation
from fss_toolkit.fss_analysis import (
    circle_limit_modulation,
    classify_fss,
    clt_analysis,
    feasibility_threshold,
    fit_regimes,
    ring_frechet_function,
    ring_hessian_coefficient,
    ring_mixture_search,
    rotsym_frechet_function,
    rotsym_hessian,
    support_verdict,
)
from fss_toolkit.models.analysis import FSSLabel
from fss_toolkit.models.distribution import (
    ConditionedVonMises,
    MixingMeasure,
    RingMixture,
    RotSym,
    TwoPointCircle,
    VonMisesCircle,
    VonMisesFisher,
)
from fss_toolkit.models.estimation import ModulationCurve, ModulationEntry
from fss_toolkit.models.geometry import SpherePoint
from fss_toolkit.utils.errors import (
    FSSValidationError,
    RegimeNotDetectedError,
    UnstableHessianError,
)


def _curve(ns, values, se=0.01):
    return ModulationCurve(
        entries=[
            ModulationEntry(n=int(n), modulation=float(v), se=se, replicates=1000)
            for n, v in zip(ns, values)
        ]
    )


class TestCircleLimit:
    def test_values(self):
        assert circle_limit_modulation(0.0) == 1.0
        assert circle_limit_modulation(1.0 / (4 * math.pi)) == pytest.approx(4.0)
        assert circle_limit_modulation(1.0 / (2 * math.pi)) == math.inf

    def test_out_of_range(self):
        with pytest.raises(FSSValidationError):
            circle_limit_modulation(0.2)
        with pytest.raises(FSSValidationError):
            circle_limit_modulation(-0.1)


class TestCLT:
    def test_von_mises(self):
        res = clt_analysis(VonMisesCircle(kappa=0.5))
        f_pi = math.exp(-0.5) / (2 * math.pi * special.i0(0.5))
        assert res.limit_modulation == pytest.approx(1.0 / (1.0 - 2 * math.pi * f_pi) ** 2, rel=1e-9)
        assert res.limit_modulation == pytest.approx(5.4167, abs=1e-3)
        assert res.route == "circle"
        assert res.hessian[0][0] == pytest.approx(2 * (1 - 2 * math.pi * f_pi))

    def test_conditioned_away_from_antipode(self):
        res = clt_analysis(ConditionedVonMises(kappa=0.5, support=((-math.pi + 0.2, math.pi - 0.2),)))
        assert res.limit_modulation == pytest.approx(1.0, rel=1e-9)

    def test_ring_mixture(self):
        spec = RingMixture(m=4, theta=2.5, alpha=0.1)
        g = 0.9 + 0.1 * ring_hessian_coefficient(4, 2.5)
        res = clt_analysis(spec)
        assert res.route == "rotationally_symmetric"
        assert len(res.asymptotic_cov) == 4
        assert res.limit_modulation == pytest.approx(1.0 / g**2, rel=1e-12)

    def test_vmf_concentrated_is_near_one(self):
        res = clt_analysis(VonMisesFisher(m=2, kappa=50.0))
        assert 1.0 < res.limit_modulation < 1.05

    @pytest.mark.parametrize("kappa", [0.5, 1.0, 4.0])
    def test_vmf_hessian_below_euclidean(self, kappa):
        res = clt_analysis(VonMisesFisher(m=2, kappa=kappa))
        assert res.hessian[0][0] < 2.0
        assert res.limit_modulation > 1.0

    def test_quarter_ring_limit(self):
        res = clt_analysis(RingMixture(m=2, theta=math.pi / 2, alpha=1.0))
        assert res.limit_modulation == pytest.approx(4.0, rel=1e-9)

    def test_unstable_ring(self):
        with pytest.raises(UnstableHessianError):
            clt_analysis(RingMixture(m=2, theta=3.0, alpha=0.9))

    def test_density_at_antipode(self):
        with pytest.raises(UnstableHessianError):
            clt_analysis(RotSym(m=3, density=(1.0 / math.pi, 1.0 / math.pi)))

    def test_atom_at_antipode(self):
        with pytest.raises(UnstableHessianError):
            rotsym_hessian(3, MixingMeasure(atoms=((0.0, 0.5), (math.pi, 0.5))))


class TestRingFunctions:
    def test_value_at_pole(self):
        assert ring_frechet_function(3, 2.5, 0.0) == pytest.approx(6.25, rel=1e-10)

    @pytest.mark.parametrize("m", [2, 3, 5])
    def test_curvature_at_pole(self, m):
        theta, psi = 2.5, 1e-3
        f0 = ring_frechet_function(m, theta, 0.0, tol=1e-13)
        f1 = ring_frechet_function(m, theta, psi, tol=1e-13)
        assert (f1 - f0) / psi**2 == pytest.approx(ring_hessian_coefficient(m, theta), rel=1e-3)

    def test_rotsym_frechet(self):
        mixing = MixingMeasure(atoms=((0.0, 0.5), (1.0, 0.5)))
        assert rotsym_frechet_function(3, mixing, 0.0) == pytest.approx(0.5)

    def test_hessian_coefficient(self):
        assert ring_hessian_coefficient(3, 0.0) == 1.0
        assert ring_hessian_coefficient(2, math.pi / 2) == pytest.approx(0.5)
        h = rotsym_hessian(2, MixingMeasure(atoms=((0.0, 1.0),)))
        assert np.allclose(h, 2 * np.eye(2))


class TestThreshold:
    def test_circle_case(self):
        assert feasibility_threshold(2) == pytest.approx(2.028757838, abs=1e-8)

    @pytest.mark.parametrize("m", [2, 3, 4, 10])
    def test_root(self, m):
        t = feasibility_threshold(m)
        assert math.pi / 2 < t < math.pi
        assert abs(ring_hessian_coefficient(m, t)) < 1e-9

    def test_decreasing_in_m(self):
        assert feasibility_threshold(10) < feasibility_threshold(3)

    def test_m_one(self):
        with pytest.raises(FSSValidationError):
            feasibility_threshold(1)


class TestRingSearch:
    def test_reaches_target(self):
        res = ring_mixture_search(4, 10.0)
        assert res.achieved_limit > 10.0
        assert 0.0 < res.alpha < 1.0
        assert res.proof_regime
        check = clt_analysis(RingMixture(m=4, theta=res.theta, alpha=res.alpha))
        assert check.limit_modulation == pytest.approx(res.achieved_limit)

    def test_reports_local_mean_at_the_pole(self):
        res = ring_mixture_search(4, 100.0)
        spec = RingMixture(m=4, theta=res.theta, alpha=res.alpha)
        mu, variance = population_mean_and_variance(spec)
        assert mu == SpherePoint.north_pole(4)
        assert variance == pytest.approx(res.alpha * res.theta**2)
        assert 1.0 - res.alpha + res.alpha * ring_hessian_coefficient(4, res.theta) > 0.0
        def mixture_f(psi):
            return (1.0 - res.alpha) * psi**2 + res.alpha * ring_frechet_function(4, res.theta, psi)

        assert mixture_f(0.01) > mixture_f(0.0)

    def test_low_dimension_flag(self):
        assert not ring_mixture_search(2, 3.0).proof_regime

    def test_bad_target(self):
        with pytest.raises(FSSValidationError):
            ring_mixture_search(4, 0.5)


class TestClassify:
    ns = [10, 100, 1000, 10000]

    def test_euclidean(self):
        assert classify_fss(_curve(self.ns, [1.0] * 4)).label is FSSLabel.EUCLIDEAN

    def test_type_one(self):
        assert classify_fss(_curve(self.ns, [1.5, 2.2, 2.8, 3.0], se=0.05)).label is FSSLabel.TYPE_I

    def test_type_two(self):
        res = classify_fss(_curve(self.ns, [1.0, 1.5, 1.2, 1.0], se=0.02))
        assert res.label is FSSLabel.TYPE_II
        assert res.sup_modulation == pytest.approx(1.5)
        assert res.diagnostics["elevated_n"] == [100, 1000]

    def test_smeary(self):
        res = classify_fss(_curve(self.ns, [2.0, 4.0, 8.0, 16.0]), limit=math.inf)
        assert res.label is FSSLabel.SMEARY
        assert res.sup_modulation == math.inf

    def test_analytic_limit_wins(self):
        assert classify_fss(_curve(self.ns, [1.0] * 4), limit=5.0).label is FSSLabel.TYPE_I

    def test_inconclusive(self):
        assert classify_fss(_curve(self.ns, [1.0, 0.8, 0.6, 0.5])).label is FSSLabel.INCONCLUSIVE


class TestFitRegimes:
    ns = [2**k for k in range(1, 18)]

    def test_square_root_regime(self):
        values = [math.sqrt(min(n, 1024)) for n in self.ns]
        fit = fit_regimes(_curve(self.ns, values))
        assert fit.exponent == pytest.approx(0.5, abs=0.02)
        assert fit.alpha_minus < 0.5 < fit.alpha_plus
        assert fit.n_minus == 2
        assert fit.n_plus == 1024
        assert fit.n_zero == 2048
        assert fit.k_bound == pytest.approx(1.05 * 32.0)
        assert fit.verified

    def test_flat_curve(self):
        with pytest.raises(RegimeNotDetectedError, match="no FSS regime detected"):
            fit_regimes(_curve(self.ns, [1.0] * len(self.ns)))

    def test_too_short(self):
        with pytest.raises(FSSValidationError):
            fit_regimes(_curve([10, 20, 40], [1.5, 2.0, 2.5]))


class TestSupportVerdict:
    def test_full_circle(self):
        assert support_verdict(VonMisesCircle(kappa=1.0)).verdict == "fss"

    def test_short_arc(self):
        res = support_verdict(ConditionedVonMises(kappa=1.0, support=((-1.0, 1.0),)))
        assert res.verdict == "euclidean"

    def test_closed_half_circle(self):
        res = support_verdict(ConditionedVonMises(kappa=1.0, support=((-math.pi / 2, math.pi / 2),)))
        assert res.verdict == "euclidean"
        assert "half circle" in res.reason

    def test_arc_through_cut(self):
        spec = ConditionedVonMises(kappa=1.0, support=((-math.pi, -math.pi + 0.5), (math.pi - 0.5, math.pi)))
        res = support_verdict(spec)
        assert res.verdict == "euclidean"
        assert len(res.arcs) == 1

    def test_antipodal_atoms(self):
        assert support_verdict(TwoPointCircle(a=0.0, b=math.pi, w=0.5)).verdict == "fss"
        assert support_verdict(TwoPointCircle(a=0.0, b=2.0, w=0.5)).verdict == "euclidean"

    def test_undetermined(self):
        arcs = ((-math.pi / 2 - 0.3, -math.pi / 2 + 0.3), (math.pi / 2 - 0.3, math.pi / 2 + 0.3))
        assert support_verdict(ConditionedVonMises(kappa=1.0, support=arcs)).verdict == "undetermined"

    def test_sphere_rejected(self):
        with pytest.raises(FSSValidationError):
            support_verdict(RingMixture(m=3, theta=1.0, alpha=0.5))


@pytest.mark.slow
class TestFitRegimesOnSimulation:
    def test_bounds_hold_pointwise(self):
        curve = monte_carlo_modulation(VonMisesCircle(kappa=0.2), [2**k for k in range(1, 12)], 1000, seed=3, workers=4)
        fit = fit_regimes(curve)
        assert fit.verified
        assert fit.c_minus * fit.n_minus**fit.alpha_minus > 1.0
        for e in curve.entries:
            if fit.n_minus <= e.n <= fit.n_plus:
                assert fit.c_minus * e.n**fit.alpha_minus <= e.modulation * (1 + 1e-12)
                assert e.modulation <= fit.c_plus * e.n**fit.alpha_plus * (1 + 1e-12)
