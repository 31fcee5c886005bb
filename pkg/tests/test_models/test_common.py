"""Tests for Pydantic models."""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from fss_toolkit.models import (
    AngleDataset,
    AngleUnit,
    FSSClass,
    FSSLabel,
    ModulationCurve,
    ModulationEntry,
    OperationResult,
    RegimeFit,
    Sample,
    SpherePoint,
    TestMethod,
    TestReport,
)
from fss_toolkit.models.distribution import (
    ConditionedVonMises,
    MixingMeasure,
    RingMixture,
    VonMisesCircle,
    parse_spec,
)
from fss_toolkit.utils.errors import (
    ConvergenceError,
    DataFormatError,
    FSSValidationError,
    TargetUnreachableError,
)


class TestOperationResult:
    def test_ok(self):
        r = OperationResult.ok("test_op", message="done", data={"x": 1})
        assert r.success is True
        assert r.operation == "test_op"
        assert r.message == "done"
        assert r.data == {"x": 1}
        assert r.error is None
        assert r.timestamp > 0

    def test_fail(self):
        r = OperationResult.fail("test_op", error="boom")
        assert r.success is False
        assert r.error == "boom"

    def test_model_dump(self):
        r = OperationResult.ok("test")
        d = r.model_dump()
        assert isinstance(d, dict)
        assert d["success"] is True
        assert d["operation"] == "test"

    def test_from_convergence_error(self):
        err = ConvergenceError("stuck", diagnostics={"iterations": 7})
        r = OperationResult.from_error("mean", err)
        assert r.success is False
        assert r.error == "stuck"
        assert r.data["kind"] == "numerical"
        assert r.data["exception"] == "ConvergenceError"
        assert r.data["diagnostics"] == {"iterations": 7}

    def test_from_target_unreachable(self):
        r = OperationResult.from_error("search", TargetUnreachableError("no", best={"theta": 2.0}))
        assert r.data["best"] == {"theta": 2.0}

    def test_from_data_format_error(self):
        r = OperationResult.from_error("ingest", DataFormatError("bad cell", row=3))
        assert r.error == "row 3: bad cell"
        assert r.data["kind"] == "validation"
        assert r.data["row"] == 3

    def test_from_plain_value_error(self):
        r = OperationResult.from_error("op", ValueError("nope"))
        assert r.data == {"kind": "validation", "exception": "ValueError"}


class TestSpherePoint:
    def test_circle_wraps_pi(self):
        assert SpherePoint.on_circle(math.pi).angle == -math.pi
        assert SpherePoint.on_circle(3 * math.pi / 2).angle == pytest.approx(-math.pi / 2)

    def test_from_vector_normalizes(self):
        p = SpherePoint.from_vector([3.0, 0.0, 4.0])
        assert p.dim == 2
        assert p.coords == pytest.approx((0.6, 0.0, 0.8))

    def test_off_sphere_fails(self):
        with pytest.raises(ValidationError):
            SpherePoint(dim=2, coords=(1.0, 1.0, 0.0))

    def test_wrong_length_fails(self):
        with pytest.raises(ValidationError):
            SpherePoint(dim=3, coords=(1.0, 0.0, 0.0))

    def test_angle_only_on_circle(self):
        with pytest.raises(AttributeError):
            SpherePoint.north_pole(2).angle


class TestSample:
    def test_wraps_and_freezes(self):
        s = Sample(dim=1, points=[math.pi, 0.5])
        assert s.points[0] == -math.pi
        assert s.n == 2
        assert not s.points.flags.writeable

    def test_rejects_off_sphere_rows(self):
        with pytest.raises(ValidationError):
            Sample(dim=2, points=[[1.0, 0.0, 0.0], [0.5, 0.5, 0.0]])

    def test_take(self):
        s = Sample(dim=1, points=[0.1, 0.2, 0.3])
        assert list(s.take(np.array([2, 2, 0])).points) == pytest.approx([0.3, 0.3, 0.1])

    def test_from_points(self):
        s = Sample.from_points([SpherePoint.north_pole(3), SpherePoint.north_pole(3)])
        assert s.points.shape == (2, 4)


class TestSpecs:
    def test_parse_by_type(self):
        spec = parse_spec({"type": "von_mises", "mu": 0.0, "kappa": 0.5})
        assert isinstance(spec, VonMisesCircle)
        ring = parse_spec('{"type": "ring_mixture", "m": 4, "theta": 2.0, "alpha": 0.3}')
        assert isinstance(ring, RingMixture)
        assert ring.dim == 4

    def test_unknown_type(self):
        with pytest.raises(ValidationError):
            parse_spec({"type": "cauchy", "kappa": 1.0})

    def test_overlapping_arcs(self):
        with pytest.raises(ValidationError):
            ConditionedVonMises(kappa=1.0, support=((-1.0, 0.5), (0.0, 1.0)))

    def test_arcs_sorted(self):
        spec = ConditionedVonMises(kappa=1.0, support=((1.0, 2.0), (-2.0, -1.0)))
        assert spec.support == ((-2.0, -1.0), (1.0, 2.0))
        assert spec.support_length == pytest.approx(2.0)

    def test_mixing_mass(self):
        with pytest.raises(ValidationError):
            MixingMeasure(atoms=((0.0, 0.5), (1.0, 0.4)))
        mixing = MixingMeasure(atoms=((0.0, 0.5),), density=(0.5 / math.pi, 0.5 / math.pi))
        assert mixing.density_mass == pytest.approx(0.5)
        assert mixing.density_at(1.0) == pytest.approx(0.5 / math.pi)


class TestResultModels:
    def test_curve_must_increase(self):
        entries = [ModulationEntry(n=10, modulation=1.0, se=0.1, replicates=10)] * 2
        with pytest.raises(ValidationError):
            ModulationCurve(entries=entries)

    def test_smeary_serializes_infinity(self):
        c = FSSClass(
            label=FSSLabel.SMEARY,
            limit_modulation=math.inf,
            sup_modulation=math.inf,
            diagnostics={"x": 1},
        )
        text = c.model_dump_json()
        assert "Infinity" in text
        assert "diagnostics" not in c.model_dump()

    def test_regime_fit_order(self):
        with pytest.raises(ValidationError):
            RegimeFit(
                c_minus=1.0, c_plus=1.0, alpha_minus=0.4, alpha_plus=0.6,
                n_minus=100, n_plus=10, n_zero=1000, k_bound=5.0,
                exponent=0.5, exponent_se=0.01, residual=0.0, verified=True,
            )

    def test_regime_fit_compatibility(self):
        with pytest.raises(ValidationError):
            RegimeFit(
                c_minus=0.1, c_plus=10.0, alpha_minus=0.4, alpha_plus=0.6,
                n_minus=10, n_plus=20, n_zero=1000, k_bound=5.0,
                exponent=0.5, exponent_se=0.01, residual=0.0, verified=True,
            )

    def test_report_p_value_range(self):
        with pytest.raises(ValidationError):
            TestReport(method=TestMethod.QUANTILE, statistic=1.0, dof=1, p_value=1.5, n1=10)

    def test_angle_dataset(self):
        ds = AngleDataset(name="wind", angles=[-math.pi, 0.0], source_unit=AngleUnit.DEGREES)
        assert ds.n == 2
        assert ds.to_sample().dim == 1
        with pytest.raises(ValidationError):
            AngleDataset(name="bad", angles=[math.pi], source_unit=AngleUnit.RADIANS)

    def test_unit_aliases(self):
        assert AngleUnit.parse(" DEG ") is AngleUnit.DEGREES
        assert AngleUnit.parse("radians") is AngleUnit.RADIANS
        with pytest.raises(ValueError):
            AngleUnit.parse("grad")


def test_errors_share_base():
    assert issubclass(DataFormatError, FSSValidationError)
