"""Pydantic models for FSS Toolkit."""

from fss_toolkit.models.analysis import (
    CLTResult,
    FSSClass,
    FSSLabel,
    RegimeFit,
    RingSearchResult,
    SupportVerdict,
)
from fss_toolkit.models.common import OperationResult
from fss_toolkit.models.distribution import (
    ConditionedVonMises,
    DistributionSpec,
    MixingMeasure,
    RingMixture,
    RotSym,
    TwoPointCircle,
    VonMisesCircle,
    VonMisesFisher,
    is_circle_spec,
    parse_spec,
)
from fss_toolkit.models.dataset import AngleDataset, AngleUnit
from fss_toolkit.models.estimation import (
    BootstrapModulation,
    FrechetMeanOptions,
    FrechetMeanResult,
    MeanMode,
    ModulationCurve,
    ModulationEntry,
)
from fss_toolkit.models.geometry import (
    PolarPoint,
    Sample,
    SpherePoint,
    TangentVector,
    wrap_angle,
)
from fss_toolkit.models.reports import PairwiseRow, RejectionRow, TestMethod, TestReport

__all__ = [
    # Geometry
    "SpherePoint",
    "TangentVector",
    "PolarPoint",
    "Sample",
    "wrap_angle",
    # Distributions
    "VonMisesCircle",
    "ConditionedVonMises",
    "TwoPointCircle",
    "VonMisesFisher",
    "RingMixture",
    "RotSym",
    "MixingMeasure",
    "DistributionSpec",
    "parse_spec",
    "is_circle_spec",
    # Data
    "AngleUnit",
    "AngleDataset",
    # Estimation
    "MeanMode",
    "FrechetMeanOptions",
    "FrechetMeanResult",
    "ModulationEntry",
    "ModulationCurve",
    "BootstrapModulation",
    # Analysis
    "FSSLabel",
    "FSSClass",
    "CLTResult",
    "RegimeFit",
    "RingSearchResult",
    "SupportVerdict",
    # Tests
    "TestMethod",
    "TestReport",
    "RejectionRow",
    "PairwiseRow",
    # Common
    "OperationResult",
]
