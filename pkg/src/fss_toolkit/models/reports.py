"""Reports of the mean-equality tests."""

from __future__ import annotations

from enum import Enum

from pydantic import BaseModel, Field


class TestMethod(str, Enum):
    """How the covariance of the mean is estimated."""

    __test__ = False

    QUANTILE = "quantile"
    BOOTSTRAP = "bootstrap"


class TestReport(BaseModel):
    """Outcome of a one- or two-sample test for Fréchet means."""

    __test__ = False

    method: TestMethod
    statistic: float = Field(..., ge=0.0)
    dof: int = Field(..., ge=1, description="Sphere dimension m")
    p_value: float = Field(..., ge=0.0, le=1.0)
    n1: int = Field(..., ge=1)
    n2: int = Field(0, ge=0, description="0 for one-sample tests")
    B: int = Field(0, ge=0, description="Bootstrap repetitions, 0 for quantile tests")
    seed: int | None = None


class RejectionRow(BaseModel):
    """One cell of a rejection curve."""

    offset: float
    method: TestMethod
    n: int = Field(..., ge=1)
    level: float = Field(..., gt=0.0, lt=1.0)
    rejections: int = Field(..., ge=0)
    replicates: int = Field(..., ge=1)
    rate: float = Field(..., ge=0.0, le=1.0)
    se: float = Field(..., ge=0.0)
    failures: int = Field(0, ge=0, description="Replicates dropped after a numerical failure")


class PairwiseRow(BaseModel):
    """Both tests applied to one pair of datasets."""

    first: str
    second: str
    quantile_p: float = Field(..., ge=0.0, le=1.0)
    bootstrap_p: float = Field(..., ge=0.0, le=1.0)
    quantile_statistic: float = Field(..., ge=0.0)
    bootstrap_statistic: float = Field(..., ge=0.0)
