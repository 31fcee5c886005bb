"""Result models of the asymptotic analysis and the FSS classification."""

from __future__ import annotations

import math
from enum import Enum
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, model_validator

# Infinite limits serialize as the JSON constant Infinity
_JSON_INF = ConfigDict(ser_json_inf_nan="constants")


class FSSLabel(str, Enum):
    """Finite sample smeariness classes."""

    EUCLIDEAN = "Euclidean"
    TYPE_I = "TypeI"
    TYPE_II = "TypeII"
    SMEARY = "Smeary"
    INCONCLUSIVE = "inconclusive"


class FSSClass(BaseModel):
    """Classification of a modulation curve."""

    model_config = _JSON_INF

    label: FSSLabel
    limit_modulation: float = Field(..., description="lim m_n (analytic or last-entry estimate)")
    sup_modulation: float = Field(..., description="sup m_n over the curve, or infinity")
    diagnostics: dict[str, Any] = Field(default_factory=dict, exclude=True)


class CLTResult(BaseModel):
    """Asymptotic covariance 4 H^-1 Sigma H^-1 of the normal-coordinate mean."""

    model_config = _JSON_INF

    hessian: list[list[float]]
    sigma: list[list[float]]
    asymptotic_cov: list[list[float]]
    variance: float = Field(..., gt=0.0, description="Population Fréchet variance V")
    limit_modulation: float = Field(..., description="trace(asymptotic_cov) / V")
    route: str = Field(..., description="'circle' or 'rotationally_symmetric'")

    @model_validator(mode="after")
    def _symmetric(self) -> CLTResult:
        for name in ("hessian", "sigma", "asymptotic_cov"):
            mat = getattr(self, name)
            size = len(mat)
            for i in range(size):
                if len(mat[i]) != size:
                    raise ValueError(f"{name} must be square")
                for j in range(i):
                    if not math.isclose(mat[i][j], mat[j][i], rel_tol=1e-9, abs_tol=1e-12):
                        raise ValueError(f"{name} must be symmetric")
        return self


class RegimeFit(BaseModel):
    """Power-law bounds C- n^a- <= m_n <= C+ n^a+ on [n-, n+] and m_n <= K from n0 on."""

    c_minus: float = Field(..., gt=0.0)
    c_plus: float = Field(..., gt=0.0)
    alpha_minus: float = Field(..., gt=0.0, lt=1.0)
    alpha_plus: float = Field(..., gt=0.0, lt=1.0)
    n_minus: int = Field(..., gt=1)
    n_plus: int
    n_zero: int
    k_bound: float = Field(..., gt=0.0)
    exponent: float = Field(..., description="Central log-log slope of the rising segment")
    exponent_se: float = Field(..., ge=0.0)
    residual: float = Field(..., ge=0.0, description="RMS log residual of the fit")
    verified: bool = Field(..., description="Bounds hold at every curve entry in [n-, n+]")

    @model_validator(mode="after")
    def _ordered(self) -> RegimeFit:
        if not self.n_minus < self.n_plus < self.n_zero:
            raise ValueError("Need 1 < n- < n+ < n0")
        if self.alpha_minus >= self.alpha_plus:
            raise ValueError("Need alpha- < alpha+")
        lhs = self.c_plus * self.n_minus**self.alpha_plus
        rhs = self.c_minus * self.n_plus**self.alpha_minus
        if lhs > rhs * (1.0 + 1e-12):
            raise ValueError("Regime constants violate C+ n-^a+ <= C- n+^a-")
        return self


class RingSearchResult(BaseModel):
    """A ring mixture whose limiting modulation exceeds the target."""

    m: int = Field(..., ge=2)
    target: float
    theta: float = Field(..., gt=0.0, lt=math.pi)
    alpha: float = Field(..., gt=0.0, lt=1.0)
    achieved_limit: float
    threshold: float = Field(..., description="Smallest theta with negative Hessian factor h")
    proof_regime: bool = Field(..., description="m >= 4, where the existence argument applies")


class SupportVerdict(BaseModel):
    """What the support of a circle law alone says about the modulation."""

    verdict: str = Field(..., description="'euclidean', 'fss' or 'undetermined'")
    reason: str
    arcs: list[tuple[float, float]] = Field(
        default_factory=list, description="Support arcs after merging across -pi ~ pi"
    )
