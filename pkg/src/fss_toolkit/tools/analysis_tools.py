"""Analysis tools: limits, classification, regime fits and ring mixtures."""

from __future__ import annotations

import logging
from typing import Any

from fss_toolkit.config import ToolkitConfig
from fss_toolkit.fss_analysis import (
    classify_fss,
    clt_analysis,
    feasibility_threshold,
    fit_regimes,
    ring_mixture_search,
    support_verdict,
)
from fss_toolkit.models.common import OperationResult
from fss_toolkit.models.distribution import parse_spec
from fss_toolkit.models.estimation import ModulationCurve
from fss_toolkit.utils.errors import FSSToolkitError

logger = logging.getLogger("fss_toolkit.tools.analysis")


def register_analysis_tools(mcp: Any, config: ToolkitConfig) -> None:
    """Register the analysis tools with the MCP server."""
    logger.debug(f"Analysis tools use quadrature tolerance {config.quad_tol}")

    @mcp.tool()
    def limit_modulation(spec: dict[str, Any]) -> dict[str, Any]:
        """Asymptotic covariance 4 H^-1 Sigma H^-1 and lim m_n of a distribution.

        Works for circle laws and for rotationally symmetric sphere laws
        (vmf, ring_mixture, rot_sym).
        """
        try:
            result = clt_analysis(parse_spec(spec))
        except (FSSToolkitError, ValueError) as e:
            return OperationResult.from_error("limit_modulation", e).model_dump()
        return OperationResult.ok(
            operation="limit_modulation",
            message=f"Limiting modulation {result.limit_modulation:.6g}",
            data=result.model_dump(mode="json"),
        ).model_dump()

    @mcp.tool()
    def classify_curve(entries: list[dict[str, Any]], limit: float | None = None) -> dict[str, Any]:
        """Classify a modulation curve as Euclidean, TypeI, TypeII or Smeary.

        Args:
            entries: Curve rows {"n", "modulation", "se", "replicates"}
            limit: Analytic limit if known (may be infinite)
        """
        try:
            result = classify_fss(ModulationCurve(entries=entries), limit)
        except (FSSToolkitError, ValueError) as e:
            return OperationResult.from_error("classify_curve", e).model_dump()
        data = result.model_dump(mode="json")
        data["diagnostics"] = result.diagnostics
        return OperationResult.ok(
            operation="classify_curve", message=f"Label: {result.label.value}", data=data
        ).model_dump()

    @mcp.tool()
    def fit_modulation_regimes(entries: list[dict[str, Any]]) -> dict[str, Any]:
        """Fit C- n^a- <= m_n <= C+ n^a+ on the first rising regime and the tail bound K."""
        try:
            result = fit_regimes(ModulationCurve(entries=entries))
        except (FSSToolkitError, ValueError) as e:
            return OperationResult.from_error("fit_modulation_regimes", e).model_dump()
        return OperationResult.ok(
            operation="fit_modulation_regimes",
            message=f"Exponent {result.exponent:.4f} on [{result.n_minus}, {result.n_plus}]",
            data=result.model_dump(mode="json"),
        ).model_dump()

    @mcp.tool()
    def search_ring_mixture(m: int, target: float) -> dict[str, Any]:
        """Find a ring mixture on S^m whose limiting modulation exceeds ``target``."""
        try:
            result = ring_mixture_search(m, target)
        except (FSSToolkitError, ValueError) as e:
            return OperationResult.from_error("search_ring_mixture", e).model_dump()
        return OperationResult.ok(
            operation="search_ring_mixture",
            message=f"theta={result.theta:.6f}, alpha={result.alpha:.6f}, limit {result.achieved_limit:.4g}",
            data=result.model_dump(mode="json"),
        ).model_dump()

    @mcp.tool()
    def ring_threshold(m: int) -> dict[str, Any]:
        """Smallest ring angle on S^m at which the Hessian factor turns negative."""
        try:
            theta = feasibility_threshold(m)
        except FSSToolkitError as e:
            return OperationResult.from_error("ring_threshold", e).model_dump()
        return OperationResult.ok(
            operation="ring_threshold", message=f"theta = {theta:.10f}", data={"m": m, "theta": theta}
        ).model_dump()

    @mcp.tool()
    def support_geometry(spec: dict[str, Any]) -> dict[str, Any]:
        """What the support of a circle law alone implies for the modulation."""
        try:
            result = support_verdict(parse_spec(spec))
        except (FSSToolkitError, ValueError) as e:
            return OperationResult.from_error("support_geometry", e).model_dump()
        return OperationResult.ok(
            operation="support_geometry",
            message=f"{result.verdict}: {result.reason}",
            data=result.model_dump(mode="json"),
        ).model_dump()
