"""Modulation tools: Monte Carlo curves and bootstrap estimates."""

from __future__ import annotations

import logging
from typing import Any

from fss_toolkit.config import ToolkitConfig
from fss_toolkit.dataio import parse_n_grid, sample_from_values
from fss_toolkit.frechet import bootstrap_modulation, monte_carlo_modulation
from fss_toolkit.models.common import OperationResult
from fss_toolkit.models.distribution import parse_spec
from fss_toolkit.models.estimation import MeanMode
from fss_toolkit.utils.errors import FSSToolkitError

logger = logging.getLogger("fss_toolkit.tools.modulation")


def register_modulation_tools(mcp: Any, config: ToolkitConfig) -> None:
    """Register the modulation tools with the MCP server."""

    @mcp.tool()
    def simulate_modulation(
        spec: dict[str, Any],
        n_grid: str,
        replicates: int = 1000,
        seed: int | None = None,
        mean_mode: str | None = None,
    ) -> dict[str, Any]:
        """Monte Carlo modulation curve m_n = n V_n / V of a distribution.

        WHEN TO USE: To see how far the sample mean's spread departs from the
        Euclidean rate for a known law.

        Args:
            spec: Distribution spec, e.g. {"type": "von_mises", "mu": 0, "kappa": 0.5}
            n_grid: Sample sizes as "10,100,1000" or "log:10:10000:7"
            replicates: Samples drawn per sample size
            seed: Master seed (defaults to FSS_SEED)
            mean_mode: "global" or "local" (defaults: global on S^1, local on S^m)

        Returns:
            Operation result whose data holds the curve entries.
        """
        try:
            grid = parse_n_grid(n_grid)
        except ValueError as e:
            return OperationResult.fail(operation="simulate_modulation", error=str(e)).model_dump()
        try:
            curve = monte_carlo_modulation(
                parse_spec(spec),
                grid,
                replicates,
                config.seed if seed is None else seed,
                workers=config.workers,
                mean_mode=MeanMode(mean_mode) if mean_mode else None,
            )
        except (FSSToolkitError, ValueError) as e:
            return OperationResult.from_error("simulate_modulation", e).model_dump()
        last = curve.entries[-1]
        return OperationResult.ok(
            operation="simulate_modulation",
            message=f"m_n at n={last.n}: {last.modulation:.4f} (se {last.se:.4f})",
            data=curve.model_dump(mode="json"),
        ).model_dump()

    @mcp.tool()
    def estimate_bootstrap_modulation(
        values: list[Any],
        m: int = 1,
        B: int = 1000,
        seed: int | None = None,
    ) -> dict[str, Any]:
        """Bootstrap estimate of the modulation for one observed sample.

        Args:
            values: Angles in radians (m = 1) or unit vectors [x0, ..., xm]
            m: Sphere dimension
            B: Bootstrap repetitions (at least 100)
            seed: Master seed (defaults to FSS_SEED)
        """
        try:
            sample = sample_from_values(values, m)
            result = bootstrap_modulation(
                sample, B, config.seed if seed is None else seed, workers=config.workers
            )
        except (FSSToolkitError, ValueError) as e:
            return OperationResult.from_error("estimate_bootstrap_modulation", e).model_dump()
        return OperationResult.ok(
            operation="estimate_bootstrap_modulation",
            message=f"Bootstrap modulation {result.estimate:.4f} (se {result.se:.4f})",
            data=result.model_dump(mode="json"),
        ).model_dump()
