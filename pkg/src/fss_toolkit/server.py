"""FSS Toolkit MCP server entry point.

Creates the FastMCP server and registers the modulation, analysis and
hypothesis test tools.
"""

from __future__ import annotations

import logging

from mcp.server.fastmcp import FastMCP

from fss_toolkit.config import ToolkitConfig
from fss_toolkit.utils.logging import setup_logging

logger = logging.getLogger("fss_toolkit.server")


def create_server(config: ToolkitConfig | None = None) -> FastMCP:
    """Create and configure the FSS Toolkit server."""
    if config is None:
        config = ToolkitConfig()

    setup_logging(config.log_level, debug=config.debug)
    logger.info(f"Initializing FSS Toolkit server (seed {config.seed}, {config.workers} workers)")

    mcp = FastMCP("FSS Toolkit")

    # ------------------------------------------------------------------
    # Register tool modules
    # ------------------------------------------------------------------

    from fss_toolkit.tools.analysis_tools import register_analysis_tools
    from fss_toolkit.tools.modulation_tools import register_modulation_tools
    from fss_toolkit.tools.test_tools import register_test_tools

    register_modulation_tools(mcp, config)
    register_analysis_tools(mcp, config)
    register_test_tools(mcp, config)

    logger.info("All tool modules registered")

    # ------------------------------------------------------------------
    # Prompts
    # ------------------------------------------------------------------

    @mcp.prompt(description="Suggested order of tools when checking a dataset for finite sample smeariness")
    def fss_workflow() -> str:
        """How to go from a distribution or dataset to an FSS verdict."""
        return (
            "# FSS Workflow\n\n"
            "1. support_geometry: a support inside an open half circle means no smeariness\n"
            "2. limit_modulation: analytic lim m_n when the law is known\n"
            "3. simulate_modulation: Monte Carlo curve over a log-spaced n grid\n"
            "4. classify_curve and fit_modulation_regimes on that curve\n"
            "5. estimate_bootstrap_modulation for observed data\n"
            "6. test_means with method 'bootstrap' whenever the modulation is well above 1\n"
        )

    return mcp


def main() -> None:
    """Entry point for fss-toolkit-mcp."""
    config = ToolkitConfig()
    mcp = create_server(config)

    logger.info("Starting FSS Toolkit server...")
    mcp.run()


if __name__ == "__main__":
    main()
