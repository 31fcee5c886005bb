"""Tests for MCP tool registration and the tool result envelopes."""

import pytest

from fss_toolkit import server
from fss_toolkit.config import ToolkitConfig
from fss_toolkit.tools.analysis_tools import register_analysis_tools
from fss_toolkit.tools.modulation_tools import register_modulation_tools
from fss_toolkit.tools.test_tools import register_test_tools

CONFIG = ToolkitConfig(seed=0, workers=1, log_level="WARNING", debug=False)

ANGLES = [0.05 * k - 0.5 for k in range(21)]


class FakeMCP:
    """Collects decorated tools and prompts instead of serving them."""

    def __init__(self, name="fake"):
        self.name = name
        self.tools = {}
        self.prompts = {}

    def tool(self):
        def register(fn):
            self.tools[fn.__name__] = fn
            return fn

        return register

    def prompt(self, description=None):
        def register(fn):
            self.prompts[fn.__name__] = fn
            return fn

        return register

    def run(self):
        pass


@pytest.fixture
def tools():
    mcp = FakeMCP()
    register_modulation_tools(mcp, CONFIG)
    register_analysis_tools(mcp, CONFIG)
    register_test_tools(mcp, CONFIG)
    return mcp.tools


class TestServer:
    def test_all_tools_registered(self, monkeypatch):
        monkeypatch.setattr(server, "FastMCP", FakeMCP)
        mcp = server.create_server(CONFIG)
        assert set(mcp.tools) == {
            "simulate_modulation",
            "estimate_bootstrap_modulation",
            "limit_modulation",
            "classify_curve",
            "fit_modulation_regimes",
            "search_ring_mixture",
            "ring_threshold",
            "support_geometry",
            "test_means",
            "simulate_rejection_curve",
            "compare_datasets",
        }
        assert "support_geometry" in mcp.prompts["fss_workflow"]()


class TestModulationTools:
    def test_simulate(self, tools):
        res = tools["simulate_modulation"]({"type": "von_mises", "kappa": 2.0}, "1,5", replicates=10, seed=1)
        assert res["success"]
        assert [e["n"] for e in res["data"]["entries"]] == [1, 5]

    def test_simulate_bad_grid(self, tools):
        res = tools["simulate_modulation"]({"type": "von_mises", "kappa": 2.0}, "0,5", replicates=10)
        assert not res["success"]
        assert res["operation"] == "simulate_modulation"

    def test_simulate_bad_mode(self, tools):
        res = tools["simulate_modulation"]({"type": "von_mises", "kappa": 2.0}, "5", mean_mode="median")
        assert not res["success"]

    def test_bootstrap_needs_enough_repetitions(self, tools):
        res = tools["estimate_bootstrap_modulation"](ANGLES, B=50)
        assert not res["success"]
        assert res["data"]["kind"] == "validation"


class TestAnalysisTools:
    def test_limit(self, tools):
        res = tools["limit_modulation"]({"type": "von_mises", "kappa": 0.5})
        assert res["success"]
        assert res["data"]["limit_modulation"] == pytest.approx(5.4167, abs=1e-3)

    def test_limit_unknown_type(self, tools):
        res = tools["limit_modulation"]({"type": "cardioid", "rho": 0.2})
        assert not res["success"]
        assert res["data"]["kind"] == "validation"

    def test_threshold(self, tools):
        assert tools["ring_threshold"](2)["data"]["theta"] == pytest.approx(2.028757838, abs=1e-8)
        assert not tools["ring_threshold"](1)["success"]

    def test_classify(self, tools):
        entries = [{"n": n, "modulation": 1.0, "se": 0.01, "replicates": 1000} for n in (10, 100, 1000)]
        res = tools["classify_curve"](entries)
        assert res["data"]["label"] == "Euclidean"
        assert res["data"]["diagnostics"]["elevated_n"] == []

    def test_fit_flat_curve(self, tools):
        entries = [{"n": 2**k, "modulation": 1.0, "se": 0.01, "replicates": 1000} for k in range(1, 12)]
        res = tools["fit_modulation_regimes"](entries)
        assert not res["success"]
        assert res["data"]["kind"] == "numerical"
        assert res["data"]["exception"] == "RegimeNotDetectedError"

    def test_support(self, tools):
        spec = {"type": "conditioned_von_mises", "kappa": 1.0, "support": [[-1.0, 1.0]]}
        res = tools["support_geometry"](spec)
        assert res["data"]["verdict"] == "euclidean"


class TestTestTools:
    def test_identical_samples(self, tools):
        res = tools["test_means"]("quantile", ANGLES, ANGLES)
        assert res["success"]
        assert res["data"]["p_value"] == 1.0

    def test_one_sample_needs_mu0(self, tools):
        res = tools["test_means"]("quantile", ANGLES)
        assert not res["success"]

    def test_one_sample(self, tools):
        res = tools["test_means"]("quantile", ANGLES, mu0=[0.0])
        assert res["data"]["n2"] == 0

    def test_unknown_method(self, tools):
        res = tools["test_means"]("median", ANGLES, ANGLES)
        assert not res["success"]
        assert res["data"]["kind"] == "validation"

    def test_compare_needs_two(self, tools):
        res = tools["compare_datasets"]({"only": ANGLES}, B=100)
        assert not res["success"]

    def test_rejection_curve_guard(self, tools):
        res = tools["simulate_rejection_curve"](
            {"type": "von_mises", "kappa": 2.0}, [0.0], 20, "quantile", replicates=10
        )
        assert not res["success"]
