"""Command-line interface for FSS Toolkit.

Every subcommand writes its result (CSV or JSON) to stdout or ``--out``;
logs and the one-line error diagnostic go to stderr. Exit codes: 0 success,
1 usage error, 2 data error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from fss_toolkit import __version__
from fss_toolkit.config import ToolkitConfig
from fss_toolkit.dataio import (
    ingest_angles,
    parse_n_grid,
    parse_offsets,
    read_curve,
    read_sample,
    read_spec,
    to_json,
    write_angles,
    write_curve,
    write_pairwise,
    write_rejections,
    write_text,
)
from fss_toolkit.frechet import bootstrap_modulation, monte_carlo_modulation
from fss_toolkit.fss_analysis import (
    classify_fss,
    clt_analysis,
    feasibility_threshold,
    fit_regimes,
    ring_mixture_search,
    support_verdict,
)
from fss_toolkit.models.estimation import MeanMode
from fss_toolkit.models.geometry import SpherePoint
from fss_toolkit.models.reports import TestMethod
from fss_toolkit.testing import (
    one_sample_quantile_test,
    pairwise_comparison,
    rejection_curve,
    two_sample_bootstrap_test,
    two_sample_quantile_test,
)
from fss_toolkit.utils.errors import FSSValidationError, NumericalError
from fss_toolkit.utils.logging import setup_logging

logger = logging.getLogger("fss_toolkit.cli")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERICAL = 3

PROG = "fss-toolkit"


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that reports usage errors with exit code 1."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _grid_arg(text: str) -> list[int]:
    try:
        return parse_n_grid(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _offsets_arg(text: str) -> list[float]:
    try:
        return parse_offsets(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _limit_arg(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: '{text}'") from None
    if math.isnan(value):
        raise argparse.ArgumentTypeError("limit must not be NaN")
    return value


def _point_arg(text: str) -> SpherePoint:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
        if len(values) == 1:
            return SpherePoint.on_circle(values[0])
        return SpherePoint.from_vector(values)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"invalid point '{text}': {e}") from None


# ---------------------------------------------------------------------------
# Handlers
# ---------------------------------------------------------------------------


def _emit_table(args: argparse.Namespace, csv_text: str, models: Any) -> None:
    write_text(to_json(models) if args.json else csv_text, args.out)


def _cmd_simulate(args: argparse.Namespace) -> None:
    spec = read_spec(args.dist)
    mode = MeanMode(args.mean_mode) if args.mean_mode else None
    curve = monte_carlo_modulation(
        spec, args.n_grid, args.replicates, args.seed, workers=args.workers, mean_mode=mode
    )
    _emit_table(args, write_curve(curve), curve)


def _cmd_bootstrap_modulation(args: argparse.Namespace) -> None:
    sample = read_sample(args.input, args.m, args.unit)
    result = bootstrap_modulation(sample, args.B, args.seed, workers=args.workers)
    write_text(to_json(result), args.out)


def _cmd_limit(args: argparse.Namespace) -> None:
    write_text(to_json(clt_analysis(read_spec(args.dist))), args.out)


def _cmd_classify(args: argparse.Namespace) -> None:
    write_text(to_json(classify_fss(read_curve(args.curve), args.limit)), args.out)


def _cmd_fit_regimes(args: argparse.Namespace) -> None:
    write_text(to_json(fit_regimes(read_curve(args.curve))), args.out)


def _cmd_test(args: argparse.Namespace) -> None:
    method = TestMethod(args.method)
    s1 = read_sample(args.sample1, args.m, args.unit)
    if args.sample2 is None:
        if args.mu0 is None:
            raise FSSValidationError("Give --sample2 for a two-sample test or --mu0 for a one-sample test")
        if method is not TestMethod.QUANTILE:
            raise FSSValidationError("The one-sample test is a quantile test")
        report = one_sample_quantile_test(s1, args.mu0)
    else:
        s2 = read_sample(args.sample2, args.m, args.unit)
        if method is TestMethod.QUANTILE:
            report = two_sample_quantile_test(s1, s2)
        else:
            report = two_sample_bootstrap_test(s1, s2, args.B, args.seed, workers=args.workers)
    write_text(to_json(report), args.out)


def _cmd_rejection_curve(args: argparse.Namespace) -> None:
    rows = rejection_curve(
        read_spec(args.dist),
        args.offsets,
        args.n,
        args.replicates,
        args.level,
        TestMethod(args.method),
        args.seed,
        B=args.B,
        workers=args.workers,
    )
    _emit_table(args, write_rejections(rows), rows)


def _cmd_ring_search(args: argparse.Namespace) -> None:
    write_text(to_json(ring_mixture_search(args.m, args.target)), args.out)


def _cmd_ingest_angles(args: argparse.Namespace) -> None:
    dataset = ingest_angles(args.input, args.unit)
    if args.json:
        write_text(to_json(dataset), args.out)
    else:
        write_text(write_angles(dataset), args.out)


def _cmd_support(args: argparse.Namespace) -> None:
    write_text(to_json(support_verdict(read_spec(args.dist))), args.out)


def _cmd_compare(args: argparse.Namespace) -> None:
    datasets = {}
    for path in args.inputs:
        name = _dataset_name(path)
        if name in datasets:
            raise FSSValidationError(f"Duplicate dataset name '{name}'")
        datasets[name] = read_sample(path, args.m, args.unit)
    rows = pairwise_comparison(datasets, args.B, args.seed, workers=args.workers)
    _emit_table(args, write_pairwise(rows), rows)


def _dataset_name(path: str) -> str:
    return Path(path).stem


def _cmd_threshold(args: argparse.Namespace) -> None:
    theta = feasibility_threshold(args.m)
    write_text(to_json({"m": args.m, "theta": theta}), args.out)


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None, help="Master seed (default: FSS_SEED)")
    p.add_argument("--out", default=None, help="Output file (default: stdout)")
    p.add_argument("--json", action="store_true", help="Emit JSON instead of CSV")
    p.add_argument("--workers", type=int, default=None, help="Worker threads (default: FSS_WORKERS)")
    p.add_argument("--log-level", default=None, help="Logging level (default: FSS_LOG_LEVEL)")


def _add_data(p: argparse.ArgumentParser) -> None:
    p.add_argument("--unit", default="rad", help="Angle unit of circle data: deg or rad")
    p.add_argument("--m", type=int, default=1, help="Sphere dimension of the data (1: angles)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog=PROG,
        description="Finite sample smeariness toolkit for Fréchet means on circles and spheres",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str, handler: Callable[[argparse.Namespace], None]) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text, formatter_class=argparse.ArgumentDefaultsHelpFormatter)
        _add_common(p)
        p.set_defaults(handler=handler)
        return p

    p = add("simulate-modulation", "Monte Carlo modulation curve of a distribution", _cmd_simulate)
    p.add_argument("--dist", required=True, help="Distribution spec JSON file")
    p.add_argument("--n-grid", required=True, type=_grid_arg, help="a,b,c or log:a:b:k")
    p.add_argument("--replicates", type=int, default=1000)
    p.add_argument("--mean-mode", choices=[m.value for m in MeanMode], default=None,
                   help="Sample mean to track (default: global on S^1, local on S^m)")

    p = add("bootstrap-modulation", "Bootstrap modulation estimate of one dataset", _cmd_bootstrap_modulation)
    p.add_argument("--input", required=True)
    p.add_argument("--B", type=int, default=1000)
    _add_data(p)

    p = add("limit", "Asymptotic covariance and limiting modulation", _cmd_limit)
    p.add_argument("--dist", required=True)

    p = add("classify", "Classify a modulation curve", _cmd_classify)
    p.add_argument("--curve", required=True)
    p.add_argument("--limit", type=_limit_arg, default=None, help="Analytic limit (inf allowed)")

    p = add("fit-regimes", "Fit the rising power-law regime of a modulation curve", _cmd_fit_regimes)
    p.add_argument("--curve", required=True)

    p = add("test", "Quantile or bootstrap test for equal Fréchet means", _cmd_test)
    p.add_argument("--method", choices=[m.value for m in TestMethod], required=True)
    p.add_argument("--sample1", required=True)
    p.add_argument("--sample2", default=None)
    p.add_argument("--mu0", type=_point_arg, default=None, help="Hypothesized mean (angle or x0,...,xm)")
    p.add_argument("--B", type=int, default=1000)
    _add_data(p)

    p = add("rejection-curve", "Rejection rates against rotated alternatives", _cmd_rejection_curve)
    p.add_argument("--dist", required=True)
    p.add_argument("--offsets", required=True, type=_offsets_arg, help="p1,p2,... or lin:a:b:k")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--replicates", type=int, default=1000)
    p.add_argument("--method", choices=[m.value for m in TestMethod], required=True)
    p.add_argument("--level", type=float, default=0.05)
    p.add_argument("--B", type=int, default=300)

    p = add("ring-search", "Ring mixture whose limiting modulation exceeds a target", _cmd_ring_search)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--target", type=float, required=True)

    p = add("ingest-angles", "Normalize raw directions to radians in [-pi, pi)", _cmd_ingest_angles)
    p.add_argument("--input", required=True)
    p.add_argument("--unit", required=True, help="deg or rad")

    p = add("support", "What the support of a circle law implies for the modulation", _cmd_support)
    p.add_argument("--dist", required=True)

    p = add("compare", "Pairwise quantile and bootstrap tests between datasets", _cmd_compare)
    p.add_argument("--inputs", nargs="+", required=True)
    p.add_argument("--B", type=int, default=1000)
    _add_data(p)

    p = add("threshold", "Smallest ring angle with a negative Hessian factor", _cmd_threshold)
    p.add_argument("--m", type=int, required=True)

    return parser


def _one_line(exc: BaseException) -> str:
    if isinstance(exc, ValidationError):
        first = exc.errors()[0]
        where = ".".join(str(p) for p in first.get("loc", ()))
        detail = f"{where}: {first['msg']}" if where else first["msg"]
        return f"{exc.error_count()} validation error(s); {detail}"
    text = str(exc).strip() or type(exc).__name__
    return text.splitlines()[0]


def run_cli(argv: Sequence[str] | None = None, config: ToolkitConfig | None = None) -> int:
    """Parse ``argv``, run the subcommand and return the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else EXIT_USAGE

    try:
        config = config or ToolkitConfig()
    except ValidationError as e:
        sys.stderr.write(f"{PROG}: error: bad environment configuration: {_one_line(e)}\n")
        return EXIT_USAGE
    setup_logging(args.log_level or config.log_level, debug=config.debug)
    if args.seed is None:
        args.seed = config.seed
    if args.workers is None:
        args.workers = config.workers
    if args.seed < 0 or args.workers < 1:
        sys.stderr.write(f"{PROG}: error: --seed must be >= 0 and --workers >= 1\n")
        return EXIT_USAGE

    try:
        args.handler(args)
    except NumericalError as e:
        sys.stderr.write(f"{PROG}: numerical failure: {_one_line(e)}\n")
        return EXIT_NUMERICAL
    except (FSSValidationError, ValidationError, OSError, UnicodeError) as e:
        sys.stderr.write(f"{PROG}: data error: {_one_line(e)}\n")
        return EXIT_DATA
    return EXIT_OK


def main() -> int:
    """Console entry point."""
    return run_cli(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
