"""Quantile and bootstrap tests for equality of Fréchet means, and rejection curves.

All statistics are quadratic forms in normal coordinates, referred to the
chi-square law with m degrees of freedom. The quantile tests plug in the
empirical covariance of the data; the bootstrap test replaces it by the
covariance of resampled means, which follows the actual spread of the sample
mean when the modulation is large.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Mapping, Sequence
from itertools import combinations
from typing import Any

import numpy as np
from scipy import stats

from fss_toolkit.config import get_config
from fss_toolkit.distributions import sample as draw_sample
from fss_toolkit.frechet import default_options, empirical_tangent_covariance, frechet_mean
from fss_toolkit.models.estimation import FrechetMeanOptions
from fss_toolkit.models.geometry import Sample, SpherePoint
from fss_toolkit.models.reports import PairwiseRow, RejectionRow, TestMethod, TestReport
from fss_toolkit.parallel import run_indexed
from fss_toolkit.sphere_geometry import log_coords, plane_rotation, rotate_points
from fss_toolkit.streams import RandomStream
from fss_toolkit.utils.errors import (
    ConvergenceError,
    FSSValidationError,
    NumericalError,
    SingularCovarianceError,
)

logger = logging.getLogger("fss_toolkit.testing")

# Smallest eigenvalue, relative to the trace, accepted when inverting
EIGEN_FLOOR = 1e-12

MIN_BOOTSTRAP_N = 10
MIN_BOOTSTRAP_B = 100
MIN_REJECTION_REPLICATES = 100


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def chi2_p_value(statistic: float, dof: int) -> float:
    """Upper tail P(chi2_dof >= statistic)."""
    return float(min(1.0, max(0.0, stats.chi2.sf(statistic, dof))))


def _invert(cov: np.ndarray, what: str) -> np.ndarray:
    sym = 0.5 * (cov + cov.T)
    values, vectors = np.linalg.eigh(sym)
    trace = float(values.sum())
    if trace <= 0.0 or values.min() < EIGEN_FLOOR * trace:
        raise SingularCovarianceError(
            f"{what} is singular (eigenvalues {values.min():.3g} .. {values.max():.3g})"
        )
    return np.asarray((vectors / values) @ vectors.T)


def _quadratic_form(delta: np.ndarray, inverse: np.ndarray) -> float:
    return max(0.0, float(delta @ inverse @ delta))


def _base(p: SpherePoint) -> np.ndarray | float:
    return p.angle if p.dim == 1 else p.vector


def _coords(dim: int, base: SpherePoint, points: Sequence[SpherePoint]) -> np.ndarray:
    if dim == 1:
        arr: np.ndarray = np.array([p.angle for p in points])
    else:
        arr = np.array([p.vector for p in points])
    return log_coords(dim, _base(base), arr)


def _check_pair(s1: Sample, s2: Sample) -> None:
    if s1.dim != s2.dim:
        raise FSSValidationError(f"Samples on S^{s1.dim} and S^{s2.dim}")


def _pooled(s1: Sample, s2: Sample) -> Sample:
    return Sample(dim=s1.dim, points=np.concatenate([s1.points, s2.points]))


def rotate_sample(sample: Sample, angle: float) -> Sample:
    """Rotate a sample by ``angle`` in the (e0, e1) plane; a shift of every angle on S^1."""
    if sample.dim == 1:
        return rotate_points(sample, angle)
    return rotate_points(sample, plane_rotation(sample.dim + 1, angle))


# ---------------------------------------------------------------------------
# Quantile tests
# ---------------------------------------------------------------------------


def one_sample_quantile_test(sample: Sample, mu0: SpherePoint) -> TestReport:
    """Test mu = mu0 with n phi(mu_n)^T Sigma_n^-1 phi(mu_n) against chi2_m, phi = log at mu0."""
    m, n = sample.dim, sample.n
    if mu0.dim != m:
        raise FSSValidationError(f"Hypothesized mean on S^{mu0.dim} but sample on S^{m}")
    if n <= m:
        raise FSSValidationError(f"Need more than {m} observations, got {n}")
    mean = frechet_mean(sample).mean
    phi = _coords(m, mu0, [mean])[0]
    cov = empirical_tangent_covariance(sample, mu0)
    statistic = n * _quadratic_form(phi, _invert(cov, "Sample covariance"))
    return TestReport(
        method=TestMethod.QUANTILE,
        statistic=statistic,
        dof=m,
        p_value=chi2_p_value(statistic, m),
        n1=n,
    )


def two_sample_quantile_test(s1: Sample, s2: Sample) -> TestReport:
    """Two-sample quantile test in the chart at the pooled-sample mean."""
    _check_pair(s1, s2)
    m = s1.dim
    center = frechet_mean(_pooled(s1, s2)).mean
    means = [frechet_mean(s1).mean, frechet_mean(s2).mean]
    phi = _coords(m, center, means)
    delta = phi[0] - phi[1]
    cov = (
        empirical_tangent_covariance(s1, center) / s1.n
        + empirical_tangent_covariance(s2, center) / s2.n
    )
    statistic = _quadratic_form(delta, _invert(cov, "Pooled covariance"))
    return TestReport(
        method=TestMethod.QUANTILE,
        statistic=statistic,
        dof=m,
        p_value=chi2_p_value(statistic, m),
        n1=s1.n,
        n2=s2.n,
    )


# ---------------------------------------------------------------------------
# Bootstrap test
# ---------------------------------------------------------------------------


def _bootstrap_means(
    sample: Sample,
    center: SpherePoint,
    B: int,
    stream: RandomStream,
    workers: int,
    options: FrechetMeanOptions,
) -> list[SpherePoint]:
    n = sample.n

    def resample(b: int) -> SpherePoint:
        idx = stream.child(b, 0).generator().integers(0, n, size=n)
        return frechet_mean(sample.take(idx), options, stream=stream.child(b, 1)).mean

    boot = run_indexed(resample, range(B), workers)
    logger.debug(f"Drew {B} bootstrap means for a sample of {n} (center {center.coords})")
    return boot


def _bootstrap_test(
    s1: Sample,
    s2: Sample,
    B: int,
    stream: RandomStream,
    workers: int | None = None,
) -> tuple[float, int]:
    """(statistic, dof) of the bootstrap-studentized two-sample test."""
    _check_pair(s1, s2)
    if min(s1.n, s2.n) < MIN_BOOTSTRAP_N:
        raise FSSValidationError(f"Bootstrap test needs at least {MIN_BOOTSTRAP_N} points per sample")
    if B < MIN_BOOTSTRAP_B:
        raise FSSValidationError(f"Use at least {MIN_BOOTSTRAP_B} bootstrap repetitions, got {B}")
    m = s1.dim
    n_workers = workers if workers is not None else get_config().workers
    base_opts = default_options()
    center = frechet_mean(_pooled(s1, s2), base_opts).mean
    delta = np.zeros(m)
    cov = np.zeros((m, m))
    for j, s in enumerate((s1, s2)):
        mean = frechet_mean(s, base_opts).mean
        opts = base_opts if m == 1 else base_opts.model_copy(update={"anchor": mean})
        boot = _bootstrap_means(s, mean, B, stream.child(j), n_workers, opts)
        coords = _coords(m, center, boot)
        cov += np.atleast_2d(np.cov(coords, rowvar=False))
        phi = _coords(m, center, [mean])[0]
        delta += phi if j == 0 else -phi
    try:
        inverse = _invert(cov, "Bootstrap covariance")
    except SingularCovarianceError as e:
        raise SingularCovarianceError(f"{e}; try a larger B") from e
    return _quadratic_form(delta, inverse), m


def two_sample_bootstrap_test(
    s1: Sample,
    s2: Sample,
    B: int,
    seed: int,
    workers: int | None = None,
) -> TestReport:
    """Two-sample test studentized by the covariance of bootstrap means.

    Sample j is resampled from substreams (j, b) of ``seed``; the bootstrap
    means are charted at the pooled mean together with the difference of the
    two sample means.
    """
    statistic, dof = _bootstrap_test(s1, s2, B, RandomStream(seed=seed), workers)
    return TestReport(
        method=TestMethod.BOOTSTRAP,
        statistic=statistic,
        dof=dof,
        p_value=chi2_p_value(statistic, dof),
        n1=s1.n,
        n2=s2.n,
        B=B,
        seed=seed,
    )


# ---------------------------------------------------------------------------
# Rejection curves and pairwise tables
# ---------------------------------------------------------------------------


def rejection_curve(
    base_spec: Any,
    offsets: Sequence[float],
    n: int,
    replicates: int,
    level: float,
    method: TestMethod,
    seed: int,
    B: int = 300,
    workers: int | None = None,
) -> list[RejectionRow]:
    """Empirical rejection rates of a two-sample test against rotated alternatives.

    Replicate r at offset index i compares a draw from substream (i, r, 0)
    with a draw from (i, r, 1) rotated by the offset; the bootstrap test
    resamples from (i, r, 2).
    """
    if replicates < MIN_REJECTION_REPLICATES:
        raise FSSValidationError(
            f"Use at least {MIN_REJECTION_REPLICATES} replicates per offset, got {replicates}"
        )
    if not 0.0 < level < 1.0:
        raise FSSValidationError(f"Level must lie in (0, 1), got {level}")
    if any(not math.isfinite(o) for o in offsets):
        raise FSSValidationError("Offsets must be finite")
    method = TestMethod(method)
    n_workers = workers if workers is not None else get_config().workers
    root = RandomStream(seed=seed)

    rows: list[RejectionRow] = []
    for i, offset in enumerate(offsets):

        def replicate(r: int, i: int = i, offset: float = offset) -> bool | None:
            x = draw_sample(base_spec, n, root.child(i, r, 0))
            y = rotate_sample(draw_sample(base_spec, n, root.child(i, r, 1)), offset)
            try:
                if method is TestMethod.QUANTILE:
                    p = two_sample_quantile_test(x, y).p_value
                else:
                    statistic, dof = _bootstrap_test(x, y, B, root.child(i, r, 2), workers=1)
                    p = chi2_p_value(statistic, dof)
            except (NumericalError, FSSValidationError) as e:
                logger.debug(f"Replicate {r} at offset {offset} failed: {e}")
                return None
            return p < level

        outcomes = run_indexed(replicate, range(replicates), n_workers)
        failures = sum(o is None for o in outcomes)
        valid = replicates - failures
        if valid == 0:
            raise ConvergenceError(
                f"Every replicate failed at offset {offset}",
                diagnostics={"offset": offset, "failures": failures},
            )
        if failures:
            logger.warning(f"{failures} of {replicates} replicates failed at offset {offset}")
        rejections = sum(o is True for o in outcomes)
        rate = rejections / valid
        se = math.sqrt(rate * (1.0 - rate) / valid)
        logger.info(f"{method.value} test, offset {offset:.4g}: rejection rate {rate:.4f} (se {se:.4f})")
        rows.append(
            RejectionRow(
                offset=offset,
                method=method,
                n=n,
                level=level,
                rejections=rejections,
                replicates=valid,
                rate=rate,
                se=se,
                failures=failures,
            )
        )
    return rows


def pairwise_comparison(
    datasets: Mapping[str, Sample],
    B: int,
    seed: int,
    workers: int | None = None,
) -> list[PairwiseRow]:
    """Quantile and bootstrap tests for every unordered pair of datasets, in input order."""
    if len(datasets) < 2:
        raise FSSValidationError("Pairwise comparison needs at least two datasets")
    root = RandomStream(seed=seed)
    rows: list[PairwiseRow] = []
    for k, (a, b) in enumerate(combinations(list(datasets), 2)):
        quantile = two_sample_quantile_test(datasets[a], datasets[b])
        statistic, dof = _bootstrap_test(datasets[a], datasets[b], B, root.child(k), workers)
        rows.append(
            PairwiseRow(
                first=a,
                second=b,
                quantile_p=quantile.p_value,
                bootstrap_p=chi2_p_value(statistic, dof),
                quantile_statistic=quantile.statistic,
                bootstrap_statistic=statistic,
            )
        )
        logger.info(f"{a} vs {b}: quantile p={quantile.p_value:.4g}, bootstrap p={rows[-1].bootstrap_p:.4g}")
    return rows
