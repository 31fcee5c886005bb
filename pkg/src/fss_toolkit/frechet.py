"""Fréchet functions, sample Fréchet means and modulation estimates.

On S^1 the global sample mean is exact: F_n is piecewise quadratic with
kinks at the antipodes of the data, so its local minimizers are among the n
points xbar + 2 pi k / n. On S^m the mean is found by Riemannian gradient
descent with Armijo backtracking from the best low-discrepancy seed and from
the normalized ambient mean.
"""

from __future__ import annotations

import logging
import math
from functools import lru_cache
from typing import Any

import numpy as np
from scipy import special
from scipy.stats import qmc

from fss_toolkit.config import get_config
from fss_toolkit.distributions import population_mean_and_variance, sample
from fss_toolkit.models.distribution import is_circle_spec
from fss_toolkit.models.estimation import (
    BootstrapModulation,
    FrechetMeanOptions,
    FrechetMeanResult,
    MeanMode,
    ModulationCurve,
    ModulationEntry,
)
from fss_toolkit.models.geometry import Sample, SpherePoint, wrap_angle
from fss_toolkit.parallel import run_indexed
from fss_toolkit.sphere_geometry import (
    distances,
    exp_ambient,
    geodesic_distance,
    log_ambient,
    log_coords,
)
from fss_toolkit.streams import RandomStream
from fss_toolkit.utils.errors import (
    ConvergenceError,
    CutLocusError,
    FSSValidationError,
)

logger = logging.getLogger("fss_toolkit.frechet")

# Share of failed replicates tolerated in Monte Carlo loops
MAX_FAILURE_RATE = 1e-3

ARMIJO_C = 1e-4
# Relative F_n change indistinguishable from rounding
ROUNDING_SLACK = 8.0 * np.finfo(float).eps


def default_options() -> FrechetMeanOptions:
    cfg = get_config()
    return FrechetMeanOptions(grid_seeds=cfg.grid_seeds, max_iter=cfg.max_iter)


# ---------------------------------------------------------------------------
# Fréchet function
# ---------------------------------------------------------------------------


def frechet_function(sample: Sample, p: SpherePoint) -> float:
    """F_n(p) = (1/n) sum_j d(X_j, p)^2."""
    if sample.n == 0:
        raise FSSValidationError("Fréchet function of an empty sample")
    if p.dim != sample.dim:
        raise FSSValidationError(f"Point on S^{p.dim} but sample on S^{sample.dim}")
    base = p.angle if p.dim == 1 else p.vector
    d = distances(sample.dim, base, sample.points)
    return float(np.mean(d * d))


def _circle_values(x_sorted: np.ndarray, p: np.ndarray) -> np.ndarray:
    """F_n at every entry of ``p`` in O((n + len(p)) log n) via prefix sums.

    Points with x - p < -pi are lifted by +2 pi, points with x - p >= pi by
    -2 pi; both corrections are read off cumulative sums of the sorted data.
    """
    n = x_sorted.size
    s1 = np.concatenate([[0.0], np.cumsum(x_sorted)])
    s2 = np.concatenate([[0.0], np.cumsum(x_sorted * x_sorted)])
    total = s2[n] - 2.0 * p * s1[n] + n * p * p

    low = np.searchsorted(x_sorted, p - math.pi, side="left")
    low_sum = s1[low]
    total += 4.0 * math.pi * (low_sum - low * p) + 4.0 * math.pi**2 * low

    high = np.searchsorted(x_sorted, p + math.pi, side="left")
    high_count = n - high
    high_sum = s1[n] - s1[high]
    total += -4.0 * math.pi * (high_sum - high_count * p) + 4.0 * math.pi**2 * high_count
    return np.asarray(total / n)


def _pick(
    values: np.ndarray,
    tie_tolerance: float,
    stream: RandomStream | None,
) -> tuple[int, bool]:
    best = float(values.min())
    tied = np.flatnonzero(values - best <= tie_tolerance)
    if tied.size == 1:
        return int(tied[0]), False
    if stream is None:
        return int(tied[0]), True
    return int(stream.generator().choice(tied)), True


def _circle_mean(
    sample: Sample, options: FrechetMeanOptions, stream: RandomStream | None
) -> FrechetMeanResult:
    x = np.sort(sample.points)
    n = x.size
    candidates = wrap_angle(float(x.mean()) + 2.0 * math.pi * np.arange(n) / n)
    values = _circle_values(x, candidates)
    idx, tie = _pick(values, options.tie_tolerance, stream)
    mean = SpherePoint.on_circle(float(candidates[idx]))
    grad = 2.0 * float(np.mean(wrap_angle(mean.angle - x)))
    return FrechetMeanResult(
        mean=mean,
        value=frechet_function(sample, mean),
        candidates_evaluated=n,
        tie_flag=tie,
        gradient_norm=abs(grad),
    )


@lru_cache(maxsize=32)
def _seed_points(m: int, count: int) -> np.ndarray:
    """Deterministic low-discrepancy points on S^m (Halton through the normal quantile)."""
    if count == 0:
        return np.empty((0, m + 1))
    u = qmc.Halton(d=m + 1, scramble=False).random(count + 1)[1:]
    u = np.clip(u, 1e-12, 1.0 - 1e-12)
    z = special.ndtri(u)
    z /= np.linalg.norm(z, axis=1)[:, None]
    z.setflags(write=False)
    return z


def _sphere_values(points: np.ndarray, bases: np.ndarray) -> np.ndarray:
    c = np.clip(points @ bases.T, -1.0, 1.0)
    return np.asarray(np.mean(np.arccos(c) ** 2, axis=0))


def _descend(
    points: np.ndarray, start: np.ndarray, options: FrechetMeanOptions
) -> tuple[np.ndarray, float, float, int]:
    """Riemannian gradient descent from ``start``; returns (p, F_n, |grad|, iterations)."""
    p = start / np.linalg.norm(start)
    grad_norm = math.inf
    value = math.inf
    for it in range(options.max_iter + 1):
        v = log_ambient(p, points, nudge_antipodes=True)
        value = float(np.mean(np.sum(v * v, axis=1)))
        grad = -2.0 * v.mean(axis=0)
        grad_norm = float(np.linalg.norm(grad))
        if grad_norm < options.tolerance:
            return p, value, grad_norm, it
        if it == options.max_iter:
            break
        t = options.step
        while True:
            move = -t * grad
            size = float(np.linalg.norm(move))
            if size > math.pi / 2:
                move *= (math.pi / 2) / size
            q = exp_ambient(p, move)
            d = distances(points.shape[1] - 1, q, points)
            trial = float(np.mean(d * d))
            if trial <= value - ARMIJO_C * t * grad_norm**2:
                break
            if trial - value <= ROUNDING_SLACK * max(value, 1.0):
                break
            t *= 0.5
            if t < 1e-12:
                raise ConvergenceError(
                    "Line search failed to decrease F_n",
                    diagnostics={"iterations": it, "gradient_norm": grad_norm, "value": value},
                )
        p = q
    raise ConvergenceError(
        f"No convergence after {options.max_iter} gradient steps (|grad| = {grad_norm:.3g})",
        diagnostics={"iterations": options.max_iter, "gradient_norm": grad_norm, "value": value},
    )


def _sphere_mean(
    sample: Sample, options: FrechetMeanOptions, stream: RandomStream | None
) -> FrechetMeanResult:
    pts = sample.points
    m = sample.dim
    if options.anchor is not None:
        if options.anchor.dim != m:
            raise FSSValidationError("Anchor and sample dimensions differ")
        starts = [options.anchor.vector]
        evaluated = 1
    else:
        starts = []
        seeds = _seed_points(m, options.grid_seeds)
        evaluated = seeds.shape[0]
        if evaluated:
            starts.append(seeds[int(np.argmin(_sphere_values(pts, seeds)))])
        ambient = pts.mean(axis=0)
        if np.linalg.norm(ambient) > 1e-12:
            starts.append(ambient)
            evaluated += 1
        if not starts:
            starts.append(pts[0])
            evaluated += 1

    ends = [_descend(pts, s, options) for s in starts]
    values = np.array([e[1] for e in ends])
    best = float(values.min())
    # distinct end points with equal F_n form the tie set
    distinct: list[int] = []
    for j in np.argsort(values, kind="stable"):
        if values[j] - best > options.tie_tolerance:
            break
        if all(float(distances(m, ends[j][0], ends[k][0][None, :])[0]) > 1e-6 for k in distinct):
            distinct.append(int(j))
    tie = len(distinct) > 1
    chosen = distinct[0]
    if tie and stream is not None:
        chosen = int(stream.generator().choice(distinct))
    p, value, grad_norm, iterations = ends[chosen]
    return FrechetMeanResult(
        mean=SpherePoint.from_vector(p),
        value=value,
        candidates_evaluated=evaluated,
        tie_flag=tie,
        gradient_norm=grad_norm,
        iterations=sum(e[3] for e in ends),
    )


def frechet_mean(
    sample: Sample,
    options: FrechetMeanOptions | None = None,
    stream: RandomStream | None = None,
) -> FrechetMeanResult:
    """Sample Fréchet mean: global and exact on S^1, certified local minimizer on S^m.

    ``stream`` breaks ties uniformly at random; without it the first
    candidate of the tie set is returned.
    """
    if sample.n == 0:
        raise FSSValidationError("Fréchet mean of an empty sample")
    opts = options or default_options()
    if sample.dim == 1:
        return _circle_mean(sample, opts, stream)
    return _sphere_mean(sample, opts, stream)


def empirical_tangent_covariance(sample: Sample, base: SpherePoint) -> np.ndarray:
    """Covariance (1/n normalization) of the normal coordinates of the sample at ``base``."""
    if base.dim != sample.dim:
        raise FSSValidationError(f"Base on S^{base.dim} but sample on S^{sample.dim}")
    b = base.angle if base.dim == 1 else base.vector
    coords = log_coords(sample.dim, b, sample.points)
    centered = coords - coords.mean(axis=0)
    cov = centered.T @ centered / coords.shape[0]
    return np.asarray(0.5 * (cov + cov.T))


# ---------------------------------------------------------------------------
# Modulation
# ---------------------------------------------------------------------------


def _default_mode(spec: Any) -> MeanMode:
    return MeanMode.GLOBAL if is_circle_spec(spec) else MeanMode.LOCAL


def monte_carlo_modulation(
    spec: Any,
    n_grid: list[int],
    replicates: int,
    seed: int,
    workers: int | None = None,
    mean_mode: MeanMode | None = None,
    options: FrechetMeanOptions | None = None,
) -> ModulationCurve:
    """Estimate m_n = n V_n / V for every n in ``n_grid`` from ``replicates`` samples each.

    Replicate r at size n draws from substream (n, r, 0) and breaks mean ties
    with substream (n, r, 1), so the curve is identical for any worker count.
    """
    if replicates < 1:
        raise FSSValidationError("At least one replicate is required")
    grid = sorted(set(int(n) for n in n_grid))
    if not grid or grid[0] < 1:
        raise FSSValidationError("Sample sizes must be positive")
    mu, variance = population_mean_and_variance(spec)
    mode = mean_mode or _default_mode(spec)
    base_opts = options or default_options()
    opts = base_opts
    if mode is MeanMode.LOCAL and mu.dim > 1:
        opts = base_opts.model_copy(update={"anchor": mu})
    n_workers = workers if workers is not None else get_config().workers
    root = RandomStream(seed=seed)

    entries: list[ModulationEntry] = []
    for n in grid:
        if n == 1:
            # the mean of one point is the point itself, so V_1 = V
            entries.append(ModulationEntry(n=1, modulation=1.0, se=0.0, replicates=replicates))
            continue

        def replicate(r: int, n: int = n) -> float:
            x = sample(spec, n, root.child(n, r, 0))
            try:
                res = frechet_mean(x, opts, stream=root.child(n, r, 1))
            except (ConvergenceError, CutLocusError) as e:
                logger.debug(f"Replicate {r} at n={n} failed: {e}")
                return math.nan
            return geodesic_distance(res.mean, mu) ** 2

        d2 = np.array(run_indexed(replicate, range(replicates), n_workers))
        failed = int(np.isnan(d2).sum())
        if failed > MAX_FAILURE_RATE * replicates:
            raise ConvergenceError(
                f"{failed} of {replicates} replicates failed at n={n}",
                diagnostics={"n": n, "failed": failed, "replicates": replicates},
            )
        if failed:
            logger.warning(f"Dropped {failed} failed replicates at n={n}")
        good = d2[~np.isnan(d2)]
        modulation = n * float(good.mean()) / variance
        se = n * float(good.std(ddof=1)) / (variance * math.sqrt(good.size)) if good.size > 1 else 0.0
        logger.info(f"n={n}: m_n={modulation:.4f} (se {se:.4f}, R={good.size})")
        entries.append(
            ModulationEntry(n=n, modulation=modulation, se=se, replicates=int(good.size))
        )
    return ModulationCurve(entries=entries)


def bootstrap_modulation(
    sample: Sample,
    B: int,
    seed: int,
    workers: int | None = None,
    options: FrechetMeanOptions | None = None,
) -> BootstrapModulation:
    """Bootstrap estimate n E*[d(mu*, mu_n)^2] / trace(Sigma_n) of the modulation."""
    n = sample.n
    if n < 2:
        raise FSSValidationError("Bootstrap modulation needs at least two observations")
    if B < 100:
        raise FSSValidationError(f"Use at least 100 bootstrap repetitions, got {B}")
    opts = options or default_options()
    center = frechet_mean(sample, opts).mean
    spread = float(np.trace(empirical_tangent_covariance(sample, center)))
    if spread <= 0.0:
        raise FSSValidationError("Degenerate sample: all points coincide")
    if sample.dim > 1:
        opts = opts.model_copy(update={"anchor": center})
    root = RandomStream(seed=seed)

    def resample(b: int) -> float:
        idx = root.child(b, 0).generator().integers(0, n, size=n)
        res = frechet_mean(sample.take(idx), opts, stream=root.child(b, 1))
        return geodesic_distance(res.mean, center) ** 2

    n_workers = workers if workers is not None else get_config().workers
    d2 = np.array(run_indexed(resample, range(B), n_workers))
    estimate = n * float(d2.mean()) / spread
    se = n * float(d2.std(ddof=1)) / (spread * math.sqrt(B))
    logger.info(f"Bootstrap modulation for n={n}: {estimate:.4f} (se {se:.4f}, B={B})")
    return BootstrapModulation(estimate=estimate, se=se, n=n, B=B, seed=seed)
