"""Closed-form limits, Hessian integrals, FSS classification and regime fitting."""

from __future__ import annotations

import logging
import math
from typing import Any

import numpy as np
from scipy import optimize, stats

from fss_toolkit.distributions import (
    PolarAngleLaw,
    antipodal_density,
    polar_angle_law,
    population_mean_and_variance,
)
from fss_toolkit.models.analysis import (
    CLTResult,
    FSSClass,
    FSSLabel,
    RegimeFit,
    RingSearchResult,
    SupportVerdict,
)
from fss_toolkit.models.distribution import (
    ConditionedVonMises,
    MixingMeasure,
    RingMixture,
    TwoPointCircle,
    VonMisesCircle,
    is_circle_spec,
)
from fss_toolkit.models.estimation import ModulationCurve
from fss_toolkit.models.geometry import wrap_angle
from fss_toolkit.quadrature import integrate_1d
from fss_toolkit.sphere_geometry import theta_cot_theta
from fss_toolkit.utils.errors import (
    FSSValidationError,
    RegimeNotDetectedError,
    TargetUnreachableError,
    UnstableHessianError,
)

logger = logging.getLogger("fss_toolkit.fss_analysis")

# Margin by which ring_mixture_search overshoots its target
SEARCH_MARGIN = 1.05
SEARCH_GRID = 4000

MIN_REGIME_ENTRIES = 8
MIN_EXPONENT_WIDTH = 0.01


# ---------------------------------------------------------------------------
# Circle limit
# ---------------------------------------------------------------------------


def circle_limit_modulation(f_pi: float) -> float:
    """lim m_n = 1 / (1 - 2 pi f(-pi))^2 for a circle law with density f_pi at the antipode."""
    if f_pi < 0.0:
        raise FSSValidationError(f"Density value must be nonnegative, got {f_pi}")
    mass = 2.0 * math.pi * f_pi
    if mass > 1.0 + 1e-12:
        raise FSSValidationError(
            f"2 pi f(-pi) = {mass:.6g} exceeds 1: the mean is not a stable minimizer"
        )
    if mass >= 1.0:
        return math.inf
    return 1.0 / (1.0 - mass) ** 2


# ---------------------------------------------------------------------------
# Ring mixtures and rotationally symmetric laws
# ---------------------------------------------------------------------------


def ring_frechet_function(m: int, theta: float, psi: float, tol: float | None = None) -> float:
    """Mean squared distance from the point at polar angle ``psi`` to the uniform ring at ``theta``.

    The ring average is an integral over the azimuth phi in [0, pi] with weight
    sin(phi)^(m-2), normalized by the same weight.
    """
    if m < 2:
        raise FSSValidationError("Rings live on S^m with m >= 2")
    if not (0.0 <= theta <= math.pi and 0.0 <= psi <= math.pi):
        raise FSSValidationError("theta and psi must lie in [0, pi]")
    ct, st = math.cos(theta), math.sin(theta)
    cp, sp = math.cos(psi), math.sin(psi)

    def weight(phi: float) -> float:
        return 1.0 if m == 2 else abs(math.sin(phi)) ** (m - 2)

    def integrand(phi: float) -> float:
        cf, sf = math.cos(phi), math.sin(phi)
        dot = ct * cp + st * sp * cf
        cross = math.hypot(st * sf, ct * sp - st * cf * cp)
        a = math.atan2(cross, dot)
        return weight(phi) * a * a

    num = integrate_1d(integrand, 0.0, math.pi, tol=tol)
    den = math.pi if m == 2 else integrate_1d(weight, 0.0, math.pi, tol=tol)
    return num / den


def ring_hessian_coefficient(m: int, theta: float) -> float:
    """h(theta) = 1/m + (m-1)/m * theta cot theta; the ring's Hessian at the pole is 2 h Id."""
    if m < 2:
        raise FSSValidationError("Rings live on S^m with m >= 2")
    if theta <= 0.0:
        return 1.0
    return 1.0 / m + (m - 1) / m * theta_cot_theta(theta)


def _hessian_factor(m: int, law: PolarAngleLaw) -> float:
    """2 * E[h(theta)] under a polar-angle law."""
    for theta, weight in law.atoms:
        if weight > 0.0 and theta >= math.pi:
            raise UnstableHessianError("Atom at the antipode: the Hessian integral diverges")
    if law.density is not None and law.density_mass > 0.0 and law.density_at_pi > 0.0:
        raise UnstableHessianError(
            "Density does not vanish at the antipode: the Hessian integral diverges"
        )
    return 2.0 * law.expect(lambda t: ring_hessian_coefficient(m, t))


def rotsym_hessian(m: int, mixing: MixingMeasure | PolarAngleLaw) -> np.ndarray:
    """Hessian of F at the pole of a rotationally symmetric law: 2 (int h dP) Id."""
    law = mixing if isinstance(mixing, PolarAngleLaw) else PolarAngleLaw.from_mixing(mixing)
    return _hessian_factor(m, law) * np.eye(m)


def rotsym_frechet_function(
    m: int, mixing: MixingMeasure | PolarAngleLaw, psi: float, tol: float | None = None
) -> float:
    """F at polar angle ``psi`` for a rotationally symmetric law: E over theta of the ring value."""
    law = mixing if isinstance(mixing, PolarAngleLaw) else PolarAngleLaw.from_mixing(mixing)
    return law.expect(lambda t: ring_frechet_function(m, t, psi, tol=tol))


def _as_lists(mat: np.ndarray) -> list[list[float]]:
    return [[float(v) for v in row] for row in np.atleast_2d(mat)]


def clt_analysis(spec: Any) -> CLTResult:
    """Asymptotic covariance 4 H^-1 Sigma H^-1 and the limiting modulation."""
    mu, variance = population_mean_and_variance(spec)
    if is_circle_spec(spec):
        f_pi = antipodal_density(spec)
        h = 2.0 * (1.0 - 2.0 * math.pi * f_pi)
        route = "circle"
        if h <= 0.0:
            raise UnstableHessianError(
                f"Hessian {h:.6g} is not positive: smeary or unstable mean"
            )
        hessian = np.array([[h]])
        # first-order condition: the normal coordinates are centred at the mean
        sigma = np.array([[variance]])
    else:
        law = polar_angle_law(spec)
        c = _hessian_factor(spec.m, law)
        route = "rotationally_symmetric"
        if c <= 0.0:
            raise UnstableHessianError(
                f"Hessian factor {c:.6g} is not positive: smeary or unstable mean"
            )
        hessian = c * np.eye(spec.m)
        sigma = variance / spec.m * np.eye(spec.m)
    inv = np.linalg.inv(hessian)
    cov = 4.0 * inv @ sigma @ inv
    cov = 0.5 * (cov + cov.T)
    limit = float(np.trace(cov)) / variance
    logger.info(f"{route} CLT for {type(spec).__name__} at {mu.coords}: limit modulation {limit:.6g}")
    return CLTResult(
        hessian=_as_lists(hessian),
        sigma=_as_lists(sigma),
        asymptotic_cov=_as_lists(cov),
        variance=variance,
        limit_modulation=limit,
        route=route,
    )


def feasibility_threshold(m: int) -> float:
    """Smallest theta in (pi/2, pi) with h(theta) < 0, the root of theta cot theta = -1/(m-1)."""
    if m < 2:
        raise FSSValidationError("The threshold is defined for m >= 2")
    target = -1.0 / (m - 1)
    return float(
        optimize.brentq(
            lambda t: theta_cot_theta(t) - target,
            math.pi / 2.0,
            math.pi - 1e-9,
            xtol=1e-15,
            rtol=4.0 * np.finfo(float).eps,
        )
    )


def ring_mixture_search(m: int, target: float, grid: int = SEARCH_GRID) -> RingSearchResult:
    """Find a ring mixture on S^m whose limiting modulation exceeds ``target``.

    The limit of RingMixture(theta, alpha) is 1 / g^2 with
    g = (1 - alpha) + alpha h(theta). Scanning theta upwards from pi/2, the
    first ring with h(theta) < g* = 1 / sqrt(1.05 target) admits
    alpha = (1 - g*) / (1 - h(theta)) in (0, 1), which lands at 1.05 target.
    """
    if m < 2:
        raise FSSValidationError("Ring mixtures need m >= 2")
    if target < 1.0:
        raise FSSValidationError(f"Target modulation must be at least 1, got {target}")
    threshold = feasibility_threshold(m)
    g_star = 1.0 / math.sqrt(SEARCH_MARGIN * target)
    best: dict[str, float] = {}
    for theta in np.linspace(math.pi / 2.0, math.pi, grid + 2)[1:-1]:
        h = ring_hessian_coefficient(m, float(theta))
        if h >= g_star:
            continue
        alpha = (1.0 - g_star) / (1.0 - h)
        if not 0.0 < alpha < 1.0:
            continue
        limit = clt_analysis(RingMixture(m=m, theta=float(theta), alpha=alpha)).limit_modulation
        if limit > best.get("achieved_limit", -math.inf):
            best = {"theta": float(theta), "alpha": alpha, "achieved_limit": limit}
        if limit > target:
            logger.info(f"Ring mixture theta={theta:.6f}, alpha={alpha:.6f} reaches {limit:.6g}")
            return RingSearchResult(
                m=m,
                target=target,
                theta=float(theta),
                alpha=alpha,
                achieved_limit=limit,
                threshold=threshold,
                proof_regime=m >= 4,
            )
    raise TargetUnreachableError(
        f"No ring mixture on the grid exceeds {target} on S^{m}", best=best
    )


# ---------------------------------------------------------------------------
# Classification
# ---------------------------------------------------------------------------


def classify_fss(curve: ModulationCurve, limit: float | None = None) -> FSSClass:
    """Label a modulation curve as Euclidean, Type I, Type II or Smeary.

    Smeary is only reported for an infinite analytic ``limit``; otherwise the
    limit is the analytic value when given and the last entry's estimate
    when not, compared against three standard errors of the last entry.
    """
    entries = curve.entries
    values = np.array(curve.values)
    se = np.array([e.se for e in entries])
    band = 3.0 * se + 1e-12
    last_band = float(band[-1])
    source = "analytic" if limit is not None else "last_entry"
    lim = float(limit) if limit is not None else entries[-1].modulation
    sup = float(values.max())

    elevated = [e.n for e, b in zip(entries, band) if e.modulation > 1.0 + b]
    depressed = [e.n for e, b in zip(entries, band) if e.modulation < 1.0 - b]
    diagnostics: dict[str, Any] = {
        "limit_source": source,
        "elevated_n": elevated,
        "below_one_n": depressed,
        "last_se": entries[-1].se,
    }

    if math.isinf(lim):
        return FSSClass(
            label=FSSLabel.SMEARY, limit_modulation=lim, sup_modulation=math.inf,
            diagnostics=diagnostics,
        )
    if lim > 1.0 + last_band:
        label = FSSLabel.TYPE_I
    elif abs(lim - 1.0) <= last_band and not elevated and not depressed:
        label = FSSLabel.EUCLIDEAN
    elif abs(lim - 1.0) <= last_band and elevated:
        label = FSSLabel.TYPE_II
    else:
        label = FSSLabel.INCONCLUSIVE
        logger.warning(f"Inconclusive FSS evidence: limit {lim:.4g}, elevated at {elevated}")
    return FSSClass(label=label, limit_modulation=lim, sup_modulation=sup, diagnostics=diagnostics)


# ---------------------------------------------------------------------------
# Regime fitting
# ---------------------------------------------------------------------------


def _bound_constants(
    log_n: np.ndarray, log_m: np.ndarray, alpha_minus: float, alpha_plus: float
) -> tuple[float, float]:
    c_minus = float(np.exp(np.min(log_m - alpha_minus * log_n)))
    c_plus = float(np.exp(np.max(log_m - alpha_plus * log_n)))
    return c_minus, c_plus


def _compat_ratio(
    log_n: np.ndarray, log_m: np.ndarray, alpha_minus: float, alpha_plus: float
) -> float:
    """(C+ n-^a+) / (C- n+^a-); the bounds are compatible when this is <= 1."""
    c_minus, c_plus = _bound_constants(log_n, log_m, alpha_minus, alpha_plus)
    return (c_plus * math.exp(alpha_plus * log_n[0])) / (c_minus * math.exp(alpha_minus * log_n[-1]))


def fit_regimes(curve: ModulationCurve) -> RegimeFit:
    """Fit the first rising regime C- n^a- <= m_n <= C+ n^a+ and the tail bound K."""
    ns = np.array(curve.ns, dtype=float)
    values = np.array(curve.values)
    se = np.array([e.se for e in curve.entries])
    if ns.size < MIN_REGIME_ENTRIES or math.log10(ns[-1] / ns[0]) < 2.0:
        raise FSSValidationError(
            f"Regime fitting needs at least {MIN_REGIME_ENTRIES} entries spanning two decades"
        )
    elevated = np.flatnonzero((values > 1.0 + 3.0 * se) & (ns > 1))
    if elevated.size == 0:
        raise RegimeNotDetectedError("no FSS regime detected")
    start = int(elevated[0])
    log_n = np.log(ns)
    log_m = np.log(np.maximum(values, 1e-300))
    slopes = np.diff(log_m) / np.diff(log_n)

    end = ns.size - 1
    for _ in range(ns.size):
        if end - start < 2:
            raise RegimeNotDetectedError("no FSS regime detected: rising segment too short")
        fit = stats.linregress(log_n[start : end + 1], log_m[start : end + 1])
        slope, slope_se = float(fit.slope), float(fit.stderr)
        width = max(2.0 * slope_se, MIN_EXPONENT_WIDTH)
        alpha_minus = slope - width
        drops = [k for k in range(start, end) if slopes[k] < alpha_minus / 2.0]
        new_end = drops[0] if drops else end
        if new_end == end:
            break
        end = new_end
    if slope <= 0.0:
        raise RegimeNotDetectedError("no FSS regime detected: segment is not rising")

    alpha_minus = min(max(slope - width, 1e-6), 1.0 - 2e-6)
    alpha_plus = min(slope + width, 1.0 - 1e-6)
    if not 0.0 < alpha_minus < alpha_plus < 1.0:
        raise RegimeNotDetectedError(f"Fitted exponent {slope:.4g} lies outside (0, 1)")

    lo, hi = start, end
    while _compat_ratio(log_n[lo : hi + 1], log_m[lo : hi + 1], alpha_minus, alpha_plus) > 1.0:
        if hi - lo < 2:
            raise RegimeNotDetectedError("Regime bounds are incompatible on every sub-segment")
        drop_first = _compat_ratio(log_n[lo + 1 : hi + 1], log_m[lo + 1 : hi + 1], alpha_minus, alpha_plus)
        drop_last = _compat_ratio(log_n[lo:hi], log_m[lo:hi], alpha_minus, alpha_plus)
        if drop_first <= drop_last:
            lo += 1
        else:
            hi -= 1
    c_minus, c_plus = _bound_constants(log_n[lo : hi + 1], log_m[lo : hi + 1], alpha_minus, alpha_plus)
    if c_minus * ns[lo] ** alpha_minus <= 1.0:
        raise RegimeNotDetectedError("Lower power-law bound does not exceed 1 at n-")

    tail = values[hi + 1 :] if hi + 1 < ns.size else values[hi:]
    k_bound = SEARCH_MARGIN * float(tail.max())
    n_zero = int(ns[hi + 1]) if hi + 1 < ns.size else int(ns[hi]) + 1

    segment = slice(lo, hi + 1)
    resid = log_m[segment] - (fit.intercept + slope * log_n[segment])
    lower = c_minus * ns[segment] ** alpha_minus
    upper = c_plus * ns[segment] ** alpha_plus
    verified = bool(
        np.all(lower <= values[segment] * (1.0 + 1e-12))
        and np.all(values[segment] <= upper * (1.0 + 1e-12))
    )
    logger.info(
        f"Regime on [{int(ns[lo])}, {int(ns[hi])}]: exponent {slope:.4f} +- {slope_se:.4f}, K={k_bound:.4g}"
    )
    return RegimeFit(
        c_minus=c_minus,
        c_plus=c_plus,
        alpha_minus=alpha_minus,
        alpha_plus=alpha_plus,
        n_minus=int(ns[lo]),
        n_plus=int(ns[hi]),
        n_zero=n_zero,
        k_bound=k_bound,
        exponent=slope,
        exponent_se=slope_se,
        residual=float(np.sqrt(np.mean(resid * resid))),
        verified=verified,
    )


# ---------------------------------------------------------------------------
# Support geometry on the circle
# ---------------------------------------------------------------------------


HALF_TOL = 1e-12


def _merged_arcs(spec: Any) -> list[tuple[float, float]]:
    """Support arcs as (start, end) with start in [-pi, pi) and end possibly beyond pi."""
    if isinstance(spec, VonMisesCircle):
        return [(-math.pi, math.pi)]
    if isinstance(spec, TwoPointCircle):
        atoms = []
        if spec.w > 0.0:
            atoms.append(spec.a)
        if spec.w < 1.0:
            atoms.append(spec.b)
        return [(a, a) for a in sorted(set(atoms))]
    assert isinstance(spec, ConditionedVonMises)
    arcs = [(a, b) for a, b in spec.support]
    if len(arcs) > 1 and arcs[0][0] <= -math.pi and arcs[-1][1] >= math.pi:
        first, last = arcs[0], arcs[-1]
        arcs = arcs[1:-1] + [(last[0], first[1] + 2.0 * math.pi)]
        arcs.sort()
    return arcs


def _largest_gap(arcs: list[tuple[float, float]]) -> float:
    if len(arcs) == 1:
        return 2.0 * math.pi - (arcs[0][1] - arcs[0][0])
    gaps = []
    for (_, end), (nxt, _) in zip(arcs, arcs[1:] + [(arcs[0][0] + 2.0 * math.pi, 0.0)]):
        gaps.append((nxt - end) % (2.0 * math.pi))
    return max(gaps)


def support_verdict(spec: Any) -> SupportVerdict:
    """What the support J of a circle law implies for the modulation at every n > 1.

    m_n = 1 when J lies strictly inside a closed half circle, or is a closed
    half circle with a null endpoint; m_n > 1 when the interior of J contains
    a closed half circle, or J holds two antipodal atoms of positive mass.
    """
    if not is_circle_spec(spec):
        raise FSSValidationError("Support verdicts are defined for circle laws only")
    arcs = _merged_arcs(spec)
    lengths = [b - a for a, b in arcs]

    if isinstance(spec, TwoPointCircle) and len(arcs) == 2:
        if abs(abs(wrap_angle(arcs[1][0] - arcs[0][0])) - math.pi) <= HALF_TOL:
            return SupportVerdict(
                verdict="fss", reason="two antipodal atoms carry positive mass", arcs=arcs
            )
    if max(lengths) > math.pi + HALF_TOL:
        return SupportVerdict(
            verdict="fss", reason="interior of the support contains a closed half circle", arcs=arcs
        )
    if len(arcs) == 1 and abs(lengths[0] - math.pi) <= HALF_TOL:
        return SupportVerdict(
            verdict="euclidean",
            reason="support is a closed half circle with endpoints of probability zero",
            arcs=arcs,
        )
    if _largest_gap(arcs) >= math.pi - HALF_TOL:
        return SupportVerdict(
            verdict="euclidean",
            reason="support lies strictly inside a closed half circle",
            arcs=arcs,
        )
    return SupportVerdict(
        verdict="undetermined",
        reason="support geometry alone does not decide the modulation",
        arcs=arcs,
    )
