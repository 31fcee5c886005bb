"""Adaptive quadrature on top of QUADPACK."""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence

from scipy import integrate

from fss_toolkit.config import get_config
from fss_toolkit.utils.errors import QuadratureError

logger = logging.getLogger("fss_toolkit.quadrature")

SUBDIVISION_LIMIT = 500


def integrate_1d(
    func: Callable[[float], float],
    a: float,
    b: float,
    points: Sequence[float] | None = None,
    tol: float | None = None,
) -> float:
    """Integrate ``func`` over [a, b] to absolute tolerance ``tol``.

    ``points`` lists interior breakpoints (kinks, interval ends) handed to
    QUADPACK. A reported error above 1e3 * tol raises ``QuadratureError``.
    """
    if b <= a:
        return 0.0
    eps = tol if tol is not None else get_config().quad_tol
    inner = sorted(p for p in (points or ()) if a < p < b)
    out = integrate.quad(
        func,
        a,
        b,
        epsabs=eps,
        epsrel=1e-12,
        limit=SUBDIVISION_LIMIT,
        points=inner or None,
        full_output=1,
    )
    value, abserr = float(out[0]), float(out[1])
    if len(out) > 3 and abserr > 1e3 * eps:
        raise QuadratureError(
            f"Quadrature on [{a}, {b}] did not converge (error estimate {abserr:.3g}): {out[3]}"
        )
    if len(out) > 3:
        logger.debug(f"QUADPACK note on [{a}, {b}] (error {abserr:.3g}): {out[3]}")
    return value
