"""
Forward model of one-bit sampling with Gaussian time-varying thresholds.

The output autocorrelation at lag l is

    R_y(l) = e^(-d^2/(p0+p_l)) / (pi sqrt(p0^2 - p_l^2))
             * integral_0^(pi/2) [1/beta_s + D2(theta) - D1(theta)] dtheta - 1

with alpha_s, beta_s, D1, D2 defined below. The 1/beta_s part has a closed
form; the D parts are what the Padé, Gauss-Legendre and Monte-Carlo
back-ends approximate. ry_reference integrates them adaptively and serves
as ground truth for the back-ends.
"""

import logging
import math
from typing import Tuple

import numpy as np
from scipy.integrate import quad

from .exceptions import ExponentOverflowError, InfeasibleParametersError
from .special_fn import q_signed

logger = logging.getLogger(__name__)

HALF_PI = math.pi / 2.0
EXPONENT_CAP = 700.0
FEASIBILITY_EPS = 1e-6


def check_feasible(p0: float, p_l: float) -> None:
    """Raise unless p0 > 0 and |p_l| < p0."""
    if not p0 > 0.0:
        raise InfeasibleParametersError(f"p0 must be positive, got {p0}")
    if not abs(p_l) < p0:
        raise InfeasibleParametersError(f"|p_l| must be below p0, got p0={p0}, p_l={p_l}")


def clip_feasible(p0: float, p_l: float, eps: float = FEASIBILITY_EPS) -> float:
    """Clip p_l into [-p0 (1 - eps), p0 (1 - eps)]."""
    bound = p0 * (1.0 - eps)
    return float(min(max(p_l, -bound), bound))


def alpha_beta(theta, p0: float, p_l: float, d: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    alpha_s = d (sin theta + cos theta) / (p0 + p_l)
    beta_s  = (p0 - p_l sin 2 theta) / (2 (p0^2 - p_l^2))
    """
    check_feasible(p0, p_l)
    theta = np.asarray(theta, dtype=float)
    alpha = d * (np.sin(theta) + np.cos(theta)) / (p0 + p_l)
    beta = (p0 - p_l * np.sin(2.0 * theta)) / (2.0 * (p0 * p0 - p_l * p_l))
    return alpha, beta


def _scaled_exponential(alpha, beta):
    # sqrt(pi / beta) * alpha / beta * e^(alpha^2 / (4 beta)), shared by D1 and D2
    exponent = alpha * alpha / (4.0 * beta)
    if np.any(exponent > EXPONENT_CAP):
        raise ExponentOverflowError(
            f"exponent overflow (alpha^2/4beta = {float(np.max(exponent)):.1f} > {EXPONENT_CAP:.0f}): "
            "d too large for this (p0, p_l)"
        )
    return np.sqrt(np.pi / beta) * (alpha / beta) * np.exp(exponent)


def integrands(theta, p0: float, p_l: float, d: float, use_q_bar: bool = False):
    """D1 and D2 evaluated together on theta (scalar or array)."""
    alpha, beta = alpha_beta(theta, p0, p_l, d)
    base = _scaled_exponential(alpha, beta)
    d1_val = base * q_signed(alpha / np.sqrt(2.0 * beta), use_q_bar)
    d2_val = base / 2.0
    return d1_val, d2_val


def d1(theta, p0: float, p_l: float, d: float, use_q_bar: bool = False):
    """D1 = sqrt(pi/beta) (alpha/beta) Q(alpha / sqrt(2 beta)) e^(alpha^2/4beta)."""
    value, _ = integrands(theta, p0, p_l, d, use_q_bar)
    return value if np.ndim(theta) else float(value)


def d2(theta, p0: float, p_l: float, d: float):
    """D2 = sqrt(pi/beta) (alpha / (2 beta)) e^(alpha^2/4beta)."""
    _, value = integrands(theta, p0, p_l, d)
    return value if np.ndim(theta) else float(value)


def closed_term(p0: float, p_l: float) -> float:
    """
    integral_0^(pi/2) 1/beta_s dtheta
        = sqrt(p0^2 - p_l^2) (pi + 2 atan(p_l / sqrt(p0^2 - p_l^2)))
    """
    check_feasible(p0, p_l)
    root = math.sqrt(p0 * p0 - p_l * p_l)
    return root * (math.pi + 2.0 * math.atan2(p_l, root))


def prefactor(p0: float, p_l: float, d: float) -> float:
    """e^(-d^2 / (p0 + p_l)) / (pi sqrt(p0^2 - p_l^2))."""
    check_feasible(p0, p_l)
    return math.exp(-d * d / (p0 + p_l)) / (math.pi * math.sqrt(p0 * p0 - p_l * p_l))


def assemble(p0: float, p_l: float, d: float, d2_integral: float, d1_integral: float) -> float:
    """Combine the integral pieces into R_y(l)."""
    return prefactor(p0, p_l, d) * (closed_term(p0, p_l) + d2_integral - d1_integral) - 1.0


def ry_reference(p0: float, p_l: float, d: float, tol: float = 1e-10) -> float:
    """
    Reference evaluation of R_y(l) by adaptive Gauss-Kronrod quadrature of
    D2 - D1 on [0, pi/2].

    Args:
        p0: Variance of w
        p_l: Lag-l autocorrelation of w
        d: Threshold mean
        tol: Absolute quadrature tolerance in [1e-12, 1e-6]
    """
    check_feasible(p0, p_l)
    if not 1e-12 <= tol <= 1e-6:
        raise ValueError(f"tol must lie in [1e-12, 1e-6], got {tol}")
    if d == 0.0:
        return arcsine_classical(p0, p_l)

    def difference(theta):
        d1_val, d2_val = integrands(theta, p0, p_l, d)
        return float(d2_val - d1_val)

    # The bracket is scaled by the prefactor; keep the quadrature error on R_y below tol.
    scale = prefactor(p0, p_l, d)
    integral, error = quad(difference, 0.0, HALF_PI, epsabs=tol / scale, epsrel=0.0, limit=200)
    if error > tol / scale:
        logger.warning(f"ry_reference quadrature error estimate {error:.2e} above tolerance")
    value = scale * (closed_term(p0, p_l) + integral) - 1.0
    return float(min(max(value, -1.0), 1.0))


def arcsine_classical(r0: float, r_l: float) -> float:
    """Arcsine law (2/pi) asin(r_l / r0) for zero-threshold sign quantization."""
    if r0 <= 0.0:
        raise InfeasibleParametersError(f"r0 must be positive, got {r0}")
    if abs(r_l) > r0:
        raise InfeasibleParametersError(f"|r_l| must not exceed r0, got r0={r0}, r_l={r_l}")
    return 2.0 / math.pi * math.asin(r_l / r0)
