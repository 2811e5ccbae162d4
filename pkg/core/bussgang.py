"""
Bussgang laws for sign quantization.

With a zero threshold the input/output cross-correlation is a scaled copy
of the input covariance (classical law). With Gaussian thresholds of mean d
and variance sigma the output y = sign(x - tau) satisfies

    R_yx = R_ytau + C1 (R_x + Sigma) + C2 d (R_x + Sigma - p0 U)

where U is the all-ones matrix and C1, C2 depend only on p0 and d.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from .arcsine_core import check_feasible
from .exceptions import DomainError
from .special_fn import erf, inc_gamma

logger = logging.getLogger(__name__)

SQRT_PI = math.sqrt(math.pi)


@dataclass(frozen=True)
class BussgangConstants:
    """C1 and C2 of the modified law at (p0, d)."""

    c1: float
    c2: float
    p0: float
    d: float


def c_classical(r0: float) -> float:
    """C = sqrt(2/pi) / sqrt(r0) for y = sign(x), x ~ N(0, r0)."""
    if r0 <= 0.0:
        raise DomainError(f"r0 must be positive, got {r0}")
    return math.sqrt(2.0 / (math.pi * r0))


def constants(p0: float, d: float) -> BussgangConstants:
    """
    Closed forms in terms of the upper incomplete gamma function:

        C1 = sqrt(2/(pi p0)) G(1, d^2/2p0) - |d| / (sqrt(pi) p0) (G(1/2, d^2/2p0) - sqrt(pi))
        C2 = -erf(d / sqrt(2 p0)) / p0

    C1 is even in d and C2 is odd.
    """
    if p0 <= 0.0:
        raise DomainError(f"p0 must be positive, got {p0}")
    x = d * d / (2.0 * p0)
    c1 = math.sqrt(2.0 / (math.pi * p0)) * inc_gamma(1.0, x) - abs(d) / (SQRT_PI * p0) * (
        inc_gamma(0.5, x) - SQRT_PI
    )
    c2 = -float(erf(d / math.sqrt(2.0 * p0))) / p0
    return BussgangConstants(c1=c1, c2=c2, p0=p0, d=d)


def scalar_law(p0: float, p_l: float, d: float) -> float:
    """E{sign(w_i) w_j} = C1 p_l - C2 d (p0 - p_l) for entries at lag l of w."""
    check_feasible(p0, p_l)
    k = constants(p0, d)
    return k.c1 * p_l - k.c2 * d * (p0 - p_l)


def _check_shapes(r_ytau_hat: np.ndarray, r_x_hat: np.ndarray) -> None:
    if r_x_hat.ndim != 2 or r_x_hat.shape[0] != r_x_hat.shape[1]:
        raise ValueError(f"R_x must be square, got shape {r_x_hat.shape}")
    if r_ytau_hat.shape != r_x_hat.shape:
        raise ValueError(f"shape mismatch: R_ytau {r_ytau_hat.shape} vs R_x {r_x_hat.shape}")


def recover_crosscorr(r_ytau_hat, r_x_hat, sigma: float, p0: float, d: float) -> np.ndarray:
    """
    Input/output cross-correlation from the modified Bussgang law.

    Args:
        r_ytau_hat: Sample cross-correlation of y with the thresholds
        r_x_hat: Recovered input covariance
        sigma: Threshold variance (Sigma = sigma I)
        p0: Variance of w = x - tau
        d: Threshold mean
    """
    r_ytau_hat = np.asarray(r_ytau_hat, dtype=float)
    r_x_hat = np.asarray(r_x_hat, dtype=float)
    _check_shapes(r_ytau_hat, r_x_hat)
    k = constants(p0, d)
    p = r_x_hat + sigma * np.eye(r_x_hat.shape[0])
    return r_ytau_hat + k.c1 * p + k.c2 * d * (p - p0 * np.ones_like(p))


def grouped_crosscorr(r_ytau_hat, r_x_hat, sigma: float, p0: float, d: float) -> np.ndarray:
    """Same law grouped as R_ytau + (C1 + d C2)(R_x + Sigma) - d C2 p0 U."""
    r_ytau_hat = np.asarray(r_ytau_hat, dtype=float)
    r_x_hat = np.asarray(r_x_hat, dtype=float)
    _check_shapes(r_ytau_hat, r_x_hat)
    k = constants(p0, d)
    p = r_x_hat + sigma * np.eye(r_x_hat.shape[0])
    return r_ytau_hat + (k.c1 + d * k.c2) * p - d * k.c2 * p0 * np.ones_like(p)
