"""
Scalar special functions used by the forward models and estimators.

Q-function, its inverse, the error functions, the two incomplete gamma
values needed by the Bussgang constants, and Gauss-Legendre nodes/weights.
"""

import logging
import math
from functools import lru_cache
from typing import Tuple

import numpy as np
from scipy import special
from scipy.optimize import brentq

from .exceptions import DomainError

logger = logging.getLogger(__name__)

SQRT_2PI = math.sqrt(2.0 * math.pi)
Q_INV_BRACKET = 12.0
MAX_LEGENDRE_ORDER = 64


def q(x):
    """
    Gaussian tail probability Q(x) = P(Z > x) for Z ~ N(0, 1).

    Accepts scalars or arrays; evaluated through erfc so the tail keeps full
    relative precision.
    """
    value = 0.5 * special.erfc(np.asarray(x, dtype=float) / math.sqrt(2.0))
    return value if np.ndim(x) else float(value)


def q_bar(x):
    """
    Two-exponential approximation of Q for positive arguments:
    (1/12) e^(-x^2/2) + (1/4) e^(-2x^2/3).
    """
    arr = np.asarray(x, dtype=float)
    if np.any(arr <= 0.0):
        raise DomainError("q_bar is only defined for x > 0")
    value = np.exp(-(arr**2) / 2.0) / 12.0 + np.exp(-2.0 * arr**2 / 3.0) / 4.0
    return value if np.ndim(x) else float(value)


def q_signed(x, use_q_bar: bool = False):
    """
    Q evaluated on arbitrary reals, optionally through q_bar.

    The q_bar branch uses Q(x) = 1 - Q(-x) for negative arguments and the
    exact value 1/2 at zero.
    """
    if not use_q_bar:
        return q(x)
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.full_like(arr, 0.5)
    pos = arr > 0.0
    neg = arr < 0.0
    if np.any(pos):
        out[pos] = q_bar(arr[pos])
    if np.any(neg):
        out[neg] = 1.0 - q_bar(-arr[neg])
    return out.reshape(np.shape(x)) if np.ndim(x) else float(out[0])


def q_inv(p: float, tol: float = 1e-12) -> float:
    """
    Inverse Q-function: the x with Q(x) = p.

    Bracketed root find on [-12, 12] followed by one Newton polish step.

    Raises:
        DomainError: if p is not strictly inside (0, 1).
    """
    if not 0.0 < p < 1.0:
        raise DomainError(f"q_inv requires 0 < p < 1, got {p}")
    if p == 0.5:
        return 0.0

    x = brentq(lambda z: q(z) - p, -Q_INV_BRACKET, Q_INV_BRACKET, xtol=1e-15, maxiter=500)
    # Newton polish: dQ/dx = -phi(x)
    phi = math.exp(-x * x / 2.0) / SQRT_2PI
    if phi > 0.0:
        x = x + (q(x) - p) / phi

    if abs(q(x) - p) > tol:
        logger.warning(f"q_inv({p}) residual {abs(q(x) - p):.3e} above tolerance {tol:.1e}")
    return float(x)


def erf(x):
    """Error function."""
    return special.erf(x)


def erfc(x):
    """Complementary error function."""
    return special.erfc(x)


def inc_gamma(s: float, x: float) -> float:
    """
    Upper incomplete gamma function for the two orders the Bussgang
    constants need: Gamma(1, x) = e^-x and Gamma(1/2, x) = sqrt(pi) erfc(sqrt(x)).
    """
    if x < 0.0:
        raise DomainError(f"inc_gamma requires x >= 0, got {x}")
    if s == 1.0:
        return math.exp(-x)
    if s == 0.5:
        return math.sqrt(math.pi) * float(special.erfc(math.sqrt(x)))
    raise DomainError(f"inc_gamma supports s in {{1/2, 1}} only, got {s}")


@lru_cache(maxsize=None)
def _legendre_rule(n: int) -> Tuple[Tuple[float, ...], Tuple[float, ...]]:
    # Chebyshev-angle seeds, Newton on the three-term recurrence.
    i = np.arange(1, n + 1)
    x = np.cos(np.pi * (i - 0.25) / (n + 0.5))

    for _ in range(100):
        p_prev = np.ones_like(x)
        p_cur = x.copy()
        for k in range(2, n + 1):
            p_prev, p_cur = p_cur, ((2 * k - 1) * x * p_cur - (k - 1) * p_prev) / k
        dp = n * (x * p_cur - p_prev) / (x**2 - 1.0)
        step = p_cur / dp
        x = x - step
        if np.max(np.abs(step)) < 1e-14:
            break

    # Derivative at the converged nodes for the weights.
    p_prev = np.ones_like(x)
    p_cur = x.copy()
    for k in range(2, n + 1):
        p_prev, p_cur = p_cur, ((2 * k - 1) * x * p_cur - (k - 1) * p_prev) / k
    dp = n * (x * p_cur - p_prev) / (x**2 - 1.0)
    weights = 2.0 / ((1.0 - x**2) * dp**2)

    order = np.argsort(x)
    x = x[order]
    weights = weights[order]
    # Enforce exact symmetry about zero.
    x = (x - x[::-1]) / 2.0
    weights = (weights + weights[::-1]) / 2.0
    return tuple(x.tolist()), tuple(weights.tolist())


def legendre_nodes_weights(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Gauss-Legendre nodes and weights on [-1, 1].

    Args:
        n: Number of nodes, 1 <= n <= 64

    Returns:
        (nodes, weights), nodes sorted ascending
    """
    if not isinstance(n, (int, np.integer)) or not 1 <= n <= MAX_LEGENDRE_ORDER:
        raise DomainError(f"Legendre order must be an integer in [1, {MAX_LEGENDRE_ORDER}], got {n}")
    nodes, weights = _legendre_rule(int(n))
    return np.array(nodes), np.array(weights)
