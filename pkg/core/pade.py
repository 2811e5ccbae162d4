"""
Padé approximation of the D1/D2 integrands and closed-form integration of
the approximants.

[0, pi/2] is split into three pieces expanded about theta = 0, pi/4 and
pi/2. The outer pieces use [1/2] approximants and the middle one [2/2];
each rational is integrated analytically, which gives the analytic forward
model h_s.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Tuple

import numpy as np
from numpy.polynomial import polynomial as P

from .arcsine_core import arcsine_classical, assemble, check_feasible, integrands
from .exceptions import ApproximationBreakdownError, DomainError, PadeDegeneracyError
from .special_fn import legendre_nodes_weights

logger = logging.getLogger(__name__)

MAX_TAYLOR_ORDER = 4
HANKEL_COND_LIMIT = 1e12
RANGE_SLACK = 0.05
JUMP_WARN_FRACTION = 0.05
FALLBACK_NODES = 13

PIECES = {
    "low": (0.0, math.pi / 8.0, 0.0),
    "middle": (math.pi / 8.0, 3.0 * math.pi / 8.0, math.pi / 4.0),
    "high": (3.0 * math.pi / 8.0, math.pi / 2.0, math.pi / 2.0),
}
ORDERS = {"low": (1, 2), "middle": (2, 2), "high": (1, 2)}


@dataclass(frozen=True)
class PadeApproximant:
    """
    Rational a(t) / b(t) in the shifted variable t = theta - expansion_point,
    coefficients in ascending powers with b0 = 1.
    """

    numerator: np.ndarray
    denominator: np.ndarray
    expansion_point: float = 0.0

    @property
    def order(self) -> Tuple[int, int]:
        return len(self.numerator) - 1, len(self.denominator) - 1

    def __call__(self, theta):
        t = np.asarray(theta, dtype=float) - self.expansion_point
        value = P.polyval(t, self.numerator) / P.polyval(t, self.denominator)
        return value if np.ndim(theta) else float(value)

    def taylor(self, order: int) -> np.ndarray:
        """Taylor coefficients of the rational about its expansion point."""
        a = np.zeros(order + 1)
        a[: min(order + 1, len(self.numerator))] = self.numerator[: order + 1]
        b = self.denominator
        e = np.zeros(order + 1)
        for n in range(order + 1):
            acc = a[n]
            for j in range(1, min(n, len(b) - 1) + 1):
                acc -= b[j] * e[n - j]
            e[n] = acc / b[0]
        return e

    def poles_in(self, lo: float, hi: float) -> List[float]:
        """Real roots of the denominator inside [lo, hi] (theta coordinates)."""
        den = np.trim_zeros(np.asarray(self.denominator, dtype=float), "b")
        if len(den) < 2:
            return []
        roots = P.polyroots(den)
        real = roots[np.abs(roots.imag) <= 1e-12 * max(1.0, np.max(np.abs(roots)))].real
        theta = real + self.expansion_point
        return sorted(float(r) for r in theta if lo <= r <= hi)


def taylor_coeffs(
    f: Callable[[np.ndarray], np.ndarray],
    x0: float,
    order: int,
    h0: float = 1e-2,
    levels: int = 2,
) -> np.ndarray:
    """
    Taylor coefficients c_n = f^(n)(x0) / n!, n = 0..order, from central
    differences refined by Richardson extrapolation.

    Args:
        f: Vectorized scalar function
        x0: Expansion point
        order: Highest coefficient, at most 4
        h0: Coarsest step
        levels: Number of step halvings used for extrapolation
    """
    if not 0 <= order <= MAX_TAYLOR_ORDER:
        raise DomainError(f"order must lie in [0, {MAX_TAYLOR_ORDER}], got {order}")

    steps = h0 / 2.0 ** np.arange(levels + 1)
    offsets = np.arange(-2, 3)
    points = x0 + np.outer(steps, offsets)
    values = np.asarray(f(points.ravel()), dtype=float).reshape(points.shape)
    if not np.all(np.isfinite(values)):
        raise DomainError(f"non-finite function values near x0={x0}")

    fm2, fm1, f0, fp1, fp2 = values.T
    h = steps
    stencils = [
        f0,
        (fp1 - fm1) / (2.0 * h),
        (fp1 - 2.0 * f0 + fm1) / h**2,
        (fp2 - 2.0 * fp1 + 2.0 * fm1 - fm2) / (2.0 * h**3),
        (fp2 - 4.0 * fp1 + 6.0 * f0 - 4.0 * fm1 + fm2) / h**4,
    ]

    coeffs = np.zeros(order + 1)
    coeffs[0] = values[0, 2]
    for n in range(1, order + 1):
        table = stencils[n].copy()
        for m in range(1, levels + 1):
            factor = 4.0**m
            table = (factor * table[1:] - table[:-1]) / (factor - 1.0)
        coeffs[n] = table[0] / math.factorial(n)
    return coeffs


def pade_from_taylor(c, L: int, M: int, expansion_point: float = 0.0) -> PadeApproximant:
    """
    [L/M] Padé approximant matching the Taylor coefficients c_0..c_{L+M}.

    The denominator solves the Hankel system
        sum_{j=1}^{M} b_j c_{L+i-j} = -c_{L+i},  i = 1..M
    and the numerator follows by backsubstitution a_i = sum_j b_j c_{i-j}.

    Raises:
        PadeDegeneracyError: singular or ill-conditioned Hankel matrix.
    """
    c = np.asarray(c, dtype=float)
    if len(c) != L + M + 1:
        raise ValueError(f"need {L + M + 1} Taylor coefficients for [{L}/{M}], got {len(c)}")

    def coeff(k):
        return c[k] if k >= 0 else 0.0

    b = np.zeros(M + 1)
    b[0] = 1.0
    if M > 0:
        hankel = np.array([[coeff(L + i - j) for j in range(1, M + 1)] for i in range(1, M + 1)])
        rhs = -c[L + 1 : L + M + 1]
        if np.all(rhs == 0.0):
            # Truncated Taylor polynomial already matches through order L+M.
            pass
        else:
            cond = np.linalg.cond(hankel)
            if not np.isfinite(cond) or cond > HANKEL_COND_LIMIT:
                raise PadeDegeneracyError(
                    f"Hankel matrix for [{L}/{M}] is singular or ill-conditioned (cond={cond:.3e}); "
                    "its determinant must be non-zero"
                )
            b[1:] = np.linalg.solve(hankel, rhs)

    a = np.array([sum(b[j] * coeff(i - j) for j in range(0, min(i, M) + 1)) for i in range(L + 1)])
    return PadeApproximant(numerator=a, denominator=b, expansion_point=expansion_point)


def _trim(coeffs: np.ndarray) -> np.ndarray:
    coeffs = np.asarray(coeffs, dtype=float)
    scale = np.max(np.abs(coeffs)) if coeffs.size else 0.0
    keep = len(coeffs)
    while keep > 1 and abs(coeffs[keep - 1]) <= 1e-15 * scale:
        keep -= 1
    return coeffs[:keep]


def integrate_rational(num, den, lo: float, hi: float) -> float:
    """
    Exact integral of num(t) / den(t) over [lo, hi] for a denominator of
    degree at most two, covering complex, repeated and distinct real roots.
    """
    num = np.asarray(num, dtype=float)
    den = _trim(den)
    if not np.any(num):
        return 0.0
    if len(den) > 3:
        raise ValueError("denominator degree above two is not supported")

    if len(den) == 1:
        antiderivative = P.polyint(num / den[0])
        return float(P.polyval(hi, antiderivative) - P.polyval(lo, antiderivative))

    quotient, remainder = P.polydiv(num, den)
    total = 0.0
    if np.any(quotient):
        antiderivative = P.polyint(quotient)
        total += float(P.polyval(hi, antiderivative) - P.polyval(lo, antiderivative))

    remainder = np.concatenate([remainder, np.zeros(2)])[:2]
    r0, r1 = float(remainder[0]), float(remainder[1])

    if len(den) == 2:
        k, g = den
        return total + r0 / g * math.log(abs((k + g * hi) / (k + g * lo)))

    k, g, h = den
    d_hi = k + g * hi + h * hi * hi
    d_lo = k + g * lo + h * lo * lo
    total += r1 / (2.0 * h) * math.log(abs(d_hi / d_lo))

    linear = r0 - r1 * g / (2.0 * h)
    if linear == 0.0:
        return total

    disc = 4.0 * h * k - g * g
    u_hi = 2.0 * h * hi + g
    u_lo = 2.0 * h * lo + g
    if abs(disc) <= 1e-12 * max(g * g, abs(4.0 * h * k)):
        inverse = -2.0 / u_hi + 2.0 / u_lo
    elif disc > 0.0:
        s = math.sqrt(disc)
        inverse = 2.0 / s * (math.atan(u_hi / s) - math.atan(u_lo / s))
    else:
        s = math.sqrt(-disc)
        inverse = (
            math.log(abs((u_hi - s) / (u_hi + s))) - math.log(abs((u_lo - s) / (u_lo + s)))
        ) / s
    return total + linear * inverse


def integrate_outer(ap: PadeApproximant, interval: str) -> float:
    """Integral of a [1/2] outer approximant over [0, pi/8] or [3pi/8, pi/2]."""
    if interval not in ("low", "high"):
        raise ValueError(f"interval must be 'low' or 'high', got '{interval}'")
    if len(ap.numerator) > 2 or len(ap.denominator) > 3:
        raise ValueError(f"outer pieces take a [1/2] approximant, got {list(ap.order)}")
    lo, hi, _ = PIECES[interval]
    x0 = ap.expansion_point
    return integrate_rational(ap.numerator, ap.denominator, lo - x0, hi - x0)


def integrate_middle(ap: PadeApproximant) -> float:
    """Integral of the [2/2] middle approximant over [pi/8, 3pi/8]."""
    if len(ap.numerator) > 3 or len(ap.denominator) > 3:
        raise ValueError(f"the middle piece takes a [2/2] approximant, got {list(ap.order)}")
    lo, hi, _ = PIECES["middle"]
    x0 = ap.expansion_point
    return integrate_rational(ap.numerator, ap.denominator, lo - x0, hi - x0)


@dataclass
class PiecewiseModel:
    """Three approximants per integrand plus the pieces that fell back to quadrature."""

    p0: float
    p_l: float
    d: float
    use_q_bar: bool
    d1: Dict[str, PadeApproximant] = field(default_factory=dict)
    d2: Dict[str, PadeApproximant] = field(default_factory=dict)
    fallback: Dict[str, bool] = field(default_factory=dict)

    def integrand(self, name: str, theta):
        d1_val, d2_val = integrands(theta, self.p0, self.p_l, self.d, self.use_q_bar)
        return d1_val if name == "d1" else d2_val

    def piece_integral(self, name: str, piece: str) -> float:
        ap = getattr(self, name)[piece]
        if self.fallback.get(f"{name}_{piece}"):
            lo, hi, _ = PIECES[piece]
            nodes, weights = legendre_nodes_weights(FALLBACK_NODES)
            theta = (hi - lo) / 2.0 * nodes + (hi + lo) / 2.0
            return float((hi - lo) / 2.0 * np.dot(weights, self.integrand(name, theta)))
        if piece == "middle":
            return integrate_middle(ap)
        return integrate_outer(ap, piece)

    def integral(self, name: str) -> float:
        return sum(self.piece_integral(name, piece) for piece in PIECES)

    def max_jump(self) -> float:
        """Largest jump between neighbouring pieces at pi/8 and 3pi/8."""
        jumps = []
        for name in ("d1", "d2"):
            pieces = getattr(self, name)
            jumps.append(abs(pieces["low"](math.pi / 8.0) - pieces["middle"](math.pi / 8.0)))
            jumps.append(abs(pieces["middle"](3.0 * math.pi / 8.0) - pieces["high"](3.0 * math.pi / 8.0)))
        return float(max(jumps))

    def coefficient_rows(self) -> List[List]:
        """Rows piece,a0,a1,a2,b0,b1,b2 for the coefficient dump."""
        rows = []
        for name in ("d1", "d2"):
            for piece, ap in getattr(self, name).items():
                a = np.zeros(3)
                b = np.zeros(3)
                a[: len(ap.numerator)] = ap.numerator
                b[: len(ap.denominator)] = ap.denominator
                rows.append([f"{name}_{piece}", *a.tolist(), *b.tolist()])
        return rows


def build_piecewise(p0: float, p_l: float, d: float, use_q_bar: bool = False) -> PiecewiseModel:
    """
    Fit the six approximants for one lag.

    A piece whose denominator has a root inside its interval is flagged and
    integrated numerically instead.
    """
    check_feasible(p0, p_l)
    if d == 0.0:
        raise ValueError("the integrands vanish at d = 0; use the arcsine law directly")

    model = PiecewiseModel(p0=p0, p_l=p_l, d=d, use_q_bar=use_q_bar)
    for piece, (lo, hi, x0) in PIECES.items():
        L, M = ORDERS[piece]
        for index, name in enumerate(("d1", "d2")):

            def f(theta, index=index):
                return integrands(theta, p0, p_l, d, use_q_bar)[index]

            ap = pade_from_taylor(taylor_coeffs(f, x0, L + M), L, M, expansion_point=x0)
            getattr(model, name)[piece] = ap
            poles = ap.poles_in(lo, hi)
            if poles:
                logger.warning(
                    f"{name} {piece} approximant has a pole at theta={poles[0]:.4f} "
                    f"(p0={p0:.4g}, p_l={p_l:.4g}, d={d:.4g}); integrating numerically"
                )
                model.fallback[f"{name}_{piece}"] = True

    grid = np.linspace(0.0, math.pi / 2.0, 33)
    d1_grid, d2_grid = integrands(grid, p0, p_l, d, use_q_bar)
    scale = max(np.max(np.abs(d1_grid)), np.max(np.abs(d2_grid)))
    if scale > 0.0 and not any(model.fallback.values()):
        jump = model.max_jump()
        if jump > JUMP_WARN_FRACTION * scale:
            logger.warning(f"piecewise jump {jump:.3e} exceeds 5% of max|D| = {scale:.3e}")
    return model


def h_s(p0: float, p_l: float, d: float, use_q_bar: bool = False) -> float:
    """
    Analytic (Padé) approximation of R_y(l).

    Raises:
        ApproximationBreakdownError: result outside [-1.05, 1.05].
    """
    check_feasible(p0, p_l)
    if d == 0.0:
        return arcsine_classical(p0, p_l)

    model = build_piecewise(p0, p_l, d, use_q_bar)
    value = assemble(p0, p_l, d, model.integral("d2"), model.integral("d1"))
    if not np.isfinite(value) or abs(value) > 1.0 + RANGE_SLACK:
        raise ApproximationBreakdownError(
            f"Padé forward model left the admissible range: {value} at (p0={p0}, p_l={p_l}, d={d})"
        )
    return float(min(max(value, -1.0), 1.0))
