"""
Recovery of the effective parameters (p0, p_l) from one-bit statistics.

p0 comes either from the sample mean (fast path) or from a two-variable
search (full Padé path); each lag's p_l is then found by minimizing the
log squared residual between the sample autocorrelation and one of the
forward models.
"""

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from .arcsine_core import FEASIBILITY_EPS, clip_feasible
from .exceptions import (
    ConvergenceError,
    DomainError,
    OneBitError,
    UnidentifiableVarianceError,
)
from .models import EffectiveParams, RecoveryMethod, RecoveryResult
from .pade import h_s
from .quad_mc import DEFAULT_NM, DEFAULT_NQ, GLRule, f_s, j_s
from .special_fn import q_inv

logger = logging.getLogger(__name__)

Forward = Callable[[float, float, float], float]

CRITERION_FLOOR = -1380.0
RESIDUAL_FLOOR = 1e-300
EXACT_FIT = 1e-12
INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
INV_PHI_SQUARE = (3.0 - math.sqrt(5.0)) / 2.0


@dataclass
class SolverOptions:
    """Knobs shared by the recovery paths."""

    n_q: int = DEFAULT_NQ
    n_m: int = DEFAULT_NM
    mc_seed: int = 0
    q_bar: bool = False
    eps: float = FEASIBILITY_EPS
    # full Padé path
    n_starts: int = 20
    max_iter: int = 1000
    step_tol: float = 1e-8
    p0_scale: float = 1.0
    seed: int = 0
    # scalar path
    golden_tol: float = 1e-10
    n_brackets: int = 8
    parabolic: bool = False
    max_workers: int = 1


def forward_model(method: str, options: SolverOptions = SolverOptions()) -> Forward:
    """Forward model R_y(l) = forward(p0, p_l, d) used by a recovery method."""
    if method in (RecoveryMethod.PADE_FULL, RecoveryMethod.PADE_FAST):
        return lambda p0, p_l, d: h_s(p0, p_l, d, use_q_bar=options.q_bar)
    if method == RecoveryMethod.GAUSS_LEGENDRE:
        rule = GLRule(options.n_q)
        return lambda p0, p_l, d: j_s(p0, p_l, d, rule)
    if method == RecoveryMethod.MONTE_CARLO:
        return lambda p0, p_l, d: f_s(p0, p_l, d, options.n_m, options.mc_seed)
    raise ValueError(f"unknown method '{method}', choose from {', '.join(RecoveryMethod.CHOICES)}")


def estimate_p0(mu_hat: float, d: float) -> float:
    """
    Variance of w from the one-bit sample mean: p0 = (d / Q^-1((mu + 1) / 2))^2.

    Raises:
        UnidentifiableVarianceError: mu_hat ~ 0 or d ~ 0.
    """
    if not -1.0 < mu_hat < 1.0:
        raise UnidentifiableVarianceError(f"sample mean must lie in (-1, 1), got {mu_hat}")
    if abs(d) <= 1e-8 or abs(mu_hat) <= 1e-8:
        raise UnidentifiableVarianceError(
            f"variance unidentifiable at this threshold mean (mu_hat={mu_hat}, d={d})"
        )
    x = q_inv((mu_hat + 1.0) / 2.0)
    if x * d < 0.0:
        logger.warning(f"sample mean {mu_hat:.4f} has the wrong sign for threshold mean d={d}")
    return (d / x) ** 2


def criterion(forward: Forward, r_y_l: float, p0: float, p_l: float, d: float) -> float:
    """log |R_y(l) - forward(p0, p_l)|^2, floored at -1380 for a vanishing residual."""
    residual = abs(r_y_l - forward(p0, p_l, d))
    if residual < RESIDUAL_FLOOR:
        return CRITERION_FLOOR
    return 2.0 * math.log(residual)


def _safe_criterion(forward: Forward, r_y_l: float, p0: float, p_l: float, d: float) -> float:
    try:
        return criterion(forward, r_y_l, p0, p_l, d)
    except (OneBitError, ArithmeticError, ValueError):
        return math.inf


def golden_section(f: Callable[[float], float], a: float, b: float, tol: float = 1e-10) -> float:
    """
    Golden-section search for the minimizer of a unimodal f on [a, b];
    returns the midpoint of the final bracket of width <= tol.
    """
    a, b = min(a, b), max(a, b)
    h = b - a
    if h <= tol:
        return (a + b) / 2.0

    n = int(math.ceil(math.log(tol / h) / math.log(INV_PHI)))
    c = a + INV_PHI_SQUARE * h
    d = a + INV_PHI * h
    yc = f(c)
    yd = f(d)

    for _ in range(n - 1):
        if yc < yd:
            b = d
            d = c
            yd = yc
            h = INV_PHI * h
            c = a + INV_PHI_SQUARE * h
            yc = f(c)
        else:
            a = c
            c = d
            yc = yd
            h = INV_PHI * h
            d = a + INV_PHI * h
            yd = f(d)

    if yc < yd:
        return (a + d) / 2.0
    return (c + b) / 2.0


def _minimize_scalar(f, a: float, b: float, options: SolverOptions) -> float:
    if options.parabolic:
        res = minimize_scalar(f, bounds=(a, b), method="bounded", options={"xatol": options.golden_tol})
        return float(res.x)
    return golden_section(f, a, b, options.golden_tol)


def _run_lags(task, count: int, max_workers: int) -> list:
    if max_workers <= 1 or count <= 1:
        return [task(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        return list(executor.map(task, range(count)))


def _bracket_search(objective, lo: float, hi: float, splits: int, options: SolverOptions) -> float:
    """Best of one scalar search per sub-interval of [lo, hi]."""
    edges = np.linspace(lo, hi, splits + 1)
    candidates = [_minimize_scalar(objective, edges[i], edges[i + 1], options) for i in range(splits)]
    values = [objective(c) for c in candidates]
    return candidates[int(np.argmin(values))]


def _finish(
    method: str,
    forward: Forward,
    r_y_lags: Sequence[float],
    params: EffectiveParams,
    d: float,
    started: float,
    options: SolverOptions,
) -> RecoveryResult:
    # residuals are evaluated at the returned point
    residuals = [
        _safe_criterion(forward, float(r), params.p0, float(p_l), d) for r, p_l in zip(r_y_lags, params.p_l)
    ]
    return RecoveryResult(
        method=method,
        p0_star=params.p0,
        p_hat=[float(p_l) for p_l in params.p_l],
        residuals=residuals,
        wall_time_s=time.perf_counter() - started,
        seed=options.seed,
    )


def solve_fast(
    method: str,
    r_y_lags: Sequence[float],
    mu_hat: float,
    d: float,
    options: SolverOptions = SolverOptions(),
    initial: Optional[RecoveryResult] = None,
) -> RecoveryResult:
    """
    Fast recovery: p0 fixed by the sample mean, then one scalar search per
    lag over [-p0 (1 - eps), p0 (1 - eps)].

    Gauss-Legendre and Monte-Carlo criteria are unimodal and get a single
    golden-section search; the Padé criterion is searched in n_brackets
    sub-intervals and the best one wins. A previous result narrows each
    lag's bracket to +-25% of p0 around its estimate.
    """
    if method not in RecoveryMethod.FAST:
        raise ValueError(f"{method} is not a single-variable method; use solve_full_pa for pade_full")
    started = time.perf_counter()
    p0_star = estimate_p0(mu_hat, d)
    forward = forward_model(method, options)
    bound = p0_star * (1.0 - options.eps)
    splits = options.n_brackets if method == RecoveryMethod.PADE_FAST else 1

    def solve_lag(index):
        r = float(r_y_lags[index])

        def objective(p_l):
            return _safe_criterion(forward, r, p0_star, p_l, d)

        if initial is not None and index < len(initial.p_hat):
            centre = clip_feasible(p0_star, initial.p_hat[index], options.eps)
            lo = max(-bound, centre - 0.25 * p0_star)
            hi = min(bound, centre + 0.25 * p0_star)
            p_l = _bracket_search(objective, lo, hi, splits, options)
            at_edge = (abs(p_l - lo) < 1e-6 * p0_star and lo > -bound) or (
                abs(p_l - hi) < 1e-6 * p0_star and hi < bound
            )
            if not at_edge:
                return p_l
        return _bracket_search(objective, -bound, bound, splits, options)

    p_hat = [clip_feasible(p0_star, p, options.eps) for p in _run_lags(solve_lag, len(r_y_lags), options.max_workers)]
    logger.debug(f"{method}: p0*={p0_star:.5f}, {len(p_hat)} lags solved")
    return _finish(method, forward, r_y_lags, EffectiveParams(p0_star, np.array(p_hat)), d, started, options)


def _project(x: np.ndarray, eps: float) -> np.ndarray:
    p0 = max(float(x[0]), eps)
    return np.array([p0, clip_feasible(p0, float(x[1]), eps)])


def _descend(objective, start: np.ndarray, options: SolverOptions) -> Tuple[np.ndarray, float, bool, int]:
    """Projected normalized-gradient descent with Armijo backtracking."""
    x = _project(start, options.eps)
    fx = objective(x)
    if not math.isfinite(fx):
        return x, fx, False, 0

    step = 0.1 * x[0]
    for iteration in range(1, options.max_iter + 1):
        grad = np.zeros(2)
        for i in range(2):
            h = 1e-6 * max(1.0, abs(x[i]))
            e = np.zeros(2)
            e[i] = h
            up = _project(x + e, options.eps)
            down = _project(x - e, options.eps)
            spread = up[i] - down[i]
            if spread <= 0.0:
                continue
            grad[i] = (objective(up) - objective(down)) / spread
        if not np.all(np.isfinite(grad)):
            return x, fx, False, iteration
        norm = float(np.linalg.norm(grad))
        if norm == 0.0:
            return x, fx, True, iteration

        direction = -grad / norm
        t = min(2.0 * step, x[0])
        accepted = None
        while t >= 1e-14:
            candidate = _project(x + t * direction, options.eps)
            fc = objective(candidate)
            if fc <= fx - 1e-4 * t * norm:
                accepted = (candidate, fc)
                break
            t /= 2.0
        if accepted is None:
            return x, fx, True, iteration

        moved = float(np.linalg.norm(accepted[0] - x))
        x, fx = accepted
        step = t
        if moved < options.step_tol or fx <= 2.0 * math.log(EXACT_FIT):
            return x, fx, True, iteration
    return x, fx, False, options.max_iter


def solve_full_pa(
    r_y_lags: Sequence[float],
    d: float,
    options: SolverOptions = SolverOptions(),
) -> RecoveryResult:
    """
    Two-variable recovery with the Padé forward model: per lag, multi-start
    projected gradient descent over {p0 >= eps, |p_l| <= p0 (1 - eps)}.

    p0 is reported as the median of the per-lag estimates. Each p_l is then
    re-solved at that p0 with the multi-bracket scalar search, so the
    reported residuals describe the returned point.

    Raises:
        ConvergenceError: every start failed for some lag.
    """
    if len(r_y_lags) == 0:
        raise ValueError("r_y_lags must not be empty")
    if d == 0.0:
        raise UnidentifiableVarianceError(
            "at d = 0 the model depends on p_l / p0 only; p0 is not identifiable"
        )
    started = time.perf_counter()
    forward = forward_model(RecoveryMethod.PADE_FULL, options)
    rng = np.random.Generator(np.random.Philox(key=options.seed))
    p0_starts = rng.uniform(0.1, 3.0, size=(len(r_y_lags), options.n_starts)) * options.p0_scale
    ratio_starts = rng.uniform(-1.0, 1.0, size=(len(r_y_lags), options.n_starts))

    def solve_lag(index):
        r = float(r_y_lags[index])

        def objective(x):
            return _safe_criterion(forward, r, float(x[0]), float(x[1]), d)

        best = None
        diagnostics = []
        for s in range(options.n_starts):
            start = np.array([p0_starts[index, s], ratio_starts[index, s] * p0_starts[index, s]])
            x, fx, converged, iterations = _descend(objective, start, options)
            diagnostics.append(
                {"start": start.tolist(), "end": x.tolist(), "criterion": fx,
                 "converged": converged, "iterations": iterations}
            )
            if converged and math.isfinite(fx) and (best is None or fx < best[1]):
                best = (x, fx)
        if best is None:
            raise ConvergenceError(f"all {options.n_starts} starts failed at lag {index + 1}", diagnostics)
        logger.debug(f"lag {index + 1}: p0={best[0][0]:.5f} p_l={best[0][1]:.5f} C={best[1]:.3f}")
        return best

    outcomes = _run_lags(solve_lag, len(r_y_lags), options.max_workers)
    p0_star = float(np.median([x[0] for x, _ in outcomes]))
    bound = p0_star * (1.0 - options.eps)

    def refit_lag(index):
        r = float(r_y_lags[index])
        p_l = _bracket_search(
            lambda p: _safe_criterion(forward, r, p0_star, p, d), -bound, bound, options.n_brackets, options
        )
        return clip_feasible(p0_star, p_l, options.eps)

    p_hat = _run_lags(refit_lag, len(r_y_lags), options.max_workers)
    logger.debug(f"pade_full: p0*={p0_star:.5f} from {len(outcomes)} lags")
    return _finish(
        RecoveryMethod.PADE_FULL, forward, r_y_lags, EffectiveParams(p0_star, np.array(p_hat)), d, started, options
    )


def map_to_input(result: RecoveryResult, sigma: float) -> RecoveryResult:
    """
    Input statistics from the effective ones, R_x = P - Sigma: with a
    diagonal Sigma only the variance changes.
    """
    r0_hat = result.p0_star - sigma
    nonpositive = r0_hat <= 0.0
    if nonpositive:
        logger.warning(
            f"recovered input variance {r0_hat:.4g} <= 0 (p0*={result.p0_star:.4g}, sigma={sigma:.4g})"
        )
    return result.model_copy(
        update={"r0_hat": r0_hat, "r_hat": list(result.p_hat), "r0_nonpositive": nonpositive}
    )


def nmse(r0: float, r0_hat: float) -> float:
    """|r0 - r0_hat|^2 / |r0|^2."""
    if r0 == 0.0:
        raise DomainError("NMSE is undefined for r0 = 0")
    return abs(r0 - r0_hat) ** 2 / abs(r0) ** 2


def mse(truth, estimate) -> float:
    """Mean squared error over an experiments x lags table."""
    truth = np.asarray(truth, dtype=float)
    estimate = np.asarray(estimate, dtype=float)
    if truth.shape != estimate.shape:
        raise ValueError(f"shape mismatch {truth.shape} vs {estimate.shape}")
    return float(np.mean(np.abs(truth - estimate) ** 2))


def criterion_landscape(
    forward: Forward, r_y_l: float, d: float, p0_grid: Sequence[float], pl_grid: Sequence[float]
) -> np.ndarray:
    """Criterion over a (p0, p_l) grid; +inf where infeasible or failing."""
    grid = np.full((len(p0_grid), len(pl_grid)), np.inf)
    for i, p0 in enumerate(p0_grid):
        for j, p_l in enumerate(pl_grid):
            if p0 > 0.0 and abs(p_l) < p0:
                grid[i, j] = _safe_criterion(forward, r_y_l, float(p0), float(p_l), d)
    return grid


def count_local_minima(grid: np.ndarray) -> int:
    """Interior cells strictly below all eight neighbours."""
    grid = np.asarray(grid, dtype=float)
    count = 0
    for i in range(1, grid.shape[0] - 1):
        for j in range(1, grid.shape[1] - 1):
            centre = grid[i, j]
            if not np.isfinite(centre):
                continue
            block = grid[i - 1 : i + 2, j - 1 : j + 2].copy()
            block[1, 1] = np.inf
            if centre < block.min():
                count += 1
    return count


def count_slope_sign_changes(values: Sequence[float]) -> int:
    """Sign changes of the finite-difference slope of a 1-D profile."""
    slopes = np.sign(np.diff(np.asarray(values, dtype=float)))
    slopes = slopes[slopes != 0]
    return int(np.count_nonzero(slopes[1:] != slopes[:-1]))


def recover(
    method: str,
    r_y_lags: Sequence[float],
    mu_hat: float,
    d: float,
    options: SolverOptions = SolverOptions(),
    initial: Optional[RecoveryResult] = None,
) -> RecoveryResult:
    """Dispatch to the full or fast path by method name."""
    if method == RecoveryMethod.PADE_FULL:
        return solve_full_pa(r_y_lags, d, options)
    return solve_fast(method, r_y_lags, mu_hat, d, options, initial)
