"""
Numerical forward models: Gauss-Legendre (j_s) and Monte-Carlo (f_s)
evaluation of the D2 - D1 integral over [0, pi/2].
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .arcsine_core import HALF_PI, assemble, check_feasible, integrands
from .special_fn import legendre_nodes_weights

DEFAULT_NQ = 13
DEFAULT_NM = 2000


@dataclass(frozen=True)
class GLRule:
    """Gauss-Legendre rule mapped to [0, pi/2]."""

    n_q: int = DEFAULT_NQ

    @property
    def nodes(self) -> np.ndarray:
        return legendre_nodes_weights(self.n_q)[0]

    @property
    def weights(self) -> np.ndarray:
        return legendre_nodes_weights(self.n_q)[1]

    @property
    def theta(self) -> np.ndarray:
        return math.pi / 4.0 * (self.nodes + 1.0)


def j_s(p0: float, p_l: float, d: float, rule: GLRule = GLRule()) -> float:
    """
    Gauss-Legendre approximation of R_y(l):
    prefactor * (closed_term + (pi/4) sum w_i (D2 - D1)(theta_i)) - 1.
    """
    check_feasible(p0, p_l)
    if d == 0.0:
        return assemble(p0, p_l, d, 0.0, 0.0)
    d1_val, d2_val = integrands(rule.theta, p0, p_l, d)
    scale = math.pi / 4.0
    return assemble(
        p0, p_l, d, scale * float(np.dot(rule.weights, d2_val)), scale * float(np.dot(rule.weights, d1_val))
    )


@lru_cache(maxsize=64)
def _mc_nodes(n_m: int, seed: int) -> np.ndarray:
    rng = np.random.Generator(np.random.Philox(key=seed))
    nodes = rng.uniform(0.0, HALF_PI, size=n_m)
    nodes.setflags(write=False)
    return nodes


def mc_nodes(n_m: int, seed: int) -> np.ndarray:
    """
    Uniform nodes on [0, pi/2], drawn once per (n_m, seed) and reused so a
    recovery optimizes a fixed smooth objective.
    """
    if n_m < 1:
        raise ValueError(f"n_m must be positive, got {n_m}")
    return _mc_nodes(int(n_m), int(seed))


def f_s(p0: float, p_l: float, d: float, n_m: int = DEFAULT_NM, seed: int = 0) -> float:
    """
    Monte-Carlo approximation of R_y(l):
    prefactor * (closed_term + (pi / 2 n_m) sum (D2 - D1)(theta_i)) - 1.
    """
    check_feasible(p0, p_l)
    if d == 0.0:
        return assemble(p0, p_l, d, 0.0, 0.0)
    d1_val, d2_val = integrands(mc_nodes(n_m, seed), p0, p_l, d)
    scale = HALF_PI / n_m
    return assemble(p0, p_l, d, scale * float(np.sum(d2_val)), scale * float(np.sum(d1_val)))
