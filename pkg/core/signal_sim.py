"""
Simulation of stationary Gaussian signals sampled by one-bit comparators
against Gaussian time-varying thresholds, and the sample statistics the
recovery pipeline consumes.
"""

import logging

import numpy as np
from scipy.linalg import toeplitz

from .exceptions import MissingInputsError, NonPSDModelError
from .models import SampleStats, SignalModel, SignDataset, ThresholdModel

logger = logging.getLogger(__name__)

PSD_JITTER = 1e-10


def ar1_acf(rho: float, r0: float, lags: int) -> np.ndarray:
    """Autocorrelation r_l = r0 * rho^l, l = 0..lags, of an AR(1) process."""
    if not -1.0 < rho < 1.0:
        raise ValueError(f"AR(1) coefficient must satisfy |rho| < 1, got {rho}")
    if r0 <= 0.0:
        raise ValueError(f"r0 must be positive, got {r0}")
    return r0 * rho ** np.arange(lags + 1, dtype=float)


def _cholesky_factor(acf: np.ndarray) -> np.ndarray:
    matrix = toeplitz(acf)
    r0 = float(acf[0])
    if r0 <= 0.0:
        raise NonPSDModelError(f"r0 must be positive, got {r0}")
    try:
        return np.linalg.cholesky(matrix + PSD_JITTER * r0 * np.eye(len(acf)))
    except np.linalg.LinAlgError as e:
        raise NonPSDModelError(
            f"autocorrelation sequence does not define a PSD Toeplitz matrix: {e}"
        ) from e


def toeplitz_from_acf(acf) -> np.ndarray:
    """
    Symmetric Toeplitz matrix T(i, j) = acf(|i - j|).

    Raises:
        NonPSDModelError: if T fails the jittered Cholesky test.
    """
    acf = np.asarray(acf, dtype=float)
    if acf.ndim != 1 or acf.size == 0:
        raise ValueError("acf must be a non-empty 1-D sequence")
    _cholesky_factor(acf)
    return toeplitz(acf)


def sample_dataset(
    signal: SignalModel,
    threshold: ThresholdModel,
    n_snapshots: int,
    seed: int,
    keep_inputs: bool = False,
) -> SignDataset:
    """
    Draw n_snapshots independent snapshots x(k) ~ N(0, R_x) and thresholds
    tau(k) ~ N(1 d, sigma I), and one-bit sample y = sign(x - tau).

    Randomness comes from a Philox counter-based generator keyed by the
    seed: signal normals are drawn first (snapshot-major), then threshold
    normals, so a seed fixes the dataset bit for bit. sign(0) is +1.
    """
    if signal.dimension != threshold.dimension:
        raise ValueError(
            f"signal dimension {signal.dimension} != threshold dimension {threshold.dimension}"
        )
    if n_snapshots < 1:
        raise ValueError("n_snapshots must be positive")

    factor = _cholesky_factor(np.asarray(signal.acf, dtype=float))
    n = signal.dimension

    rng = np.random.Generator(np.random.Philox(key=seed))
    x = factor @ rng.standard_normal((n_snapshots, n)).T
    tau = threshold.d + np.sqrt(threshold.sigma) * rng.standard_normal((n_snapshots, n)).T
    y = np.where(x - tau >= 0.0, 1, -1).astype(np.int8)

    logger.debug(f"sampled dataset N={n} N_x={n_snapshots} seed={seed}")
    return SignDataset(
        y=y,
        tau=tau,
        seed=seed,
        d=threshold.d,
        sigma=threshold.sigma,
        x=x if keep_inputs else None,
    )


def sample_autocorr(dataset: SignDataset) -> SampleStats:
    """
    Sample covariance (1/N_x) sum_k y(k) y(k)^T and its stationarity-averaged
    lag sequence (mean of each diagonal).
    """
    y = dataset.y.astype(float)
    r_y_hat = (y @ y.T) / dataset.n_snapshots
    r_y_lag = np.array([np.diagonal(r_y_hat, offset=l).mean() for l in range(dataset.dimension)])
    return SampleStats(r_y_hat=r_y_hat, r_y_lag=r_y_lag, mu_hat=sample_mean(dataset))


def sample_mean(dataset: SignDataset) -> float:
    """Snapshot mean of y, averaged over the N entries."""
    return float(dataset.y.astype(float).mean(axis=1).mean())


def sample_crosscorr(dataset: SignDataset, against: str = "thresholds") -> np.ndarray:
    """
    Sample cross-correlation (1/N_x) sum_k y(k) v(k)^T with v the thresholds
    or the inputs.

    Raises:
        MissingInputsError: inputs requested but not retained.
    """
    if against == "thresholds":
        other = dataset.tau
    elif against == "inputs":
        other = dataset.x
        if other is None:
            raise MissingInputsError("dataset was sampled without keep_inputs=True")
    else:
        raise ValueError(f"against must be 'thresholds' or 'inputs', got '{against}'")
    return (dataset.y.astype(float) @ other.T) / dataset.n_snapshots


def compute_stats(dataset: SignDataset) -> SampleStats:
    """All statistics the recovery and Bussgang stages need."""
    stats = sample_autocorr(dataset)
    if dataset.tau is not None:
        stats.r_ytau_hat = sample_crosscorr(dataset, "thresholds")
    return stats
