"""
Readers and writers for every file the commands produce or consume.

All CSV files carry '#'-prefixed metadata lines, then one schema line, then
comma-separated rows with '.' decimals. Recovery results are JSON.
"""

import csv
import logging
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np
from dotenv import dotenv_values
from pydantic import ValidationError

from .models import ExperimentConfig, RecoveryResult, SignDataset

logger = logging.getLogger(__name__)

DATASET_META = "N,N_x,seed,d,sigma"


def _ensure_parent(path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _write_rows(path, schema: Sequence[str], rows: Iterable[Sequence], meta: Sequence[str] = ()) -> Path:
    path = _ensure_parent(path)
    with open(path, "w", newline="") as f:
        for line in meta:
            f.write(f"# {line}\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(schema)
        for row in rows:
            writer.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    logger.debug(f"wrote {path}")
    return path


def write_dataset(path, dataset: SignDataset) -> Path:
    """One-bit samples, one row per entry of y (N rows x N_x columns)."""
    path = _ensure_parent(path)
    meta = f"{dataset.dimension},{dataset.n_snapshots},{dataset.seed},{dataset.d!r},{dataset.sigma!r}"
    with open(path, "w", newline="") as f:
        f.write(f"# {DATASET_META}\n# {meta}\n")
        np.savetxt(f, dataset.y, fmt="%d", delimiter=",")
    return path


def read_dataset(path) -> SignDataset:
    """Inverse of write_dataset; thresholds are not stored."""
    with open(path) as f:
        header = f.readline().lstrip("#").strip()
        values = f.readline().lstrip("#").strip()
    if header != DATASET_META:
        raise ValueError(f"{path} is not a dataset file (header '{header}')")
    n, n_x, seed, d, sigma = values.split(",")
    y = np.loadtxt(path, delimiter=",", comments="#", dtype=np.int8, ndmin=2)
    if y.shape != (int(n), int(n_x)):
        raise ValueError(f"{path}: expected {n}x{n_x} samples, found {y.shape[0]}x{y.shape[1]}")
    return SignDataset(y=y, tau=None, seed=int(seed), d=float(d), sigma=float(sigma))


def write_stats(path, r_y_lag: Sequence[float], mu_hat: float) -> Path:
    rows = [(lag, float(value), float(mu_hat)) for lag, value in enumerate(r_y_lag)]
    return _write_rows(path, ("lag", "r_y_lag", "mu_hat"), rows)


def write_lag_table(path, true_r: Sequence[float], est_r: Sequence[float]) -> Path:
    """Lags 1..L of the true and recovered input autocorrelation."""
    rows = [(lag + 1, float(t), float(e)) for lag, (t, e) in enumerate(zip(true_r, est_r))]
    return _write_rows(path, ("lag", "true_r", "est_r"), rows)


def write_benchmark(path, rows: List[Dict]) -> Path:
    schema = ("method", "N_x", "mse", "nmse_r0", "wall_time_s")
    return _write_rows(path, schema, ([row[key] for key in schema] for row in rows))


def write_pade_dump(path, coefficient_rows: List[List], p0: float, p_l: float, d: float) -> Path:
    return _write_rows(
        path,
        ("piece", "a0", "a1", "a2", "b0", "b1", "b2"),
        coefficient_rows,
        meta=("p0,p_l,d", f"{p0!r},{p_l!r},{d!r}"),
    )


def write_matrix(path, matrix, d: float, sigma: float, p0: float) -> Path:
    """Row-major square matrix."""
    matrix = np.asarray(matrix, dtype=float)
    return _write_rows(
        path,
        [f"c{j}" for j in range(matrix.shape[1])],
        matrix.tolist(),
        meta=("N,N,d,sigma,p0", f"{matrix.shape[0]},{matrix.shape[1]},{d!r},{sigma!r},{p0!r}"),
    )


def write_crosscorr_lags(path, sample: np.ndarray, estimate: np.ndarray) -> Path:
    """Diagonal means of the sample and estimated cross-correlation, lags 0..N-1."""
    rows = [
        (lag, float(np.diagonal(sample, offset=lag).mean()), float(np.diagonal(estimate, offset=lag).mean()))
        for lag in range(sample.shape[0])
    ]
    return _write_rows(path, ("lag", "sample_r_yx", "est_r_yx"), rows)


def write_landscape(path, p0_grid, pl_grid, grid: np.ndarray, r_y_l: float, d: float) -> Path:
    rows = [
        (float(p0), float(p_l), float(grid[i, j]))
        for i, p0 in enumerate(p0_grid)
        for j, p_l in enumerate(pl_grid)
    ]
    return _write_rows(path, ("p0", "p_l", "criterion"), rows, meta=("r_y_l,d", f"{r_y_l!r},{d!r}"))


def write_result(path, result: RecoveryResult) -> Path:
    path = _ensure_parent(path)
    path.write_text(result.model_dump_json(indent=2))
    return path


def read_result(path) -> RecoveryResult:
    return RecoveryResult.model_validate_json(Path(path).read_text())


def load_config(
    path: Optional[str] = None, overrides: Optional[Dict] = None, defaults: Optional[Dict] = None
) -> ExperimentConfig:
    """
    ExperimentConfig from defaults, then a KEY=VALUE file (keys
    case-insensitive), then overrides; overrides that are None are ignored.

    Raises:
        ValueError: unreadable file or a field failing validation.
    """
    values = dict(defaults or {})
    if path:
        if not Path(path).is_file():
            raise ValueError(f"config file not found: {path}")
        values.update(
            {key.lower(): value for key, value in dotenv_values(path).items() if value is not None}
        )
    values.update({key: value for key, value in (overrides or {}).items() if value is not None})
    try:
        return ExperimentConfig(**values)
    except ValidationError as e:
        errors = "; ".join(f"{'.'.join(map(str, err['loc']))}: {err['msg']}" for err in e.errors())
        raise ValueError(f"invalid experiment config: {errors}") from e
