"""
Domain types for one-bit covariance recovery.

Plain value objects; the numerical modules build and consume them. Results
and experiment configs that cross a file boundary are pydantic models so
they validate on the way in and serialize on the way out.
"""

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator


class RecoveryMethod:
    """Names of the recovery back-ends."""

    PADE_FULL = "pade_full"
    PADE_FAST = "pade_fast"
    GAUSS_LEGENDRE = "gauss_legendre"
    MONTE_CARLO = "monte_carlo"

    CHOICES = [PADE_FULL, PADE_FAST, GAUSS_LEGENDRE, MONTE_CARLO]
    FAST = [PADE_FAST, GAUSS_LEGENDRE, MONTE_CARLO]


@dataclass(frozen=True)
class SignalModel:
    """Stationary Gaussian input: autocorrelation r_0..r_{N-1}."""

    acf: np.ndarray

    @property
    def dimension(self) -> int:
        return int(len(self.acf))

    @property
    def r0(self) -> float:
        return float(self.acf[0])


@dataclass(frozen=True)
class ThresholdModel:
    """Gaussian time-varying threshold tau ~ N(1 d, sigma I)."""

    d: float
    sigma: float
    dimension: int

    def __post_init__(self):
        if self.sigma < 0.0:
            raise ValueError(f"threshold variance must be >= 0, got {self.sigma}")


@dataclass
class SignDataset:
    """
    One-bit samples y (N x N_x, entries +-1) with the threshold realizations
    that produced them. Inputs x are kept only when requested, for oracle
    checks.
    """

    y: np.ndarray
    tau: Optional[np.ndarray]
    seed: int
    d: float
    sigma: float
    x: Optional[np.ndarray] = None

    @property
    def dimension(self) -> int:
        return int(self.y.shape[0])

    @property
    def n_snapshots(self) -> int:
        return int(self.y.shape[1])


@dataclass
class SampleStats:
    """Sample statistics of a SignDataset."""

    r_y_hat: np.ndarray
    r_y_lag: np.ndarray
    mu_hat: float
    r_ytau_hat: Optional[np.ndarray] = None


@dataclass(frozen=True)
class EffectiveParams:
    """Variance p0 and lag autocorrelations p_1..p_L of w = x - tau."""

    p0: float
    p_l: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        if self.p0 <= 0.0:
            raise ValueError(f"p0 must be positive, got {self.p0}")
        if np.any(np.abs(self.p_l) >= self.p0):
            raise ValueError("every |p_l| must be strictly below p0")


class RecoveryResult(BaseModel):
    """Outcome of one recovery run across all requested lags."""

    method: str
    p0_star: float
    p_hat: List[float]
    r0_hat: Optional[float] = None
    r_hat: List[float] = Field(default_factory=list)
    residuals: List[float] = Field(default_factory=list)
    wall_time_s: float = 0.0
    seed: Optional[int] = None
    r0_nonpositive: bool = False

    @field_validator("method")
    @classmethod
    def validate_method(cls, value):
        if value not in RecoveryMethod.CHOICES:
            raise ValueError(f"unknown method '{value}'")
        return value


class ExperimentConfig(BaseModel):
    """
    Settings for one experiment run, read from a KEY=VALUE file and
    overridden by command-line flags.
    """

    # signal
    model: str = "ar1"
    rho: float = 0.5
    r0: float = 1.0
    n: int = Field(default=32, ge=1)
    lags: Optional[int] = Field(default=None, ge=1)
    # threshold
    d: float = 0.3
    sigma: float = Field(default=0.1, ge=0.0)
    # sampling
    n_x: List[int] = Field(default_factory=lambda: [10000])
    seed: int = 0
    trials: int = Field(default=1, ge=1)
    # recovery
    methods: List[str] = Field(default_factory=lambda: [RecoveryMethod.GAUSS_LEGENDRE])
    nq: int = Field(default=13, ge=1, le=64)
    nm: int = Field(default=2000, ge=1)
    n_starts: int = Field(default=20, ge=1)
    max_iter: int = Field(default=1000, ge=1)
    max_workers: int = Field(default=1, ge=1)
    # output
    out: str = "results"

    @field_validator("n_x", "methods", mode="before")
    @classmethod
    def split_lists(cls, value):
        if isinstance(value, str):
            return [item.strip() for item in value.split(",") if item.strip()]
        return value

    @field_validator("model")
    @classmethod
    def validate_model(cls, value):
        if value not in ("ar1", "white"):
            raise ValueError(f"unknown signal model '{value}'")
        return value

    @field_validator("rho")
    @classmethod
    def validate_rho(cls, value):
        if not -1.0 < value < 1.0:
            raise ValueError("rho must lie in (-1, 1)")
        return value

    @field_validator("r0")
    @classmethod
    def validate_r0(cls, value):
        if value <= 0.0:
            raise ValueError("r0 must be positive")
        return value

    @field_validator("methods")
    @classmethod
    def validate_methods(cls, value):
        for method in value:
            if method not in RecoveryMethod.CHOICES:
                raise ValueError(
                    f"unknown method '{method}', choose from {', '.join(RecoveryMethod.CHOICES)}"
                )
        return value

    @field_validator("n_x")
    @classmethod
    def validate_n_x(cls, value):
        if not value or any(v < 1 for v in value):
            raise ValueError("n_x must be a non-empty list of positive integers")
        return value

    @model_validator(mode="after")
    def validate_lags(self):
        if self.lags is not None and self.lags > self.n - 1:
            raise ValueError(f"lags ({self.lags}) must be below the signal dimension n ({self.n})")
        return self

    @property
    def lag_count(self) -> int:
        return self.lags if self.lags is not None else max(self.n - 1, 0)
