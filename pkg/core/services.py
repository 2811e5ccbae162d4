"""
Services running the one-bit experiments behind the management commands.
"""

import logging
import concurrent.futures
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from django.conf import settings
from scipy.linalg import toeplitz

from .bussgang import recover_crosscorr
from .exceptions import OneBitError
from .models import (
    ExperimentConfig,
    RecoveryMethod,
    RecoveryResult,
    SampleStats,
    SignalModel,
    SignDataset,
    ThresholdModel,
)
from .pade import build_piecewise
from .recovery import (
    SolverOptions,
    criterion_landscape,
    forward_model,
    map_to_input,
    mse,
    nmse,
    recover,
)
from .signal_sim import ar1_acf, compute_stats, sample_crosscorr, sample_dataset

logger = logging.getLogger(__name__)


class ExperimentService:
    """Service class for simulating one-bit data and recovering its input statistics."""

    @staticmethod
    def config_defaults() -> Dict[str, Any]:
        """Config values taken from project settings, below file and flags."""
        return {
            "nq": settings.ONEBIT_NQ,
            "nm": settings.ONEBIT_NM,
            "seed": settings.ONEBIT_SEED,
            "max_workers": settings.ONEBIT_MAX_WORKERS,
            "out": settings.ONEBIT_OUTPUT_DIR,
        }

    @staticmethod
    def solver_options(config: ExperimentConfig) -> SolverOptions:
        return SolverOptions(
            n_q=config.nq,
            n_m=config.nm,
            mc_seed=config.seed,
            eps=settings.ONEBIT_FEASIBILITY_EPS,
            n_starts=config.n_starts,
            max_iter=config.max_iter,
            seed=config.seed,
            max_workers=config.max_workers,
        )

    @staticmethod
    def build_models(config: ExperimentConfig) -> Tuple[SignalModel, ThresholdModel]:
        """Signal and threshold models described by a config."""
        if config.model == "ar1":
            acf = ar1_acf(config.rho, config.r0, config.n - 1)
        else:
            acf = np.zeros(config.n)
            acf[0] = config.r0
        return SignalModel(acf=acf), ThresholdModel(d=config.d, sigma=config.sigma, dimension=config.n)

    @staticmethod
    def true_lags(config: ExperimentConfig) -> np.ndarray:
        """True input autocorrelation at lags 1..L."""
        signal, _ = ExperimentService.build_models(config)
        return np.asarray(signal.acf[1 : config.lag_count + 1], dtype=float)

    @staticmethod
    def simulate(
        config: ExperimentConfig, n_x: Optional[int] = None, seed: Optional[int] = None, keep_inputs: bool = False
    ) -> Tuple[SignDataset, SampleStats]:
        """Sample one dataset and its statistics."""
        signal, threshold = ExperimentService.build_models(config)
        dataset = sample_dataset(
            signal,
            threshold,
            n_x if n_x is not None else config.n_x[0],
            config.seed if seed is None else seed,
            keep_inputs=keep_inputs,
        )
        return dataset, compute_stats(dataset)

    @staticmethod
    def run_recovery(
        method: str,
        stats: SampleStats,
        d: float,
        sigma: float,
        lags: int,
        options: SolverOptions,
        initial: Optional[RecoveryResult] = None,
    ) -> Dict[str, Any]:
        """
        Recover lags 1..L with one method and map them to the input.

        Returns:
            {"success": True, "result": RecoveryResult, "method": ...} or
            {"success": False, "error": message, "method": ...}
        """
        if lags < 1 or lags > len(stats.r_y_lag) - 1:
            return {
                "success": False,
                "error": f"lags must lie in 1..{len(stats.r_y_lag) - 1}, got {lags}",
                "method": method,
            }
        try:
            result = recover(method, stats.r_y_lag[1 : lags + 1], stats.mu_hat, d, options, initial)
            return {"success": True, "result": map_to_input(result, sigma), "method": method}
        except OneBitError as e:
            logging.error(f"Recovery with {method} failed: {str(e)}")
            return {"success": False, "error": str(e), "method": method}

    @staticmethod
    def run_methods(config: ExperimentConfig, stats: SampleStats, d: float, sigma: float) -> List[Dict[str, Any]]:
        """Every configured method on the same statistics."""
        options = ExperimentService.solver_options(config)
        return [
            ExperimentService.run_recovery(method, stats, d, sigma, config.lag_count, options)
            for method in config.methods
        ]

    @staticmethod
    def benchmark_methods(config: ExperimentConfig, timing: bool = False) -> List[str]:
        """Configured methods, plus the Padé full/fast pair when a timing ratio is wanted."""
        methods = list(config.methods)
        if timing:
            methods += [m for m in (RecoveryMethod.PADE_FULL, RecoveryMethod.PADE_FAST) if m not in methods]
        return methods

    @staticmethod
    def benchmark(config: ExperimentConfig, timing: bool = False) -> List[Dict[str, Any]]:
        """
        MSE of the lags, NMSE of r0 and wall time per method and sample size,
        averaged over config.trials datasets seeded seed, seed + 1, ...
        Rows also carry mse_std, the spread of the per-trial MSE.

        Methods that fail on any trial are reported with an error instead of
        a row.
        """
        truth = ExperimentService.true_lags(config)
        r0 = config.r0
        methods = ExperimentService.benchmark_methods(config, timing)
        options = ExperimentService.solver_options(config)
        # trials run in parallel, so the lags inside each trial run serially
        options.max_workers = 1
        rows = []

        for n_x in config.n_x:

            def trial(e, n_x=n_x):
                _, stats = ExperimentService.simulate(config, n_x=n_x, seed=config.seed + e)
                return [
                    ExperimentService.run_recovery(method, stats, config.d, config.sigma, config.lag_count, options)
                    for method in methods
                ]

            with concurrent.futures.ThreadPoolExecutor(max_workers=config.max_workers) as executor:
                outcomes = list(executor.map(trial, range(config.trials)))

            for index, method in enumerate(methods):
                per_trial = [outcome[index] for outcome in outcomes]
                failed = [o for o in per_trial if not o["success"]]
                if failed:
                    rows.append({"success": False, "error": failed[0]["error"], "method": method, "N_x": n_x})
                    continue
                results = [o["result"] for o in per_trial]
                trial_mse = [mse(truth, r.r_hat) for r in results]
                rows.append(
                    {
                        "success": True,
                        "method": method,
                        "N_x": n_x,
                        "mse": mse(np.tile(truth, (len(results), 1)), [r.r_hat for r in results]),
                        "mse_std": float(np.std(trial_mse, ddof=1)) if len(trial_mse) > 1 else 0.0,
                        "nmse_r0": float(np.mean([nmse(r0, r.r0_hat) for r in results])),
                        "wall_time_s": float(np.mean([r.wall_time_s for r in results])),
                    }
                )
                logger.info(f"benchmark {method} N_x={n_x}: mse={rows[-1]['mse']:.3e}")
        return rows

    @staticmethod
    def timing_ratios(rows: List[Dict[str, Any]]) -> Dict[int, float]:
        """Mean wall time of pade_full over pade_fast per N_x, where both succeeded."""
        times = {
            (row["method"], row["N_x"]): row["wall_time_s"] for row in rows if row["success"]
        }
        ratios = {}
        for (method, n_x), full in times.items():
            fast = times.get((RecoveryMethod.PADE_FAST, n_x))
            if method == RecoveryMethod.PADE_FULL and fast:
                ratios[n_x] = full / fast
        return ratios

    @staticmethod
    def crosscorr(config: ExperimentConfig, method: str) -> Dict[str, Any]:
        """
        Sample input/output cross-correlation next to the modified Bussgang
        estimate built from a recovered input covariance.
        """
        dataset, stats = ExperimentService.simulate(config, keep_inputs=True)
        lags = config.n - 1
        outcome = ExperimentService.run_recovery(
            method, stats, config.d, config.sigma, lags, ExperimentService.solver_options(config)
        )
        if not outcome["success"]:
            return outcome
        result = outcome["result"]
        r_x_hat = toeplitz(np.concatenate([[result.r0_hat], result.r_hat]))
        try:
            estimate = recover_crosscorr(stats.r_ytau_hat, r_x_hat, config.sigma, result.p0_star, config.d)
        except OneBitError as e:
            logging.error(f"Cross-correlation recovery failed: {str(e)}")
            return {"success": False, "error": str(e), "method": method}
        return {
            "success": True,
            "method": method,
            "result": result,
            "sample": sample_crosscorr(dataset, "inputs"),
            "estimate": estimate,
        }

    @staticmethod
    def pade_coefficients(result: RecoveryResult, d: float, lag: int = 1) -> List[List]:
        """Coefficient rows of the piecewise Padé model at one recovered lag."""
        p_l = result.p_hat[lag - 1]
        return build_piecewise(result.p0_star, p_l, d).coefficient_rows()

    @staticmethod
    def landscape(
        config: ExperimentConfig, method: str, lag: int, p0_grid, pl_grid
    ) -> Dict[str, Any]:
        """Criterion surface over (p0, p_l) for the sample autocorrelation at one lag."""
        if not 1 <= lag <= config.n - 1:
            return {"success": False, "error": f"lag must lie in 1..{config.n - 1}", "method": method}
        _, stats = ExperimentService.simulate(config)
        r_y_l = float(stats.r_y_lag[lag])
        forward = forward_model(method, ExperimentService.solver_options(config))
        grid = criterion_landscape(forward, r_y_l, config.d, p0_grid, pl_grid)
        return {"success": True, "method": method, "r_y_l": r_y_l, "grid": grid}
