"""
Tests for the recovery solvers and error measures.
"""

import math
from unittest import mock

import numpy as np
from django.test import SimpleTestCase

from core.exceptions import (
    ApproximationBreakdownError,
    ConvergenceError,
    DomainError,
    UnidentifiableVarianceError,
)
from core.models import EffectiveParams, RecoveryMethod, RecoveryResult
from core.pade import h_s
from core.quad_mc import GLRule, f_s, j_s
from core.recovery import (
    CRITERION_FLOOR,
    SolverOptions,
    count_local_minima,
    count_slope_sign_changes,
    criterion,
    criterion_landscape,
    estimate_p0,
    forward_model,
    golden_section,
    map_to_input,
    mse,
    nmse,
    solve_fast,
    solve_full_pa,
)
from core.special_fn import q

P0 = 1.1
D = 0.3
TRUE_LAGS = [0.5, 0.25, 0.125]


def threshold_mean(p0, d):
    return 2.0 * q(d / math.sqrt(p0)) - 1.0


class VarianceEstimateTests(SimpleTestCase):
    def test_inverts_the_threshold_law(self):
        for p0, d in ((1.1, 0.3), (0.5, 0.7), (2.0, -0.4)):
            self.assertAlmostEqual(estimate_p0(threshold_mean(p0, d), d), p0, delta=1e-8)

    def test_unidentifiable(self):
        with self.assertRaises(UnidentifiableVarianceError):
            estimate_p0(0.0, 0.3)
        with self.assertRaises(UnidentifiableVarianceError):
            estimate_p0(-0.2, 0.0)
        with self.assertRaises(UnidentifiableVarianceError):
            estimate_p0(1.0, 0.3)

    def test_wrong_sign_is_logged(self):
        with self.assertLogs("core.recovery", level="WARNING"):
            estimate_p0(0.2, 0.3)


class CriterionTests(SimpleTestCase):
    def test_exact_fit_hits_floor(self):
        forward = forward_model(RecoveryMethod.GAUSS_LEGENDRE)
        self.assertEqual(criterion(forward, forward(1.0, 0.3, D), 1.0, 0.3, D), CRITERION_FLOOR)

    def test_log_squared_residual(self):
        forward = forward_model(RecoveryMethod.GAUSS_LEGENDRE)
        value = criterion(forward, forward(1.0, 0.3, D) + 0.01, 1.0, 0.3, D)
        self.assertAlmostEqual(value, 2.0 * math.log(0.01), places=8)

    def test_unknown_method(self):
        with self.assertRaises(ValueError):
            forward_model("simpson")

    def test_golden_section(self):
        self.assertAlmostEqual(golden_section(lambda x: (x - 0.3) ** 2, -1.0, 1.0, 1e-10), 0.3, delta=1e-8)
        self.assertAlmostEqual(golden_section(lambda x: abs(x + 0.7), 1.0, -1.0, 1e-10), -0.7, delta=1e-8)


class FastRecoveryTests(SimpleTestCase):
    def synthetic(self, forward):
        return [forward(P0, p_l, D) for p_l in TRUE_LAGS], threshold_mean(P0, D)

    def test_gauss_legendre_inverse_crime(self):
        r_y, mu = self.synthetic(lambda p0, p_l, d: j_s(p0, p_l, d, GLRule(13)))
        result = solve_fast(RecoveryMethod.GAUSS_LEGENDRE, r_y, mu, D)
        self.assertAlmostEqual(result.p0_star, P0, delta=1e-8)
        np.testing.assert_allclose(result.p_hat, TRUE_LAGS, atol=1e-6)
        self.assertEqual(result.method, RecoveryMethod.GAUSS_LEGENDRE)
        self.assertEqual(len(result.residuals), 3)

    def test_monte_carlo_inverse_crime(self):
        r_y, mu = self.synthetic(lambda p0, p_l, d: f_s(p0, p_l, d, 2000, 0))
        result = solve_fast(RecoveryMethod.MONTE_CARLO, r_y, mu, D)
        np.testing.assert_allclose(result.p_hat, TRUE_LAGS, atol=1e-6)

    def test_pade_inverse_crime(self):
        r_y, mu = self.synthetic(h_s)
        result = solve_fast(RecoveryMethod.PADE_FAST, r_y[:2], mu, D)
        np.testing.assert_allclose(result.p_hat, TRUE_LAGS[:2], atol=1e-5)

    def test_parabolic_search(self):
        r_y, mu = self.synthetic(j_s)
        result = solve_fast(RecoveryMethod.GAUSS_LEGENDRE, r_y, mu, D, SolverOptions(parabolic=True))
        np.testing.assert_allclose(result.p_hat, TRUE_LAGS, atol=1e-5)

    def test_parallel_lags_match_serial(self):
        r_y, mu = self.synthetic(j_s)
        serial = solve_fast(RecoveryMethod.GAUSS_LEGENDRE, r_y, mu, D)
        parallel = solve_fast(RecoveryMethod.GAUSS_LEGENDRE, r_y, mu, D, SolverOptions(max_workers=3))
        self.assertEqual(serial.p_hat, parallel.p_hat)

    def test_warm_start(self):
        r_y, mu = self.synthetic(j_s)
        cold = solve_fast(RecoveryMethod.GAUSS_LEGENDRE, r_y, mu, D)
        warm = solve_fast(RecoveryMethod.GAUSS_LEGENDRE, r_y, mu, D, initial=cold)
        np.testing.assert_allclose(warm.p_hat, TRUE_LAGS, atol=1e-6)
        far = cold.model_copy(update={"p_hat": [-0.5, -0.5, -0.5]})
        widened = solve_fast(RecoveryMethod.GAUSS_LEGENDRE, r_y, mu, D, initial=far)
        np.testing.assert_allclose(widened.p_hat, TRUE_LAGS, atol=1e-6)

    def test_unidentifiable_at_zero_threshold_mean(self):
        with self.assertRaises(UnidentifiableVarianceError):
            solve_fast(RecoveryMethod.GAUSS_LEGENDRE, [0.3], 0.0, 0.0)

    def test_full_method_rejected(self):
        with self.assertRaises(ValueError):
            solve_fast(RecoveryMethod.PADE_FULL, [0.3], -0.2, D)

    def test_criteria_unimodal_along_lag(self):
        grid = np.linspace(-0.9 * P0, 0.9 * P0, 400)
        for method in (RecoveryMethod.GAUSS_LEGENDRE, RecoveryMethod.MONTE_CARLO):
            forward = forward_model(method)
            r_y = forward(P0, 0.4, D)
            profile = [criterion(forward, r_y, P0, p_l, D) for p_l in grid]
            self.assertEqual(count_slope_sign_changes(profile), 1, msg=method)

    def test_unknown_method_rejected(self):
        with self.assertRaises(ValueError):
            solve_fast("simpson", [0.3], -0.2, D)

    def test_residuals_describe_the_estimate(self):
        r_y, mu = self.synthetic(j_s)
        r_y = [r + 1e-3 for r in r_y]
        result = solve_fast(RecoveryMethod.GAUSS_LEGENDRE, r_y, mu, D)
        forward = forward_model(RecoveryMethod.GAUSS_LEGENDRE)
        for r, p_l, value in zip(r_y, result.p_hat, result.residuals):
            self.assertAlmostEqual(value, criterion(forward, r, result.p0_star, p_l, D), places=12)


class FullRecoveryTests(SimpleTestCase):
    options = SolverOptions(n_starts=4, max_iter=300, seed=5)

    def test_residual_inverse_crime(self):
        r_y = [h_s(P0, p_l, D) for p_l in TRUE_LAGS[:2]]
        result = solve_full_pa(r_y, D, self.options)
        self.assertEqual(result.method, RecoveryMethod.PADE_FULL)
        self.assertTrue(all(value < 2.0 * math.log(1e-4) for value in result.residuals))
        for p_l in result.p_hat:
            self.assertLess(abs(p_l), result.p0_star)

    def test_residuals_describe_the_estimate(self):
        r_y = [h_s(P0, p_l, D) for p_l in TRUE_LAGS]
        result = solve_full_pa(r_y, D, self.options)
        forward = forward_model(RecoveryMethod.PADE_FULL)
        self.assertEqual(len(result.residuals), 3)
        for r, p_l, value in zip(r_y, result.p_hat, result.residuals):
            self.assertAlmostEqual(value, criterion(forward, r, result.p0_star, p_l, D), places=12)
            self.assertLess(value, 2.0 * math.log(1e-4))

    def test_all_starts_failing(self):
        with mock.patch("core.recovery.h_s", side_effect=ApproximationBreakdownError("out of range")):
            with self.assertRaises(ConvergenceError) as ctx:
                solve_full_pa([0.3], D, self.options)
        self.assertEqual(len(ctx.exception.diagnostics), 4)

    def test_zero_threshold_mean(self):
        with self.assertRaises(UnidentifiableVarianceError):
            solve_full_pa([0.3], 0.0, self.options)

    def test_slower_than_fast_path(self):
        r_y = [h_s(P0, p_l, D) for p_l in TRUE_LAGS[:2]]
        full = solve_full_pa(r_y, D, SolverOptions(n_starts=8, max_iter=300, seed=5))
        fast = solve_fast(RecoveryMethod.PADE_FAST, r_y, threshold_mean(P0, D), D)
        self.assertGreaterEqual(full.wall_time_s, 2.0 * fast.wall_time_s)


class LandscapeTests(SimpleTestCase):
    def test_full_criterion_has_several_local_minima(self):
        for method in (RecoveryMethod.PADE_FULL, RecoveryMethod.GAUSS_LEGENDRE):
            with self.subTest(method=method):
                self.check_several_local_minima(forward_model(method))

    def check_several_local_minima(self, forward):
        r_y = forward(P0, 0.5, D)
        grid = criterion_landscape(forward, r_y, D, np.linspace(0.2, 3.0, 29), np.linspace(-2.9, 2.9, 59))
        self.assertTrue(np.isinf(grid[0, 0]))
        self.assertGreaterEqual(count_local_minima(grid), 2)

    def test_count_local_minima(self):
        grid = np.full((5, 7), 5.0)
        grid[1, 1] = 1.0
        grid[3, 5] = 2.0
        grid[0, 3] = -10.0
        grid[2, 3] = np.inf
        self.assertEqual(count_local_minima(grid), 2)

    def test_count_slope_sign_changes(self):
        self.assertEqual(count_slope_sign_changes([3, 2, 1, 2, 3]), 1)
        self.assertEqual(count_slope_sign_changes([1, 2, 1, 2]), 2)
        self.assertEqual(count_slope_sign_changes([1, 1, 1]), 0)


class ErrorMeasureTests(SimpleTestCase):
    def test_nmse(self):
        self.assertAlmostEqual(nmse(1.0, 0.9), 0.01, places=15)
        self.assertEqual(nmse(2.0, 2.0), 0.0)
        with self.assertRaises(DomainError):
            nmse(0.0, 0.1)

    def test_mse(self):
        self.assertEqual(mse([[1.0, 2.0]], [[1.0, 3.0]]), 0.5)
        self.assertEqual(mse([[1.0], [2.0]], [[1.0], [2.0]]), 0.0)
        with self.assertRaises(ValueError):
            mse([1.0, 2.0], [1.0])


class InputMappingTests(SimpleTestCase):
    def result(self, p0_star):
        return RecoveryResult(method=RecoveryMethod.GAUSS_LEGENDRE, p0_star=p0_star, p_hat=[0.5, 0.2])

    def test_subtracts_threshold_variance(self):
        mapped = map_to_input(self.result(1.1), 0.1)
        self.assertAlmostEqual(mapped.r0_hat, 1.0, places=15)
        self.assertEqual(mapped.r_hat, [0.5, 0.2])
        self.assertFalse(mapped.r0_nonpositive)

    def test_flags_nonpositive_variance(self):
        with self.assertLogs("core.recovery", level="WARNING"):
            mapped = map_to_input(self.result(0.5), 2.0)
        self.assertTrue(mapped.r0_nonpositive)
        self.assertLess(mapped.r0_hat, 0.0)


class EffectiveParamsTests(SimpleTestCase):
    def test_feasible(self):
        params = EffectiveParams(1.1, np.array([0.5, -1.0]))
        self.assertEqual(params.p0, 1.1)

    def test_rejects_infeasible(self):
        with self.assertRaises(ValueError):
            EffectiveParams(0.0)
        with self.assertRaises(ValueError):
            EffectiveParams(1.0, np.array([0.2, 1.0]))
