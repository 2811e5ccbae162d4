"""
Tests for the file formats and config loading.
"""

import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_array_equal

from core.models import RecoveryMethod, RecoveryResult, SignalModel, ThresholdModel
from core.serializers import (
    load_config,
    read_dataset,
    read_result,
    write_benchmark,
    write_dataset,
    write_matrix,
    write_result,
    write_stats,
)
from core.signal_sim import ar1_acf, sample_dataset


class FileFormatTests(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def test_dataset_file(self):
        dataset = sample_dataset(
            SignalModel(acf=ar1_acf(0.5, 1.0, 3)), ThresholdModel(d=0.3, sigma=0.1, dimension=4), 50, seed=7
        )
        path = write_dataset(self.dir / "nested" / "dataset.csv", dataset)
        lines = path.read_text().splitlines()
        self.assertEqual(lines[0], "# N,N_x,seed,d,sigma")
        self.assertEqual(lines[1], "# 4,50,7,0.3,0.1")
        self.assertEqual(len(lines), 6)

        loaded = read_dataset(path)
        assert_array_equal(loaded.y, dataset.y)
        self.assertEqual((loaded.seed, loaded.d, loaded.sigma), (7, 0.3, 0.1))
        self.assertIsNone(loaded.tau)

    def test_rejects_foreign_csv(self):
        path = write_stats(self.dir / "stats.csv", [1.0, 0.2], 0.1)
        with self.assertRaises(ValueError):
            read_dataset(path)

    def test_stats_file(self):
        path = write_stats(self.dir / "stats.csv", [1.0, 0.25], -0.1)
        self.assertEqual(path.read_text().splitlines(), ["lag,r_y_lag,mu_hat", "0,1.0,-0.1", "1,0.25,-0.1"])

    def test_benchmark_file(self):
        rows = [{"method": "gauss_legendre", "N_x": 1000, "mse": 0.01, "nmse_r0": 0.002, "wall_time_s": 0.5}]
        lines = write_benchmark(self.dir / "benchmark.csv", rows).read_text().splitlines()
        self.assertEqual(lines, ["method,N_x,mse,nmse_r0,wall_time_s", "gauss_legendre,1000,0.01,0.002,0.5"])

    def test_matrix_file(self):
        lines = write_matrix(self.dir / "m.csv", np.eye(2), 0.3, 0.1, 1.1).read_text().splitlines()
        self.assertEqual(lines[:3], ["# N,N,d,sigma,p0", "# 2,2,0.3,0.1,1.1", "c0,c1"])
        self.assertEqual(lines[3:], ["1.0,0.0", "0.0,1.0"])

    def test_result_json(self):
        result = RecoveryResult(
            method=RecoveryMethod.PADE_FAST, p0_star=1.1, p_hat=[0.5, 0.2], r0_hat=1.0, r_hat=[0.5, 0.2], seed=3
        )
        self.assertEqual(read_result(write_result(self.dir / "r.json", result)), result)


class ConfigTests(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.path = Path(self.tmp.name) / "experiment.env"
        self.path.write_text("N=5\nN_X=1000,3000\nSEED=7\nmethods=gauss_legendre,monte_carlo\nD=0.3\n")

    def tearDown(self):
        self.tmp.cleanup()

    def test_file_values(self):
        config = load_config(str(self.path))
        self.assertEqual(config.n, 5)
        self.assertEqual(config.n_x, [1000, 3000])
        self.assertEqual(config.methods, [RecoveryMethod.GAUSS_LEGENDRE, RecoveryMethod.MONTE_CARLO])
        self.assertEqual(config.lag_count, 4)

    def test_precedence(self):
        config = load_config(str(self.path), {"seed": 11, "nq": None}, {"seed": 0, "nq": 20, "n": 9})
        self.assertEqual(config.seed, 11)
        self.assertEqual(config.nq, 20)
        self.assertEqual(config.n, 5)

    def test_validation_names_the_field(self):
        with self.assertRaisesMessage(ValueError, "rho"):
            load_config(str(self.path), {"rho": 1.5})
        with self.assertRaisesMessage(ValueError, "lags"):
            load_config(str(self.path), {"lags": 5})

    def test_missing_file(self):
        with self.assertRaises(ValueError):
            load_config(str(self.path) + ".missing")
