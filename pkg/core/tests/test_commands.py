"""
Tests for the experiment management commands.
"""

import json
import tempfile
from io import StringIO
from pathlib import Path

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from core.serializers import read_dataset

CONFIG = """\
MODEL=ar1
RHO=0.5
N=5
N_X=1000
SEED=7
D=0.3
SIGMA=0.1
METHODS=gauss_legendre
"""


class CommandTestCase(SimpleTestCase):
    config_text = CONFIG

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)
        self.config = self.dir / "experiment.env"
        self.config.write_text(self.config_text)

    def tearDown(self):
        self.tmp.cleanup()

    def call(self, name, out="out", **options):
        stdout = StringIO()
        call_command(name, config=str(self.config), out=str(self.dir / out), stdout=stdout, **options)
        return stdout.getvalue()


class SimulateCommandTests(CommandTestCase):
    def test_writes_dataset_and_stats(self):
        output = self.call("simulate")
        self.assertIn("5x1000", output)
        dataset = read_dataset(self.dir / "out" / "dataset.csv")
        self.assertEqual(dataset.y.shape, (5, 1000))
        stats = (self.dir / "out" / "stats.csv").read_text().splitlines()
        self.assertEqual(stats[0], "lag,r_y_lag,mu_hat")
        self.assertEqual(len(stats), 6)

    def test_deterministic(self):
        self.call("simulate", out="a")
        self.call("simulate", out="b")
        for name in ("dataset.csv", "stats.csv"):
            self.assertEqual((self.dir / "a" / name).read_bytes(), (self.dir / "b" / name).read_bytes())

    def test_seed_flag_wins(self):
        self.call("simulate", out="a")
        self.call("simulate", out="b", seed=8)
        self.assertNotEqual(
            (self.dir / "a" / "dataset.csv").read_bytes(), (self.dir / "b" / "dataset.csv").read_bytes()
        )


class NegativeThresholdTests(CommandTestCase):
    config_text = CONFIG.replace("D=0.3", "D=-20")

    def test_mean_is_one(self):
        self.call("simulate")
        rows = (self.dir / "out" / "stats.csv").read_text().splitlines()[1:]
        self.assertTrue(all(row.endswith(",1.0") for row in rows))


class RecoverCommandTests(CommandTestCase):
    def test_writes_result_and_lag_table(self):
        self.call("recover", method="gauss_legendre")
        result = json.loads((self.dir / "out" / "result_gauss_legendre.json").read_text())
        self.assertEqual(result["method"], "gauss_legendre")
        self.assertEqual(len(result["r_hat"]), 4)
        lines = (self.dir / "out" / "lags_gauss_legendre.csv").read_text().splitlines()
        self.assertEqual(lines[0], "lag,true_r,est_r")
        self.assertEqual(len(lines), 5)

    def test_from_dataset_file(self):
        self.call("simulate")
        stdout = StringIO()
        call_command(
            "recover",
            dataset=str(self.dir / "out" / "dataset.csv"),
            out=str(self.dir / "rec"),
            method="monte_carlo",
            nm=500,
            stdout=stdout,
        )
        self.assertTrue((self.dir / "rec" / "result_monte_carlo.json").exists())
        self.assertFalse((self.dir / "rec" / "lags_monte_carlo.csv").exists())

    def test_pade_dump_and_warm_start(self):
        self.config.write_text(CONFIG + "LAGS=2\n")
        self.call("recover", method="pade_fast", dump_pade=True)
        rows = (self.dir / "out" / "pade_pade_fast.csv").read_text().splitlines()
        self.assertEqual(rows[2], "piece,a0,a1,a2,b0,b1,b2")
        self.assertEqual(len(rows), 9)

        self.call(
            "recover", out="warm", method="gauss_legendre", warm_start=str(self.dir / "out" / "result_pade_fast.json")
        )
        self.assertTrue((self.dir / "warm" / "result_gauss_legendre.json").exists())

    def test_unknown_method(self):
        with self.assertRaises(CommandError):
            self.call("recover", method="simpson")

    def test_failure_names_the_method(self):
        self.config.write_text(CONFIG.replace("D=0.3", "D=0"))
        with self.assertRaisesMessage(CommandError, "gauss_legendre"):
            self.call("recover")


class BenchmarkCommandTests(CommandTestCase):
    config_text = (
        CONFIG.replace("N_X=1000", "N_X=500,2000").replace("METHODS=gauss_legendre", "METHODS=gauss_legendre,monte_carlo")
        + "LAGS=2\nTRIALS=2\nNM=500\n"
    )

    def test_rows_per_method_and_size(self):
        self.call("benchmark")
        lines = (self.dir / "out" / "benchmark.csv").read_text().splitlines()
        self.assertEqual(lines[0], "method,N_x,mse,nmse_r0,wall_time_s")
        self.assertEqual(len(lines), 5)
        self.assertEqual({line.split(",")[0] for line in lines[1:]}, {"gauss_legendre", "monte_carlo"})


class CrosscorrCommandTests(CommandTestCase):
    def test_writes_matrices_and_lags(self):
        self.call("crosscorr")
        out = self.dir / "out"
        for suffix in ("sample", "estimate"):
            lines = (out / f"crosscorr_gauss_legendre_{suffix}.csv").read_text().splitlines()
            self.assertEqual(lines[0], "# N,N,d,sigma,p0")
            self.assertEqual(len(lines), 8)
        lags = (out / "crosscorr_gauss_legendre_lags.csv").read_text().splitlines()
        self.assertEqual(lags[0], "lag,sample_r_yx,est_r_yx")
        sample0, estimate0 = (float(v) for v in lags[1].split(",")[1:])
        self.assertGreater(sample0 * estimate0, 0.0)


class LandscapeCommandTests(CommandTestCase):
    def test_grid_file(self):
        output = self.call("landscape", points=5, lag=1)
        self.assertIn("local minima", output)
        lines = (self.dir / "out" / "landscape_gauss_legendre_lag1.csv").read_text().splitlines()
        self.assertEqual(lines[2], "p0,p_l,criterion")
        self.assertEqual(len(lines), 3 + 5 * 9)

    def test_bad_grid(self):
        with self.assertRaises(CommandError):
            self.call("landscape", points=2)
