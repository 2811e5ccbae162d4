"""
Management command to recover the input autocorrelation from one-bit data.
"""

from django.core.management.base import CommandError

from core.exceptions import OneBitError
from core.models import RecoveryMethod
from core.serializers import read_dataset, read_result, write_lag_table, write_pade_dump, write_result
from core.services import ExperimentService
from core.signal_sim import compute_stats

from ._base import ExperimentCommand


class Command(ExperimentCommand):
    """Run each configured recovery method and write its result."""

    help = "Recover input autocorrelation lags with one or more methods"

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument(
            "--dataset",
            type=str,
            help="dataset.csv written by simulate (default: simulate from the config)",
        )
        parser.add_argument(
            "--warm-start",
            type=str,
            help="Result JSON whose lag estimates centre the fast searches",
        )
        parser.add_argument(
            "--dump-pade",
            action="store_true",
            help="Also write the Padé coefficients at lag 1 for Padé methods",
        )

    def handle(self, *args, **options):
        config = self.load_config(options)
        out = self.output_dir(config)

        if options.get("dataset"):
            try:
                dataset = read_dataset(options["dataset"])
            except (OSError, ValueError) as e:
                raise CommandError(f"Cannot read dataset: {e}")
            stats = compute_stats(dataset)
            d, sigma = dataset.d, dataset.sigma
            # truth is only known when the config describes the sampled signal
            truth = ExperimentService.true_lags(config) if options.get("config") else None
        else:
            dataset, stats = ExperimentService.simulate(config)
            d, sigma = config.d, config.sigma
            truth = ExperimentService.true_lags(config)

        lags = config.lags if config.lags is not None else dataset.dimension - 1

        initial = None
        if options.get("warm_start"):
            try:
                initial = read_result(options["warm_start"])
            except (OSError, ValueError) as e:
                raise CommandError(f"Cannot read warm-start result: {e}")
        solver = ExperimentService.solver_options(config)
        outcomes = []
        for method in config.methods:
            outcome = ExperimentService.run_recovery(method, stats, d, sigma, lags, solver, initial)
            outcomes.append(outcome)
            if not outcome["success"]:
                continue
            result = outcome["result"]
            path = write_result(out / f"result_{method}.json", result)
            self.stdout.write(self.style.SUCCESS(f"{method}: wrote {path} ({result.wall_time_s:.2f} s)"))
            if truth is not None:
                write_lag_table(out / f"lags_{method}.csv", truth, result.r_hat)
            if options.get("dump_pade") and method in (RecoveryMethod.PADE_FULL, RecoveryMethod.PADE_FAST):
                try:
                    rows = ExperimentService.pade_coefficients(result, d)
                except OneBitError as e:
                    raise CommandError(f"Padé coefficient dump failed: {e}")
                write_pade_dump(out / f"pade_{method}.csv", rows, result.p0_star, result.p_hat[0], d)

        self.report_failures(outcomes)
