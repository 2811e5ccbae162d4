"""
Management command to compare recovery methods across sample sizes.
"""

from core.serializers import write_benchmark
from core.services import ExperimentService

from ._base import ExperimentCommand


class Command(ExperimentCommand):
    """Average MSE, r0 NMSE and wall time per method and N_x over repeated trials."""

    help = (
        "Benchmark recovery methods over the configured sample sizes. "
        "Use --timing (or list pade_full,pade_fast in METHODS) to report the full/fast wall-time ratio."
    )

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument(
            "--timing",
            action="store_true",
            help="Also run pade_full and pade_fast and report their wall-time ratio",
        )

    def handle(self, *args, **options):
        config = self.load_config(options)
        out = self.output_dir(config)

        rows = ExperimentService.benchmark(config, timing=options.get("timing", False))
        path = write_benchmark(out / "benchmark.csv", [row for row in rows if row["success"]])
        self.stdout.write(self.style.SUCCESS(f"Wrote {path}"))
        for n_x, ratio in ExperimentService.timing_ratios(rows).items():
            self.stdout.write(f"N_x={n_x}: pade_full / pade_fast wall time = {ratio:.1f}")
        self.report_failures(rows)
