"""
Management command to sample a one-bit dataset.
"""

from core.serializers import write_dataset, write_stats
from core.services import ExperimentService

from ._base import ExperimentCommand


class Command(ExperimentCommand):
    """Sample y = sign(x - tau) and write it with its statistics."""

    help = "Simulate one-bit samples and write dataset.csv and stats.csv"

    def handle(self, *args, **options):
        config = self.load_config(options)
        out = self.output_dir(config)

        dataset, stats = ExperimentService.simulate(config)
        dataset_path = write_dataset(out / "dataset.csv", dataset)
        stats_path = write_stats(out / "stats.csv", stats.r_y_lag, stats.mu_hat)

        self.stdout.write(
            self.style.SUCCESS(
                f"Wrote {dataset.dimension}x{dataset.n_snapshots} samples to {dataset_path} "
                f"and statistics to {stats_path}"
            )
        )
