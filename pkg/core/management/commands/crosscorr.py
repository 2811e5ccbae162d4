"""
Management command to recover the input/output cross-correlation.
"""

from core.serializers import write_crosscorr_lags, write_matrix
from core.services import ExperimentService

from ._base import ExperimentCommand


class Command(ExperimentCommand):
    """Write the sample R_yx next to its modified Bussgang estimate."""

    help = "Recover the input/output cross-correlation with the modified Bussgang law"

    def handle(self, *args, **options):
        config = self.load_config(options)
        out = self.output_dir(config)

        outcomes = []
        for method in config.methods:
            outcome = ExperimentService.crosscorr(config, method)
            outcomes.append(outcome)
            if not outcome["success"]:
                continue
            p0 = outcome["result"].p0_star
            write_matrix(out / f"crosscorr_{method}_sample.csv", outcome["sample"], config.d, config.sigma, p0)
            write_matrix(out / f"crosscorr_{method}_estimate.csv", outcome["estimate"], config.d, config.sigma, p0)
            path = write_crosscorr_lags(out / f"crosscorr_{method}_lags.csv", outcome["sample"], outcome["estimate"])
            self.stdout.write(self.style.SUCCESS(f"{method}: wrote {path}"))

        self.report_failures(outcomes)
