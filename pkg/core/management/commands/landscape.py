"""
Management command to tabulate the recovery criterion over a (p0, p_l) grid.
"""

import numpy as np
from django.core.management.base import CommandError

from core.recovery import count_local_minima
from core.serializers import write_landscape
from core.services import ExperimentService

from ._base import ExperimentCommand


class Command(ExperimentCommand):
    """Criterion surface at one lag, for inspecting local minima."""

    help = "Write the criterion log|R_y(l) - model(p0, p_l)|^2 over a grid"

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("--lag", type=int, default=1, help="Lag l (default 1)")
        parser.add_argument("--p0-min", type=float, default=0.1)
        parser.add_argument("--p0-max", type=float, default=3.0)
        parser.add_argument("--points", type=int, default=41, help="Grid points per axis")

    def handle(self, *args, **options):
        config = self.load_config(options)
        out = self.output_dir(config)
        if options["points"] < 3:
            raise CommandError("--points must be at least 3")
        if not 0.0 < options["p0_min"] < options["p0_max"]:
            raise CommandError("need 0 < --p0-min < --p0-max")

        p0_grid = np.linspace(options["p0_min"], options["p0_max"], options["points"])
        pl_grid = np.linspace(-options["p0_max"], options["p0_max"], 2 * options["points"] - 1)
        method = config.methods[0]
        outcome = ExperimentService.landscape(config, method, options["lag"], p0_grid, pl_grid)
        self.report_failures([outcome])

        path = write_landscape(
            out / f"landscape_{method}_lag{options['lag']}.csv",
            p0_grid,
            pl_grid,
            outcome["grid"],
            outcome["r_y_l"],
            config.d,
        )
        self.stdout.write(
            self.style.SUCCESS(f"Wrote {path} ({count_local_minima(outcome['grid'])} local minima)")
        )
