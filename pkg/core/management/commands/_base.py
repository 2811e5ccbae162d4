"""
Flags and config loading shared by the experiment commands.
"""

from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from core.models import ExperimentConfig, RecoveryMethod
from core.serializers import load_config
from core.services import ExperimentService


class ExperimentCommand(BaseCommand):
    """Base for commands driven by an ExperimentConfig."""

    def add_arguments(self, parser):
        parser.add_argument("--config", type=str, help="KEY=VALUE experiment config file")
        parser.add_argument("--seed", type=int, help="Base random seed")
        parser.add_argument("--out", type=str, help="Output directory")
        parser.add_argument(
            "--method",
            type=str,
            choices=RecoveryMethod.CHOICES,
            help="Recovery method (overrides the config's method list)",
        )
        parser.add_argument("--nq", type=int, help="Gauss-Legendre nodes (default 13)")
        parser.add_argument("--nm", type=int, help="Monte-Carlo nodes (default 2000)")

    def load_config(self, options) -> ExperimentConfig:
        overrides = {
            "seed": options.get("seed"),
            "out": options.get("out"),
            "nq": options.get("nq"),
            "nm": options.get("nm"),
            "methods": [options["method"]] if options.get("method") else None,
        }
        try:
            return load_config(options.get("config"), overrides, ExperimentService.config_defaults())
        except ValueError as e:
            raise CommandError(str(e))

    def output_dir(self, config: ExperimentConfig) -> Path:
        path = Path(config.out)
        path.mkdir(parents=True, exist_ok=True)
        return path

    def report_failures(self, outcomes):
        """Raise CommandError naming every failed method, if any."""
        failed = [o for o in outcomes if not o["success"]]
        if failed:
            raise CommandError(
                "; ".join(f"{o['method']}: {o['error']}" for o in failed)
            )
