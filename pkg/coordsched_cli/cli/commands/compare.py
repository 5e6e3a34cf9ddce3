"""
Compare command: one pipeline run per configuration, side by side.
"""

import argparse
import json

import yaml

from coordsched_cli.cli.commands.base import BaseCommand
from coordsched_cli.core.pipeline import StageError, load_app
from coordsched_cli.core.reporting.compare import load_compare_config, rows_for_modes, run_comparison
from coordsched_cli.core.scheduling.model import SchedulingMode


class CompareCommand(BaseCommand):
    """Compare scheduling modes or ft settings on one application."""

    @staticmethod
    def add_arguments(parser: argparse.ArgumentParser) -> None:
        """Add command-specific arguments."""
        BaseCommand.add_input_arguments(parser)
        BaseCommand.add_scheduler_arguments(parser)
        rows = parser.add_mutually_exclusive_group()
        rows.add_argument(
            "--modes", metavar="LIST",
            help="Comma-separated scheduling modes, e.g. makespan,energy",
        )
        rows.add_argument("--configs", metavar="PATH", help="YAML file with a 'rows:' list")
        parser.add_argument("--jobs", "-j", type=int, default=1, help="Rows to run concurrently")
        parser.add_argument("--json", metavar="PATH", help="Write the comparison rows (JSON)")

    def _rows(self):
        if self.args.configs:
            return load_compare_config(self.args.configs)
        modes = self.args.modes or "makespan,energy"
        return rows_for_modes([SchedulingMode(m.strip()) for m in modes.split(",") if m.strip()])

    def run(self) -> int:
        """Run the compare command."""
        try:
            config = self.scheduler_config()
            rows = self._rows()
        except (OSError, yaml.YAMLError, ValueError) as e:
            return self.bad_usage(f"bad comparison setup: {e}")
        if self.args.jobs < 1:
            return self.bad_usage("--jobs must be >= 1")

        # fail fast on a broken application instead of failing every row
        try:
            graph = load_app(self.args.app)
        except StageError as e:
            return self.fail(e)

        results = run_comparison(
            self.args.app, self.args.platform, self.args.contracts, config, rows,
            jobs=self.args.jobs, follow_objective=self.follow_objective,
        )
        print(self.renderer.comparison_report(graph.app_name, results), end="")

        if self.args.json:
            try:
                with open(self.args.json, "w", encoding="utf-8") as f:
                    json.dump([row.to_dict() for row in results], f, indent=2)
                    f.write("\n")
            except OSError as e:
                return self.bad_usage(f"cannot write {self.args.json}: {e}")
        return 0
