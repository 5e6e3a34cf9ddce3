"""
Schedule command: map one application cycle onto a platform.
"""

import argparse
import sys

from coordsched_cli.cli.commands.base import BaseCommand
from coordsched_cli.core.pipeline import RunResult, StageError, run_pipeline
from coordsched_cli.core.reporting.schedule_document import ScheduleDocument, write_document
from coordsched_cli.utils.colors import Colors


class ScheduleCommand(BaseCommand):
    """Compute a schedule without simulating it."""

    simulate = False

    @staticmethod
    def add_arguments(parser: argparse.ArgumentParser) -> None:
        """Add command-specific arguments."""
        BaseCommand.add_input_arguments(parser)
        BaseCommand.add_scheduler_arguments(parser)
        parser.add_argument("--json", metavar="PATH", help="Write the schedule document (JSON)")

    def run(self) -> int:
        """Run the schedule command."""
        try:
            config = self.scheduler_config()
        except ValueError as e:
            return self.bad_usage(str(e))

        try:
            result = run_pipeline(
                self.args.app, self.args.platform, self.args.contracts, config,
                no_ft=self.args.no_ft,
                run_simulator=self.simulate,
                follow_objective=self.follow_objective,
            )
        except StageError as e:
            return self.fail(e)

        self.print_diagnostics(result.warnings)
        print(self.renderer.run_report(
            result.schedule, result.report, result.manifest, result.cost_model.platform.unit_names
        ), end="")
        return self.write_outputs(result)

    def write_outputs(self, result: RunResult) -> int:
        if self.args.json:
            document = ScheduleDocument.from_schedule(result.schedule, result.manifest)
            try:
                write_document(document, self.args.json)
            except OSError as e:
                return self.bad_usage(f"cannot write {self.args.json}: {e}")
            self.logger.info(f"Schedule written to {self.args.json}")
        print(Colors.success(
            f"{result.schedule.app_name}: makespan {result.schedule.predicted_makespan_ms:.3f} ms, "
            f"total {result.schedule.predicted_total_mj:.3f} mJ",
            sys.stderr,
        ), file=sys.stderr)
        return 0
