"""
Run command: check, expand-ft, schedule and simulate in one go.
"""

import argparse

from coordsched_cli.cli.commands.schedule import ScheduleCommand
from coordsched_cli.core.pipeline import RunResult
from coordsched_cli.core.reporting.schedule_document import SimulationDocument, write_document
from coordsched_cli.core.simulation.simulator import write_trace


class RunCommand(ScheduleCommand):
    """Full pipeline including the simulated cycle."""

    simulate = True

    @staticmethod
    def add_arguments(parser: argparse.ArgumentParser) -> None:
        """Add command-specific arguments."""
        ScheduleCommand.add_arguments(parser)
        parser.add_argument("--report-json", metavar="PATH", help="Write the simulation report (JSON)")
        parser.add_argument("--trace", metavar="PATH", help="Write the event trace (JSON lines)")

    def write_outputs(self, result: RunResult) -> int:
        try:
            if self.args.report_json:
                write_document(SimulationDocument.from_report(result.report, result.graph.app_name), self.args.report_json)
            if self.args.trace:
                write_trace(result.report, self.args.trace)
        except OSError as e:
            return self.bad_usage(f"cannot write output: {e}")
        return super().write_outputs(result)
