"""
Simulate command: replay a stored schedule document.
"""

import argparse
import sys

from pydantic import ValidationError

from coordsched_cli.cli.commands.base import BaseCommand
from coordsched_cli.core.pipeline import (
    ExitCode,
    StageError,
    load_app,
    load_contracts_file,
    load_platform_file,
    prepare_graph,
    run_simulation,
)
from coordsched_cli.core.reporting.manifest import RunManifest
from coordsched_cli.core.reporting.schedule_document import (
    ScheduleDocument,
    SimulationDocument,
    read_schedule_json,
    write_document,
)
from coordsched_cli.core.scheduling.costs import CostModel
from coordsched_cli.core.simulation.simulator import write_trace
from coordsched_cli.utils.colors import Colors


class SimulateCommand(BaseCommand):
    """Replay a schedule produced by `schedule --json` or `run --json`."""

    @staticmethod
    def add_arguments(parser: argparse.ArgumentParser) -> None:
        """Add command-specific arguments."""
        BaseCommand.add_input_arguments(parser)
        parser.add_argument("--schedule", "-s", required=True, help="Schedule document (JSON)")
        parser.add_argument(
            "--use-average", action="store_true",
            help="Replay with average-case figures (data-driven when the schedule used worst case)",
        )
        parser.add_argument("--no-ft", action="store_true", help="Ignore ft annotations")
        parser.add_argument("--comm-cost", type=float, metavar="MS", help="Token latency added on every edge")
        parser.add_argument("--json", metavar="PATH", help="Write the simulation report (JSON)")
        parser.add_argument("--trace", metavar="PATH", help="Write the event trace (JSON lines)")

    def _read_document(self) -> ScheduleDocument:
        try:
            return read_schedule_json(self.args.schedule)
        except OSError as e:
            raise StageError("simulate", f"cannot read {self.args.schedule}: {e.strerror or e}", ExitCode.IO) from e
        except ValidationError as e:
            raise StageError(
                "simulate", f"{self.args.schedule} is not a schedule document: {e.error_count()} error(s)\n{e}",
                ExitCode.IO,
            ) from e

    def _check_drift(self, document: ScheduleDocument) -> None:
        recorded = document.to_manifest()
        if recorded is None:
            self.logger.warning(f"{self.args.schedule} carries no run manifest, input drift is not checked")
            return
        current = RunManifest.capture(self.args.app, self.args.platform, self.args.contracts)
        drift = recorded.drift(current)
        if drift:
            raise StageError("simulate", "inputs changed since scheduling:\n  " + "\n  ".join(drift), ExitCode.DRIFT)

    def run(self) -> int:
        """Run the simulate command."""
        try:
            document = self._read_document()
            graph = load_app(self.args.app)
            platform, scaling = load_platform_file(self.args.platform)
            contracts = load_contracts_file(self.args.contracts)
            self._check_drift(document)

            recorded = document.manifest.config if document.manifest else {}
            no_ft = self.args.no_ft or bool(recorded.get("no_ft", False))
            expanded, warnings = prepare_graph(graph, no_ft=no_ft)
            if self.args.comm_cost is not None:
                comm_cost = self.args.comm_cost
            else:
                comm_cost = float(recorded.get("comm_cost_ms", self.global_config.comm_cost_ms))

            cost_model = CostModel(
                platform, contracts, scaling,
                use_average=self.args.use_average or document.use_average,
                voter_wcet_ms=float(recorded.get("voter_wcet_ms", self.global_config.voter_wcet_ms)),
                voter_energy_mj=float(recorded.get("voter_energy_mj", self.global_config.voter_energy_mj)),
            )
            schedule = document.to_schedule()
            report = run_simulation(expanded, schedule, cost_model, comm_cost)
        except StageError as e:
            return self.fail(e)

        self.print_diagnostics(warnings)
        print(self.renderer.run_report(schedule, report, units=platform.unit_names), end="")

        try:
            if self.args.json:
                write_document(SimulationDocument.from_report(report, schedule.app_name), self.args.json)
            if self.args.trace:
                write_trace(report, self.args.trace)
        except OSError as e:
            return self.bad_usage(f"cannot write output: {e}")

        verdict = "met" if report.deadline_met else "missed"
        message = f"simulated makespan {report.makespan_ms:.3f} ms, total {report.total_mj:.3f} mJ, deadline {verdict}"
        print(Colors.verdict(message, report.deadline_met, sys.stderr), file=sys.stderr)
        return 0
