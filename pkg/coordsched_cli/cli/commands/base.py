"""
Base command class for all CLI commands.
"""

import argparse
import logging
import sys
from abc import ABC, abstractmethod
from typing import Iterable, Optional

from coordsched_cli.config.global_config import GlobalConfig, load_global_config
from coordsched_cli.core.dsl.diagnostics import Diagnostic
from coordsched_cli.core.pipeline import ExitCode, StageError
from coordsched_cli.core.reporting.render import ReportRenderer
from coordsched_cli.core.scheduling.model import SchedulerConfig, SchedulingMode
from coordsched_cli.utils.colors import Colors

logger = logging.getLogger(__name__)


class BaseCommand(ABC):
    """Base class for all CLI commands."""

    def __init__(self, args: argparse.Namespace, global_config: Optional[GlobalConfig] = None):
        """
        Initialize the command.

        Args:
            args: Parsed command line arguments
            global_config: Tool configuration; loaded from --config or the working directory when omitted
        """
        self.args = args
        self.logger = logging.getLogger(self.__class__.__name__)
        self.global_config = global_config or load_global_config(getattr(args, "config", None))
        self.renderer = ReportRenderer(gantt_width=self.global_config.gantt_width)

    @abstractmethod
    def run(self) -> int:
        """
        Run the command.

        Returns:
            Exit code (see ExitCode)
        """
        pass

    @staticmethod
    @abstractmethod
    def add_arguments(parser: argparse.ArgumentParser) -> None:
        """
        Add command-specific arguments to the parser.

        Args:
            parser: Argument parser to add arguments to
        """
        pass

    @staticmethod
    def add_input_arguments(parser: argparse.ArgumentParser) -> None:
        parser.add_argument("app", help="Application source (.coord)")
        parser.add_argument("--platform", "-p", required=True, help="Platform description (.platform)")
        parser.add_argument("--contracts", "-c", required=True, help="Non-functional contracts (.contracts)")

    @staticmethod
    def add_scheduler_arguments(parser: argparse.ArgumentParser) -> None:
        parser.add_argument(
            "--mode",
            choices=[m.value for m in SchedulingMode],
            help="Scheduler to use (default: follow the application objective)",
        )
        parser.add_argument("--deadline-override", type=float, metavar="MS", help="Replace the declared deadline")
        parser.add_argument(
            "--energy-budget", type=float, metavar="MJ",
            help="Cap the total energy per cycle; makespan scheduling then trades speed for energy",
        )
        parser.add_argument("--use-average", action="store_true", help="Use average-case instead of worst-case figures")
        parser.add_argument("--no-ft", action="store_true", help="Ignore ft annotations")
        parser.add_argument(
            "--ft-distinct-units", action="store_true", help="Keep replicas of one component on distinct units"
        )
        parser.add_argument("--comm-cost", type=float, metavar="MS", help="Token latency added on every edge")
        parser.add_argument("--seed", type=int, help="Reserved; every solver is deterministic")

    def scheduler_config(self) -> SchedulerConfig:
        """
        Build the per-run scheduler settings from flags and the tool configuration.

        Raises:
            ValueError: a flag value is out of range
        """
        if getattr(self.args, "seed", None) is not None:
            self.logger.debug(f"--seed {self.args.seed} ignored: solvers are deterministic")
        comm_cost = getattr(self.args, "comm_cost", None)
        return SchedulerConfig(
            mode=SchedulingMode(getattr(self.args, "mode", None) or SchedulingMode.ENERGY),
            use_average=getattr(self.args, "use_average", False),
            ft_distinct_units=getattr(self.args, "ft_distinct_units", False),
            comm_cost_ms=comm_cost if comm_cost is not None else self.global_config.comm_cost_ms,
            deadline_override_ms=getattr(self.args, "deadline_override", None),
            energy_budget_mj=getattr(self.args, "energy_budget", None),
            voter_wcet_ms=self.global_config.voter_wcet_ms,
            voter_energy_mj=self.global_config.voter_energy_mj,
            exhaustive_max_tasks=self.global_config.exhaustive_max_tasks,
            exhaustive_warn_tasks=self.global_config.exhaustive_warn_tasks,
        )

    @property
    def follow_objective(self) -> bool:
        return getattr(self.args, "mode", None) is None

    def print_diagnostics(self, diagnostics: Iterable[Diagnostic]) -> None:
        """Diagnostics go to stderr as file:line:col: severity: message."""
        for diag in sorted(diagnostics, key=Diagnostic.sort_key):
            print(Colors.diagnostic(diag.render(), diag.severity.value, sys.stderr), file=sys.stderr)

    def fail(self, error: StageError) -> int:
        self.print_diagnostics(error.diagnostics)
        print(Colors.error(f"{error.stage}: {error}", sys.stderr), file=sys.stderr)
        return int(error.exit_code)

    def bad_usage(self, message: str) -> int:
        print(Colors.error(message, sys.stderr), file=sys.stderr)
        return int(ExitCode.IO)
