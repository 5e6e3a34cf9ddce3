"""
coordsched CLI Tool

Checks coordination-language applications, schedules them onto
heterogeneous DVFS platforms and simulates the resulting cycle.
"""

import argparse
import logging
import sys
from typing import Optional, Sequence

from coordsched_cli import __version__
from coordsched_cli.cli.commands.check import CheckCommand
from coordsched_cli.cli.commands.compare import CompareCommand
from coordsched_cli.cli.commands.platform import PlatformCommand
from coordsched_cli.cli.commands.run import RunCommand
from coordsched_cli.cli.commands.schedule import ScheduleCommand
from coordsched_cli.cli.commands.simulate import SimulateCommand
from coordsched_cli.core.pipeline import ExitCode
from coordsched_cli.utils.colors import Colors
from coordsched_cli.utils.logging import setup_logging

COMMANDS = {
    "check": CheckCommand,
    "schedule": ScheduleCommand,
    "simulate": SimulateCommand,
    "run": RunCommand,
    "compare": CompareCommand,
    "platform": PlatformCommand,
}


def create_parser():
    """Create the main argument parser."""
    parser = argparse.ArgumentParser(
        prog="coordsched",
        description="coordsched - energy-aware scheduling of coordinated streaming applications",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  coordsched check apps/vision/vision.coord                 # Validate an application
  coordsched check apps/vision/vision.coord --expand-ft     # Validate after ft expansion
  coordsched schedule apps/vision/vision.coord -p configs/odroid_like.platform \\
      -c configs/vision.contracts --json vision.schedule.json
  coordsched simulate apps/vision/vision.coord -p configs/odroid_like.platform \\
      -c configs/vision.contracts --schedule vision.schedule.json
  coordsched run apps/wifi/wifi_forkjoin.coord -p configs/odroid_like.platform \\
      -c configs/wifi.contracts                             # Full pipeline
  coordsched compare apps/vision/vision.coord -p configs/odroid_like.platform \\
      -c configs/vision.contracts --modes makespan,energy   # Compare schedulers
  coordsched platform show configs/odroid_like.platform     # Inspect a platform

Exit codes:
  0 success, 1 diagnostics, 2 I/O or usage error, 3 platform/contracts error,
  4 infeasible, 5 simulation violation, 6 input drift, 130 interrupted
        """
    )

    parser.add_argument(
        "--version",
        action="version",
        version=f"coordsched v{__version__}"
    )

    parser.add_argument(
        "--verbose", "-v",
        action="store_true",
        help="Enable verbose output"
    )

    parser.add_argument(
        "--quiet", "-q",
        action="store_true",
        help="Suppress output except errors"
    )

    parser.add_argument(
        "--log-file",
        help="Also write log records to this file"
    )

    parser.add_argument(
        "--config",
        help="Tool configuration file (default: ./coordsched-config.yml)"
    )

    subparsers = parser.add_subparsers(
        dest="command",
        help="Available commands",
        required=True
    )

    check_parser = subparsers.add_parser(
        "check",
        help="Parse and validate an application"
    )
    CheckCommand.add_arguments(check_parser)

    schedule_parser = subparsers.add_parser(
        "schedule",
        help="Schedule one application cycle"
    )
    ScheduleCommand.add_arguments(schedule_parser)

    simulate_parser = subparsers.add_parser(
        "simulate",
        help="Replay a stored schedule"
    )
    SimulateCommand.add_arguments(simulate_parser)

    run_parser = subparsers.add_parser(
        "run",
        help="Check, schedule and simulate"
    )
    RunCommand.add_arguments(run_parser)

    compare_parser = subparsers.add_parser(
        "compare",
        help="Compare configurations side by side"
    )
    CompareCommand.add_arguments(compare_parser)

    platform_parser = subparsers.add_parser(
        "platform",
        help="Inspect platform descriptions"
    )
    PlatformCommand.add_arguments(platform_parser)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point for the CLI."""
    parser = create_parser()
    args = parser.parse_args(argv)

    # Setup logging
    log_level = logging.INFO
    if args.verbose:
        log_level = logging.DEBUG
    elif args.quiet:
        log_level = logging.ERROR

    setup_logging(log_level, args.log_file)
    logger = logging.getLogger(__name__)

    try:
        command_class = COMMANDS.get(args.command)
        if command_class is None:
            parser.print_help()
            return 1

        command = command_class(args)
        return command.run()

    except KeyboardInterrupt:
        print(f"\n{Colors.warning('Operation cancelled by user', sys.stderr)}", file=sys.stderr)
        return int(ExitCode.INTERRUPTED)
    except Exception as e:
        logger.error(f"Unexpected error: {e}")
        if args.verbose:
            import traceback
            traceback.print_exc()
        return 1


if __name__ == "__main__":
    sys.exit(main())
