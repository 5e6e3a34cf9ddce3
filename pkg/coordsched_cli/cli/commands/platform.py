"""
Platform command for inspecting platform descriptions.
"""

import argparse
import sys

from coordsched_cli.cli.commands.base import BaseCommand
from coordsched_cli.core.pipeline import StageError, load_platform_file
from coordsched_cli.core.platform.energy import dump_platform
from coordsched_cli.utils.colors import Colors


class PlatformCommand(BaseCommand):
    """Command to inspect platform files."""

    @staticmethod
    def add_arguments(parser: argparse.ArgumentParser) -> None:
        """Add command-specific arguments."""
        actions = parser.add_subparsers(dest="action", help="Platform actions", required=True)
        show = actions.add_parser("show", help="Print units, operating points and scaling references")
        show.add_argument("platform", help="Platform description (.platform)")
        show.add_argument("--canonical", action="store_true", help="Print the canonical .platform text instead")

    def run(self) -> int:
        """Run the platform command."""
        action = self.args.action

        if action == "show":
            return self._show()
        else:
            print(Colors.error(f'Unknown action: {action}', sys.stderr), file=sys.stderr)
            return 1

    def _show(self) -> int:
        try:
            platform, scaling = load_platform_file(self.args.platform)
        except StageError as e:
            return self.fail(e)
        if self.args.canonical:
            print(dump_platform(platform, scaling), end="")
        else:
            print(self.renderer.platform_report(platform, scaling), end="")
        return 0
