"""
Check command: parse and validate a .coord application.
"""

import argparse
from pathlib import Path

from coordsched_cli.cli.commands.base import BaseCommand
from coordsched_cli.core.dsl.parser import parse_app_file
from coordsched_cli.core.dsl.printer import format_app
from coordsched_cli.core.graph.model import dump_graph
from coordsched_cli.core.pipeline import StageError, load_app, prepare_graph
from coordsched_cli.utils.colors import Colors


class CheckCommand(BaseCommand):
    """Check soundness of a streaming network."""

    @staticmethod
    def add_arguments(parser: argparse.ArgumentParser) -> None:
        """Add command-specific arguments."""
        parser.add_argument("app", help="Application source (.coord)")
        ft = parser.add_mutually_exclusive_group()
        ft.add_argument("--expand-ft", action="store_true", help="Also run fault-tolerance expansion")
        ft.add_argument("--no-ft", action="store_true", help="Ignore ft annotations")
        parser.add_argument(
            "--dump-graph", metavar="PATH",
            help="Write the (expanded) graph as JSON; '-' prints it",
        )
        parser.add_argument("--format", action="store_true", help="Print the canonical source")

    def run(self) -> int:
        """Run the check command."""
        try:
            graph = load_app(self.args.app)
            warnings = list(graph.warnings)
            if self.args.expand_ft or self.args.no_ft:
                graph, warnings = prepare_graph(graph, no_ft=self.args.no_ft)
        except StageError as e:
            return self.fail(e)

        self.print_diagnostics(warnings)

        if self.args.format:
            # load_app succeeded, so the declaration parses
            print(format_app(parse_app_file(self.args.app)), end="")

        if self.args.dump_graph:
            document = dump_graph(graph)
            if self.args.dump_graph == "-":
                print(document)
            else:
                try:
                    Path(self.args.dump_graph).write_text(document + "\n", encoding="utf-8")
                except OSError as e:
                    return self.bad_usage(f"cannot write {self.args.dump_graph}: {e}")
                self.logger.info(f"Graph written to {self.args.dump_graph}")

        if not self.args.format and self.args.dump_graph != "-":
            print(Colors.success(f"{graph.app_name}: {len(graph)} tasks, {len(graph.edges)} edges, sound"))
        return 0
