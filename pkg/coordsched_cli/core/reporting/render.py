"""
Text reports rendered from Jinja2 templates.

Numbers use fixed en-US formatting with three fraction digits.
"""

import logging
from pathlib import Path
from typing import Any, List, Optional, Sequence

from jinja2 import Environment, FileSystemLoader, StrictUndefined

from coordsched_cli.core.platform.energy import Platform, ScalingModel, platform_rows
from coordsched_cli.core.reporting.compare import ComparisonRow
from coordsched_cli.core.reporting.manifest import RunManifest
from coordsched_cli.core.scheduling.model import Schedule
from coordsched_cli.core.simulation.gantt import gantt
from coordsched_cli.core.simulation.simulator import SimReport

logger = logging.getLogger(__name__)

TEMPLATES_DIR = Path(__file__).parent.parent.parent / "config" / "templates"


def fixed(value: Optional[float], digits: int = 3) -> str:
    if value is None:
        return "-"
    return f"{value:.{digits}f}"


def percent(value: Optional[float]) -> str:
    if value is None:
        return "-"
    return f"{value:+.3f}%"


def format_table(headers: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    """Left-aligned text columns separated by two spaces."""
    cells = [[str(h) for h in headers]] + [[str(c) for c in row] for row in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(headers))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


class ReportRenderer:
    """Renders run, platform and comparison reports."""

    def __init__(self, templates_dir: Path = TEMPLATES_DIR, gantt_width: int = 60):
        self.templates_dir = templates_dir
        self.gantt_width = gantt_width
        self.jinja_env = Environment(
            loader=FileSystemLoader(str(self.templates_dir)),
            trim_blocks=True,
            lstrip_blocks=True,
            keep_trailing_newline=True,
            undefined=StrictUndefined,
        )
        self.jinja_env.filters["fixed"] = fixed
        self.jinja_env.filters["percent"] = percent

    def _render_template(self, template_name: str, **kwargs) -> str:
        """Render a Jinja2 template with the given context."""
        template = self.jinja_env.get_template(template_name)
        return template.render(**kwargs)

    def schedule_table(self, schedule: Schedule) -> str:
        rows = [
            (p.task, p.unit, p.version, p.opp, fixed(p.start_ms), fixed(p.finish_ms))
            for p in schedule.placements
        ]
        return format_table(("task", "unit", "version", "opp", "start_ms", "finish_ms"), rows)

    def unit_table(self, report: SimReport) -> str:
        rows = [
            (unit, fixed(usage.busy_ms), fixed(usage.idle_ms), fixed(usage.dynamic_mj))
            for unit, usage in report.per_unit.items()
        ]
        return format_table(("unit", "busy_ms", "idle_ms", "dynamic_mj"), rows)

    def run_report(
        self,
        schedule: Schedule,
        report: Optional[SimReport] = None,
        manifest: Optional[RunManifest] = None,
        units: Sequence[str] = (),
    ) -> str:
        """
        Schedule table, Gantt chart, energy breakdown and manifest.

        The Gantt chart shows the simulated intervals when a report is given.
        """
        return self._render_template(
            "run_report.txt.j2",
            schedule=schedule,
            table=self.schedule_table(schedule),
            gantt=gantt(report if report is not None else schedule, self.gantt_width, units),
            report=report,
            unit_table=self.unit_table(report) if report is not None else "",
            manifest=manifest.to_yaml() if manifest is not None else "",
        )

    def platform_report(self, platform: Platform, scaling: Optional[ScalingModel] = None) -> str:
        rows = [
            (
                r["unit"], r["type"], fixed(r["static_power_mw"]), r["opp"],
                fixed(r["freq_mhz"]), fixed(r["voltage_v"]), "yes" if r["reference"] else "",
            )
            for r in platform_rows(platform, scaling)
        ]
        table = format_table(("unit", "type", "static_mw", "opp", "freq_mhz", "voltage_v", "reference"), rows)
        return self._render_template(
            "platform_show.txt.j2",
            platform=platform,
            table=table,
            static_mw=fixed(platform.total_static_power_mw),
        )

    def comparison_report(self, app_name: str, rows: List[ComparisonRow]) -> str:
        table_rows = [
            (
                row.label, row.mode, "yes" if row.feasible else "no",
                fixed(row.makespan_ms), fixed(row.total_mj), percent(row.delta_vs_baseline_percent),
            )
            for row in rows
        ]
        table = format_table(("label", "mode", "feasible", "makespan_ms", "total_mj", "delta"), table_rows)
        return self._render_template(
            "comparison.txt.j2",
            app=app_name,
            table=table,
            note=rows[0].note if rows else None,
            failures=[row for row in rows if row.error],
        )
