"""
Fixed-width text Gantt chart.
"""

from typing import Dict, List, Sequence, Tuple, Union

from coordsched_cli.core.scheduling.model import Schedule
from coordsched_cli.core.simulation.simulator import SimReport

IDLE = "."
FILL = "-"

Row = List[Tuple[str, float, float]]


def _rows(source: Union[Schedule, SimReport]) -> Tuple[Dict[str, Row], float]:
    if isinstance(source, SimReport):
        rows = {unit: list(items) for unit, items in source.intervals.items()}
        return rows, source.makespan_ms
    rows = {
        unit: [(p.task, p.start_ms, p.finish_ms) for p in placements]
        for unit, placements in source.by_unit().items()
    }
    return rows, source.predicted_makespan_ms


def _segment(name: str, length: int) -> str:
    return (name + FILL * length)[:length]


def gantt(source: Union[Schedule, SimReport], width: int = 60, units: Sequence[str] = ()) -> str:
    """
    Render one row per unit over a time axis from 0 to the makespan.

    Each task occupies at least one column and shows its name truncated to
    the columns it covers, padded with '-'; idle time is '.'. Units listed
    in ``units`` get a row even when idle.
    """
    width = max(10, width)
    rows, makespan = _rows(source)
    for unit in units:
        rows.setdefault(unit, [])
    names = sorted(rows)
    label_width = max([len("unit")] + [len(n) for n in names])

    left, right = "0", f"{makespan:.3f} ms"
    axis = left + " " * max(1, width - len(left) - len(right)) + right
    lines = [f"{'unit':<{label_width}} |{axis}|"]

    scale = width / makespan if makespan > 0 else 0.0
    for unit in names:
        cells = [IDLE] * width
        for task, start, finish in sorted(rows[unit], key=lambda r: (r[1], r[0])):
            first = min(width - 1, int(round(start * scale)))
            last = max(first + 1, min(width, int(round(finish * scale))))
            cells[first:last] = list(_segment(task, last - first))
        lines.append(f"{unit:<{label_width}} |{''.join(cells)}|")
    return "\n".join(lines)
