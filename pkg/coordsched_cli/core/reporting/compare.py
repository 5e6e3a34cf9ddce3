"""
Side-by-side comparison of pipeline configurations.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import yaml

from coordsched_cli.core.pipeline import ExitCode, StageError, run_pipeline
from coordsched_cli.core.scheduling.model import SchedulerConfig, SchedulingMode

logger = logging.getLogger(__name__)

ROW_KEYS = {
    "label", "mode", "use_average", "deadline_ms", "energy_budget_mj", "no_ft", "ft", "ft_distinct_units",
}


@dataclass
class CompareRowConfig:
    """One configuration to compare."""
    label: str
    mode: Optional[SchedulingMode] = None
    use_average: bool = False
    deadline_ms: Optional[float] = None
    energy_budget_mj: Optional[float] = None
    no_ft: bool = False
    ft: Dict[str, Optional[int]] = field(default_factory=dict)
    ft_distinct_units: bool = False

    def scheduler_config(self, base: SchedulerConfig) -> SchedulerConfig:
        return replace(
            base,
            mode=self.mode or base.mode,
            use_average=self.use_average or base.use_average,
            deadline_override_ms=self.deadline_ms if self.deadline_ms is not None else base.deadline_override_ms,
            energy_budget_mj=self.energy_budget_mj if self.energy_budget_mj is not None else base.energy_budget_mj,
            ft_distinct_units=self.ft_distinct_units or base.ft_distinct_units,
        )


@dataclass(frozen=True)
class ComparisonRow:
    """Outcome of one configuration; the first row is the baseline."""
    label: str
    mode: str
    feasible: bool
    makespan_ms: Optional[float] = None
    total_mj: Optional[float] = None
    delta_vs_baseline_percent: Optional[float] = None
    error: Optional[str] = None
    exit_code: int = ExitCode.OK
    note: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "label": self.label,
            "mode": self.mode,
            "feasible": self.feasible,
            "makespan_ms": self.makespan_ms,
            "total_mj": self.total_mj,
            "delta_vs_baseline_percent": self.delta_vs_baseline_percent,
            "error": self.error,
            "note": self.note,
        }


def _row_config(index: int, raw: Any, source: str) -> CompareRowConfig:
    if not isinstance(raw, dict):
        raise ValueError(f"{source}: row {index + 1} is not a mapping")
    unknown = set(raw) - ROW_KEYS
    for key in sorted(unknown):
        logger.warning(f"{source}: row {index + 1}: unknown key '{key}'")
    ft = raw.get("ft") or {}
    if not isinstance(ft, dict):
        raise ValueError(f"{source}: row {index + 1}: 'ft' must map components to replica counts")
    try:
        return CompareRowConfig(
            label=str(raw.get("label") or f"row{index + 1}"),
            mode=SchedulingMode(raw["mode"]) if raw.get("mode") else None,
            use_average=bool(raw.get("use_average", False)),
            deadline_ms=float(raw["deadline_ms"]) if raw.get("deadline_ms") is not None else None,
            energy_budget_mj=float(raw["energy_budget_mj"]) if raw.get("energy_budget_mj") is not None else None,
            no_ft=bool(raw.get("no_ft", False)),
            ft={str(k): (int(v) if v is not None else None) for k, v in ft.items()},
            ft_distinct_units=bool(raw.get("ft_distinct_units", False)),
        )
    except (TypeError, ValueError) as e:
        raise ValueError(f"{source}: row {index + 1}: {e}") from e


def load_compare_config(path: Union[str, Path]) -> List[CompareRowConfig]:
    """
    Load comparison rows from a YAML file with a top-level ``rows:`` list.

    Raises:
        OSError: unreadable file
        yaml.YAMLError: malformed YAML
        ValueError: rows missing or malformed
    """
    with open(path, "r") as f:
        data = yaml.safe_load(f) or {}
    rows = data.get("rows") if isinstance(data, dict) else None
    if not isinstance(rows, list) or not rows:
        raise ValueError(f"{path}: expected a non-empty 'rows:' list")
    return [_row_config(i, raw, str(path)) for i, raw in enumerate(rows)]


def rows_for_modes(modes: Sequence[Union[str, SchedulingMode]]) -> List[CompareRowConfig]:
    """One row per scheduling mode, labelled by the mode."""
    return [CompareRowConfig(label=SchedulingMode(m).value, mode=SchedulingMode(m)) for m in modes]


def _run_row(
    app: Union[str, Path],
    platform: Union[str, Path],
    contracts: Union[str, Path],
    base: SchedulerConfig,
    row: CompareRowConfig,
    follow_objective: bool = False,
) -> ComparisonRow:
    config = row.scheduler_config(base)
    try:
        result = run_pipeline(
            app, platform, contracts, config,
            no_ft=row.no_ft, ft_overrides=row.ft, follow_objective=follow_objective and row.mode is None,
        )
    except StageError as e:
        logger.info(f"Row {row.label}: {e.stage} failed: {e}")
        best = e.best_schedule
        return ComparisonRow(
            label=row.label,
            mode=(e.mode or config.mode).value,
            feasible=False,
            makespan_ms=best.predicted_makespan_ms if best else None,
            total_mj=best.predicted_total_mj if best else None,
            error=str(e),
            exit_code=e.exit_code,
        )
    report = result.report
    return ComparisonRow(
        label=row.label,
        mode=result.schedule.mode.value,
        feasible=report.deadline_met and result.schedule.budget_met,
        makespan_ms=report.makespan_ms,
        total_mj=report.total_mj,
    )


def with_deltas(rows: Sequence[ComparisonRow]) -> List[ComparisonRow]:
    """
    Fill in the energy delta of every row against the first one.

    A baseline without a positive energy figure leaves every delta empty; a
    failed baseline that still has a best attempt is compared against it.
    Either way each row carries a note saying so.
    """
    if not rows:
        return []
    first = rows[0]
    baseline = first.total_mj
    usable = baseline is not None and baseline > 0
    note = None
    if not usable:
        note = f"baseline {first.label} has no energy figure, deltas omitted"
    elif first.error:
        note = f"baseline {first.label} failed, deltas are against its best attempt"
    if note:
        logger.warning(note)
    result = []
    for row in rows:
        delta = None
        if usable and row.total_mj is not None:
            delta = (row.total_mj - baseline) / baseline * 100.0
        result.append(replace(row, delta_vs_baseline_percent=delta, note=note))
    return result


def run_comparison(
    app: Union[str, Path],
    platform: Union[str, Path],
    contracts: Union[str, Path],
    base: SchedulerConfig,
    rows: Sequence[CompareRowConfig],
    jobs: int = 1,
    follow_objective: bool = False,
) -> List[ComparisonRow]:
    """
    Run the pipeline once per row.

    Failed rows are reported, not raised. Rows without a mode follow the
    application objective when ``follow_objective`` is set, else ``base.mode``.
    Rows may run concurrently with ``jobs > 1``; the output keeps the input
    order.
    """
    if jobs > 1 and len(rows) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(lambda r: _run_row(app, platform, contracts, base, r, follow_objective), rows))
    else:
        results = [_run_row(app, platform, contracts, base, row, follow_objective) for row in rows]
    return with_deltas(results)
