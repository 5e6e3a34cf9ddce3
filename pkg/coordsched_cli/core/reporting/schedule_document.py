"""
Machine-readable schedule and simulation documents (JSON).
"""

from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, Field, model_validator

from coordsched_cli.core.dsl.declarations import Objective
from coordsched_cli.core.reporting.manifest import RunManifest
from coordsched_cli.core.scheduling.model import Placement, Schedule, SchedulingMode
from coordsched_cli.core.simulation.simulator import SimReport


class PlacementModel(BaseModel):
    """Model representing one task placement."""

    task: str = Field(..., min_length=1, description="Task (node) name")
    unit: str = Field(..., min_length=1, description="Processing unit name")
    version: str = Field(..., min_length=1, description="Component version")
    opp: str = Field(..., min_length=1, description="Operating point id, e.g. 800MHz@0.90V")
    start_ms: float = Field(..., ge=0, description="Start time in ms")
    finish_ms: float = Field(..., description="Finish time in ms")
    component: Optional[str] = Field(None, description="Contract name; defaults to the task name")

    @model_validator(mode="after")
    def _finish_after_start(self) -> "PlacementModel":
        if self.finish_ms <= self.start_ms:
            raise ValueError(f"placement of {self.task}: finish_ms must be > start_ms")
        return self


class TotalsModel(BaseModel):
    """Model for predicted totals."""

    makespan_ms: float = Field(..., ge=0, description="Predicted makespan in ms")
    dynamic_mj: float = Field(..., ge=0, description="Predicted dynamic energy in mJ")
    static_mj: float = Field(..., ge=0, description="Predicted static energy in mJ")
    total_mj: float = Field(..., ge=0, description="Predicted total energy in mJ")


class ManifestModel(BaseModel):
    """Model for the run manifest embedded in a schedule document."""

    app_file: str
    platform_file: Optional[str] = None
    contracts_file: Optional[str] = None
    config: Dict[str, Any] = Field(default_factory=dict)
    tool_version: str
    hashes: Dict[str, str] = Field(default_factory=dict)


class ScheduleDocument(BaseModel):
    """Model for a complete schedule as written by `schedule --json` and read by `simulate`."""

    app: str = Field("", description="Application name")
    objective: Objective = Field(Objective.MINIMIZE_ENERGY, description="Application objective")
    mode: SchedulingMode = Field(..., description="Scheduler that produced the schedule")
    deadline_ms: float = Field(..., gt=0, description="Deadline the schedule was made for")
    feasible: bool = Field(..., description="Whether the predicted makespan meets the deadline")
    use_average: bool = Field(False, description="Average-case figures instead of worst case")
    energy_budget_mj: Optional[float] = Field(None, gt=0, description="Energy budget per cycle, if any")
    placements: List[PlacementModel] = Field(default_factory=list)
    totals: TotalsModel
    manifest: Optional[ManifestModel] = None

    @classmethod
    def from_schedule(cls, schedule: Schedule, manifest: Optional[RunManifest] = None) -> "ScheduleDocument":
        return cls(
            app=schedule.app_name,
            objective=schedule.objective,
            mode=schedule.mode,
            deadline_ms=schedule.deadline_ms,
            feasible=schedule.feasible,
            energy_budget_mj=schedule.energy_budget_mj,
            use_average=schedule.use_average,
            placements=[
                PlacementModel(
                    task=p.task, unit=p.unit, version=p.version, opp=p.opp,
                    start_ms=p.start_ms, finish_ms=p.finish_ms, component=p.component,
                )
                for p in schedule.placements
            ],
            totals=TotalsModel(
                makespan_ms=schedule.predicted_makespan_ms,
                dynamic_mj=schedule.predicted_dynamic_mj,
                static_mj=schedule.predicted_static_mj,
                total_mj=schedule.predicted_total_mj,
            ),
            manifest=ManifestModel(**manifest.to_dict()) if manifest else None,
        )

    def to_schedule(self) -> Schedule:
        return Schedule(
            placements=tuple(
                Placement(p.task, p.unit, p.version, p.opp, p.start_ms, p.finish_ms, p.component or p.task)
                for p in self.placements
            ),
            predicted_makespan_ms=self.totals.makespan_ms,
            predicted_dynamic_mj=self.totals.dynamic_mj,
            predicted_static_mj=self.totals.static_mj,
            predicted_total_mj=self.totals.total_mj,
            objective=self.objective,
            mode=self.mode,
            deadline_ms=self.deadline_ms,
            feasible=self.feasible,
            use_average=self.use_average,
            app_name=self.app,
            energy_budget_mj=self.energy_budget_mj,
        )

    def to_manifest(self) -> Optional[RunManifest]:
        if self.manifest is None:
            return None
        return RunManifest(**self.manifest.model_dump())


def read_schedule_json(path: Union[str, Path]) -> ScheduleDocument:
    """
    Read and validate a schedule document.

    Raises:
        OSError: unreadable file
        pydantic.ValidationError: malformed JSON or schema violation
    """
    return ScheduleDocument.model_validate_json(Path(path).read_bytes())


class UnitUsageModel(BaseModel):
    """Model for one unit's share of a simulated cycle."""

    busy_ms: float = Field(..., ge=0)
    idle_ms: float = Field(..., description="Makespan minus busy time")
    dynamic_mj: float = Field(..., ge=0)


class SimulationDocument(BaseModel):
    """Model for a simulation report as written by `simulate --json` and `run --report-json`."""

    app: str = ""
    replay: str = Field(..., description="strict or data-driven")
    makespan_ms: float = Field(..., ge=0)
    deadline_ms: float = Field(..., gt=0)
    deadline_met: bool
    dynamic_mj: float = Field(..., ge=0)
    static_mj: float = Field(..., ge=0)
    total_mj: float = Field(..., ge=0)
    per_unit: Dict[str, UnitUsageModel] = Field(default_factory=dict)
    token_counts: Dict[str, List[int]] = Field(
        default_factory=dict, description="edge -> [produced, consumed]"
    )

    @classmethod
    def from_report(cls, report: SimReport, app: str = "") -> "SimulationDocument":
        return cls(
            app=app,
            replay=report.replay.value,
            makespan_ms=report.makespan_ms,
            deadline_ms=report.deadline_ms,
            deadline_met=report.deadline_met,
            dynamic_mj=report.dynamic_mj,
            static_mj=report.static_mj,
            total_mj=report.total_mj,
            per_unit={
                unit: UnitUsageModel(busy_ms=u.busy_ms, idle_ms=u.idle_ms, dynamic_mj=u.dynamic_mj)
                for unit, u in report.per_unit.items()
            },
            token_counts={edge: list(counts) for edge, counts in report.token_counts.items()},
        )


def write_document(document: BaseModel, path: Union[str, Path]) -> None:
    Path(path).write_text(document.model_dump_json(indent=2) + "\n", encoding="utf-8")
