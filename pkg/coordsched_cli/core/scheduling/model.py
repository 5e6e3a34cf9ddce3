"""
Schedule data model and scheduler configuration.
"""

from collections import defaultdict
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Tuple

from coordsched_cli.core.dsl.declarations import Objective

# relative tolerance for deadline and objective comparisons
TOLERANCE = 1e-9


def within(value: float, bound: float) -> bool:
    """value <= bound up to TOLERANCE."""
    return value <= bound + TOLERANCE * max(1.0, abs(bound))


class SchedulingMode(str, Enum):
    ENERGY = "energy"
    MAKESPAN = "makespan"
    EXACT = "exact"


@dataclass(frozen=True)
class Placement:
    """Where and when one task runs."""
    task: str
    unit: str
    version: str
    opp: str
    start_ms: float
    finish_ms: float
    component: str = ""

    def __post_init__(self):
        if not self.component:
            object.__setattr__(self, "component", self.task)

    @property
    def duration_ms(self) -> float:
        return self.finish_ms - self.start_ms


@dataclass(frozen=True)
class Schedule:
    """
    One application cycle mapped onto the platform.

    Placements are ordered by start time, then unit, then task name.
    """
    placements: Tuple[Placement, ...]
    predicted_makespan_ms: float
    predicted_dynamic_mj: float
    predicted_static_mj: float
    predicted_total_mj: float
    objective: Objective
    mode: SchedulingMode
    deadline_ms: float
    feasible: bool
    use_average: bool = False
    app_name: str = ""
    energy_budget_mj: Optional[float] = None

    def __post_init__(self):
        ordered = tuple(sorted(self.placements, key=lambda p: (p.start_ms, p.unit, p.task)))
        object.__setattr__(self, "placements", ordered)

    @property
    def budget_met(self) -> bool:
        """True without a budget, else whether the predicted total fits it."""
        return self.energy_budget_mj is None or within(self.predicted_total_mj, self.energy_budget_mj)

    def placement(self, task: str) -> Optional[Placement]:
        for placement in self.placements:
            if placement.task == task:
                return placement
        return None

    @property
    def tasks(self) -> List[str]:
        return [p.task for p in self.placements]

    def by_unit(self) -> Dict[str, List[Placement]]:
        result: Dict[str, List[Placement]] = defaultdict(list)
        for placement in self.placements:
            result[placement.unit].append(placement)
        return dict(sorted(result.items()))

    def assignment(self) -> Dict[str, Tuple[str, str, str]]:
        """task -> (unit, version, opp)"""
        return {p.task: (p.unit, p.version, p.opp) for p in self.placements}


@dataclass
class SchedulerConfig:
    """Per-run scheduler settings."""
    mode: SchedulingMode = SchedulingMode.ENERGY
    use_average: bool = False
    ft_distinct_units: bool = False
    comm_cost_ms: float = 0.0
    deadline_override_ms: Optional[float] = None
    energy_budget_mj: Optional[float] = None
    voter_wcet_ms: float = 0.5
    voter_energy_mj: float = 0.1
    exhaustive_max_tasks: int = 8
    exhaustive_warn_tasks: int = 6

    def __post_init__(self):
        self.mode = SchedulingMode(self.mode)
        if self.comm_cost_ms < 0:
            raise ValueError(f"comm_cost_ms must be >= 0 (got {self.comm_cost_ms})")
        if self.deadline_override_ms is not None and self.deadline_override_ms <= 0:
            raise ValueError(f"deadline override must be > 0 (got {self.deadline_override_ms})")
        if self.energy_budget_mj is not None and self.energy_budget_mj <= 0:
            raise ValueError(f"energy budget must be > 0 (got {self.energy_budget_mj})")
        if self.voter_wcet_ms <= 0 or self.voter_energy_mj <= 0:
            raise ValueError("default voter contract figures must be > 0")
        if self.exhaustive_max_tasks < 1 or self.exhaustive_warn_tasks < 1:
            raise ValueError("exhaustive task caps must be >= 1")

    def deadline_for(self, graph_deadline_ms: float) -> float:
        return self.deadline_override_ms if self.deadline_override_ms is not None else graph_deadline_ms
