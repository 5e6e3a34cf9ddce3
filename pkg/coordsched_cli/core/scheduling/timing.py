"""
Timing and energy accounting for fixed assignments.
"""

import bisect
import logging
import math
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from coordsched_cli.core.graph.model import AppGraph
from coordsched_cli.core.platform.energy import OperatingPoint, static_energy
from coordsched_cli.core.scheduling.costs import CostModel, TaskOption
from coordsched_cli.core.scheduling.model import Placement, Schedule, SchedulingMode, within
from coordsched_cli.errors import MissingContractError, SchedulingError

logger = logging.getLogger(__name__)

Interval = Tuple[float, float]


class UnitTimeline:
    """Busy intervals of one unit, kept sorted and disjoint."""

    def __init__(self):
        self.intervals: List[Interval] = []

    def earliest_start(self, ready_ms: float, duration_ms: float) -> float:
        """First start >= ready_ms where ``duration_ms`` fits into an idle gap."""
        start = ready_ms
        for busy_start, busy_finish in self.intervals:
            if busy_finish <= start:
                continue
            if start + duration_ms <= busy_start:
                return start
            start = max(start, busy_finish)
        return start

    def reserve(self, start_ms: float, finish_ms: float) -> None:
        bisect.insort(self.intervals, (start_ms, finish_ms))

    def release(self, start_ms: float, finish_ms: float) -> None:
        self.intervals.remove((start_ms, finish_ms))

    @property
    def is_empty(self) -> bool:
        return not self.intervals


def ready_time(graph: AppGraph, task: str, finish: Mapping[str, float], comm_cost_ms: float) -> float:
    """Time at which every input token of ``task`` is available."""
    preds = graph.predecessors(task)
    if not preds:
        return 0.0
    return max(finish[p] + comm_cost_ms for p in preds)


def retime(
    graph: AppGraph,
    assignment: Mapping[str, TaskOption],
    order: Sequence[str],
    comm_cost_ms: float = 0.0,
) -> Dict[str, Interval]:
    """
    Earliest-start insertion timing of a fixed assignment.

    Tasks are placed in ``order`` (a topological order); each starts in the
    first idle gap of its unit after its inputs are available.

    Returns:
        task -> (start_ms, finish_ms)
    """
    timelines: Dict[str, UnitTimeline] = {}
    finish: Dict[str, float] = {}
    times: Dict[str, Interval] = {}
    for task in order:
        option = assignment[task]
        timeline = timelines.setdefault(option.unit, UnitTimeline())
        start = timeline.earliest_start(ready_time(graph, task, finish, comm_cost_ms), option.time_ms)
        end = start + option.time_ms
        timeline.reserve(start, end)
        finish[task] = end
        times[task] = (start, end)
    return times


def makespan_of(times: Mapping[str, Interval]) -> float:
    return max((end for _, end in times.values()), default=0.0)


def dynamic_energy(assignment: Mapping[str, TaskOption]) -> float:
    return math.fsum(option.energy_mj for option in assignment.values())


def total_energy(cost_model: CostModel, assignment: Mapping[str, TaskOption], makespan_ms: float) -> float:
    return dynamic_energy(assignment) + static_energy(cost_model.platform, makespan_ms)


def build_schedule(
    graph: AppGraph,
    cost_model: CostModel,
    assignment: Mapping[str, TaskOption],
    times: Mapping[str, Interval],
    mode: SchedulingMode,
    deadline_ms: float,
    energy_budget_mj: Optional[float] = None,
) -> Schedule:
    """Freeze an assignment and its timing into a Schedule with predicted totals."""
    placements = []
    for task in graph.node_names:
        option = assignment[task]
        start, end = times[task]
        placements.append(Placement(
            task, option.unit, option.version, option.opp, start, end,
            component=graph.node(task).contract_name,
        ))
    makespan = makespan_of(times)
    dynamic = dynamic_energy(assignment)
    static = static_energy(cost_model.platform, makespan)
    return Schedule(
        placements=tuple(placements),
        predicted_makespan_ms=makespan,
        predicted_dynamic_mj=dynamic,
        predicted_static_mj=static,
        predicted_total_mj=dynamic + static,
        objective=graph.objective,
        mode=mode,
        deadline_ms=deadline_ms,
        feasible=within(makespan, deadline_ms),
        use_average=cost_model.use_average,
        app_name=graph.app_name,
        energy_budget_mj=energy_budget_mj,
    )


def empty_schedule(
    graph: AppGraph,
    mode: SchedulingMode,
    deadline_ms: float,
    use_average: bool = False,
    energy_budget_mj: Optional[float] = None,
) -> Schedule:
    return Schedule(
        (), 0.0, 0.0, 0.0, 0.0, graph.objective, mode, deadline_ms, True, use_average, graph.app_name, energy_budget_mj
    )


def predict_energy(schedule: Schedule, cost_model: CostModel) -> Tuple[float, float, float]:
    """
    (dynamic_mj, static_mj, total_mj) of a schedule.

    Dynamic energy is summed from the contracts of each placement, static
    energy covers the whole platform over the makespan.

    Raises:
        MissingContractError: a placement cannot be costed
    """
    energies = []
    for placement in schedule.placements:
        unit = cost_model.platform.unit(placement.unit)
        found = cost_model.figures(placement.component, placement.version, unit.unit_type,
                                   OperatingPoint.parse(placement.opp))
        if found is None:
            raise MissingContractError(placement.task)
        energies.append(found[1])
    dynamic = math.fsum(energies)
    makespan = max((p.finish_ms for p in schedule.placements), default=0.0)
    static = static_energy(cost_model.platform, makespan)
    return dynamic, static, dynamic + static


def critical_path_lower_bound(graph: AppGraph, cost_model: CostModel, comm_cost_ms: float = 0.0) -> float:
    """Longest path when every task runs at its fastest option; no schedule can beat it."""
    fastest = {task.name: min(o.time_ms for o in cost_model.options(task)) for task in graph.nodes}
    finish: Dict[str, float] = {}
    for name in graph.topo_order:
        finish[name] = ready_time(graph, name, finish, comm_cost_ms) + fastest[name]
    return max(finish.values(), default=0.0)


def reassign(
    schedule: Schedule,
    graph: AppGraph,
    cost_model: CostModel,
    task: str,
    unit: str,
    version: str,
    opp: str,
    comm_cost_ms: float = 0.0,
) -> Schedule:
    """
    What-if schedule with one task moved to another (unit, version, OPP).

    Other tasks keep their placement; timing is recomputed in the original
    start order.
    """
    if schedule.placement(task) is None:
        raise SchedulingError(f"task {task} is not part of the schedule")
    assignment = {
        p.task: cost_model.option(graph.node(p.task), p.unit, p.version, p.opp)
        for p in schedule.placements
    }
    assignment[task] = cost_model.option(graph.node(task), unit, version, opp)
    order = schedule_order(schedule, graph)
    times = retime(graph, assignment, order, comm_cost_ms)
    return build_schedule(
        graph, cost_model, assignment, times, schedule.mode, schedule.deadline_ms, schedule.energy_budget_mj
    )


def schedule_order(schedule: Schedule, graph: AppGraph) -> List[str]:
    """Start order of a schedule, made topological for zero-length ties."""
    rank = {name: i for i, name in enumerate(graph.topo_order)}
    return [p.task for p in sorted(schedule.placements, key=lambda p: (p.start_ms, rank[p.task]))]
