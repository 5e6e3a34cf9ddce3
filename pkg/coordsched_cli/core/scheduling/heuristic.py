"""
List-scheduling heuristics.

schedule_makespan is HEFT-style: tasks ordered by upward rank, each placed
on the option with the earliest finish time. Under an energy budget it then
trades makespan for energy until the budget holds. schedule_energy starts
from the list schedule and greedily reassigns single tasks while energy
drops and the deadline holds.
"""

import logging
from statistics import fmean
from typing import Dict, List, Optional, Sequence, Set, Tuple

from coordsched_cli.core.graph.model import AppGraph, TaskNode, TaskRole
from coordsched_cli.core.scheduling.costs import CostModel, TaskOption
from coordsched_cli.core.scheduling.model import Schedule, SchedulerConfig, SchedulingMode, TOLERANCE, within
from coordsched_cli.core.scheduling.timing import (
    UnitTimeline,
    build_schedule,
    empty_schedule,
    makespan_of,
    ready_time,
    retime,
    total_energy,
)
from coordsched_cli.errors import InfeasibleScheduleError

logger = logging.getLogger(__name__)


def mean_time(options: Sequence[TaskOption]) -> float:
    """Mean execution time over distinct (version, unit type, OPP) cells."""
    cells = {(o.version, o.unit_type, o.opp): o.time_ms for o in options}
    return fmean(cells.values())


def upward_ranks(graph: AppGraph, cost_model: CostModel, comm_cost_ms: float = 0.0) -> Dict[str, float]:
    """rank(t) = mean_time(t) + max over successors s of (comm + rank(s))."""
    ranks: Dict[str, float] = {}
    for name in reversed(graph.topo_order):
        tail = max((comm_cost_ms + ranks[s] for s in graph.successors(name)), default=0.0)
        ranks[name] = mean_time(cost_model.options(graph.node(name))) + tail
    return ranks


def replica_group(task: TaskNode) -> Optional[str]:
    """Name shared by the replicas of one ft component, None for other tasks."""
    return task.replica_of if task.role is TaskRole.REPLICA else None


def distinct_units_ok(graph: AppGraph, assignment: Dict[str, TaskOption]) -> bool:
    """True when no two replicas of a component share a unit."""
    seen: Set[Tuple[str, str]] = set()
    for name, option in assignment.items():
        group = replica_group(graph.node(name))
        if group is None:
            continue
        if (group, option.unit) in seen:
            return False
        seen.add((group, option.unit))
    return True


def _list_schedule(
    graph: AppGraph,
    cost_model: CostModel,
    config: SchedulerConfig,
) -> Tuple[Dict[str, TaskOption], Dict[str, Tuple[float, float]], List[str]]:
    ranks = upward_ranks(graph, cost_model, config.comm_cost_ms)
    remaining = {name: len(graph.predecessors(name)) for name in graph.node_names}
    ready = sorted(name for name, count in remaining.items() if count == 0)

    timelines: Dict[str, UnitTimeline] = {}
    finish: Dict[str, float] = {}
    times: Dict[str, Tuple[float, float]] = {}
    assignment: Dict[str, TaskOption] = {}
    used_by_group: Dict[str, Set[str]] = {}
    order: List[str] = []

    while ready:
        name = min(ready, key=lambda n: (-ranks[n], n))
        ready.remove(name)
        task = graph.node(name)
        group = replica_group(task) if config.ft_distinct_units else None
        taken = used_by_group.setdefault(group, set()) if group else set()

        at = ready_time(graph, name, finish, config.comm_cost_ms)
        best: Optional[Tuple[float, TaskOption, float]] = None
        for option in cost_model.options(task):
            if option.unit in taken:
                continue
            timeline = timelines.get(option.unit) or UnitTimeline()
            start = timeline.earliest_start(at, option.time_ms)
            eft = start + option.time_ms
            # options are sorted by (unit, version, opp), so strict < keeps the tie order
            if best is None or eft < best[0]:
                best = (eft, option, start)
        if best is None:
            raise InfeasibleScheduleError(f"replicas of {group} cannot be placed on distinct units")

        eft, option, start = best
        timelines.setdefault(option.unit, UnitTimeline()).reserve(start, eft)
        finish[name] = eft
        times[name] = (start, eft)
        assignment[name] = option
        order.append(name)
        if group:
            taken.add(option.unit)

        for succ in graph.successors(name):
            remaining[succ] -= 1
            if remaining[succ] == 0:
                ready.append(succ)

    return assignment, times, order


def _fit_budget(
    graph: AppGraph,
    cost_model: CostModel,
    config: SchedulerConfig,
    assignment: Dict[str, TaskOption],
    times: Dict[str, Tuple[float, float]],
    order: List[str],
) -> Dict[str, Tuple[float, float]]:
    """
    Reassign single tasks until the total energy fits the budget.

    Each step takes the energy-lowering move with the smallest resulting
    makespan (then the lower energy), so the makespan grows as little as
    possible. ``assignment`` is updated in place; the new timing is returned.
    """
    budget = config.energy_budget_mj
    current = total_energy(cost_model, assignment, makespan_of(times))
    moves = 0
    while not within(current, budget):
        best_move: Optional[Tuple[float, float, str, TaskOption, Dict[str, Tuple[float, float]]]] = None
        for name in sorted(assignment):
            for option in cost_model.options(graph.node(name)):
                if option == assignment[name]:
                    continue
                trial = dict(assignment)
                trial[name] = option
                if config.ft_distinct_units and not distinct_units_ok(graph, trial):
                    continue
                trial_times = retime(graph, trial, order, config.comm_cost_ms)
                trial_makespan = makespan_of(trial_times)
                energy = total_energy(cost_model, trial, trial_makespan)
                if energy >= current - TOLERANCE * max(1.0, abs(current)):
                    continue
                if best_move is None or (trial_makespan, energy) < best_move[:2]:
                    best_move = (trial_makespan, energy, name, option, trial_times)
        if best_move is None:
            logger.warning(f"energy budget {budget:.3f} mJ cannot be met (lowest reached {current:.3f} mJ)")
            break
        _, current, name, option, times = best_move
        assignment[name] = option
        moves += 1
    logger.info(f"Budget phase: {moves} move(s), total {current:.3f} mJ against {budget:.3f} mJ")
    return times


def schedule_makespan(
    graph: AppGraph,
    cost_model: CostModel,
    config: SchedulerConfig,
) -> Schedule:
    """
    HEFT-style makespan minimization, optionally under ``config.energy_budget_mj``.

    The result carries ``feasible`` = makespan within the deadline and
    ``budget_met``; missing either is not an error in this mode.

    Raises:
        InfeasibleScheduleError: a task has no usable unit
        MissingContractError: a task cannot be costed
    """
    deadline = config.deadline_for(graph.deadline_ms)
    if not graph.nodes:
        return empty_schedule(
            graph, SchedulingMode.MAKESPAN, deadline, cost_model.use_average, config.energy_budget_mj
        )
    assignment, times, order = _list_schedule(graph, cost_model, config)
    if config.energy_budget_mj is not None:
        times = _fit_budget(graph, cost_model, config, assignment, times, order)
    schedule = build_schedule(
        graph, cost_model, assignment, times, SchedulingMode.MAKESPAN, deadline, config.energy_budget_mj
    )
    logger.info(
        f"List schedule: makespan {schedule.predicted_makespan_ms:.3f} ms, "
        f"total {schedule.predicted_total_mj:.3f} mJ"
    )
    return schedule


def schedule_energy(
    graph: AppGraph,
    cost_model: CostModel,
    config: SchedulerConfig,
    deadline_ms: Optional[float] = None,
) -> Schedule:
    """
    Two-phase energy minimization under a deadline.

    Phase 1 is the list schedule; it must meet the deadline. Phase 2
    repeatedly applies the single-task reassignment with the largest energy
    saving that keeps the deadline, retiming in the phase-1 order, until no
    move saves energy.

    Raises:
        InfeasibleScheduleError: phase 1 misses the deadline (achieved makespan attached)
        MissingContractError: a task cannot be costed
    """
    deadline = deadline_ms if deadline_ms is not None else config.deadline_for(graph.deadline_ms)
    if not graph.nodes:
        return empty_schedule(graph, SchedulingMode.ENERGY, deadline, cost_model.use_average, config.energy_budget_mj)

    assignment, times, order = _list_schedule(graph, cost_model, config)
    makespan = makespan_of(times)
    if not within(makespan, deadline):
        best = build_schedule(graph, cost_model, assignment, times, SchedulingMode.MAKESPAN, deadline, config.energy_budget_mj)
        raise InfeasibleScheduleError(f"deadline {deadline:.3f} ms cannot be met", makespan, best)

    current = total_energy(cost_model, assignment, makespan)
    logger.info(f"Phase 1: makespan {makespan:.3f} ms, total {current:.3f} mJ")

    moves = 0
    while True:
        best_move: Optional[Tuple[float, str, TaskOption, Dict[str, Tuple[float, float]]]] = None
        for name in sorted(assignment):
            for option in cost_model.options(graph.node(name)):
                if option == assignment[name]:
                    continue
                trial = dict(assignment)
                trial[name] = option
                if config.ft_distinct_units and not distinct_units_ok(graph, trial):
                    continue
                trial_times = retime(graph, trial, order, config.comm_cost_ms)
                trial_makespan = makespan_of(trial_times)
                if not within(trial_makespan, deadline):
                    continue
                energy = total_energy(cost_model, trial, trial_makespan)
                if energy >= current - TOLERANCE * max(1.0, abs(current)):
                    continue
                if best_move is None or energy < best_move[0]:
                    best_move = (energy, name, option, trial_times)
        if best_move is None:
            break
        energy, name, option, trial_times = best_move
        logger.debug(
            f"Phase 2: {name} -> {option.unit}/{option.version}/{option.opp}, "
            f"{current:.3f} -> {energy:.3f} mJ"
        )
        assignment[name] = option
        times = trial_times
        current = energy
        moves += 1

    schedule = build_schedule(
        graph, cost_model, assignment, times, SchedulingMode.ENERGY, deadline, config.energy_budget_mj
    )
    logger.info(
        f"Phase 2: {moves} move(s), makespan {schedule.predicted_makespan_ms:.3f} ms, "
        f"total {schedule.predicted_total_mj:.3f} mJ"
    )
    return schedule
