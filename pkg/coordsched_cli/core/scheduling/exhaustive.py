"""
Exact scheduler for small instances.

Depth-first search over (ready task, option) choices; every topological
order and every assignment is reachable, and each choice is timed by
earliest-start insertion. The incumbent is seeded with the heuristic, and
branches whose lower bound cannot strictly improve on it are pruned.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from coordsched_cli.core.dsl.declarations import Objective
from coordsched_cli.core.graph.model import AppGraph
from coordsched_cli.core.platform.energy import ProcessingUnit
from coordsched_cli.core.scheduling.costs import CostModel, TaskOption
from coordsched_cli.core.scheduling.heuristic import replica_group, schedule_energy, schedule_makespan
from coordsched_cli.core.scheduling.model import Schedule, SchedulerConfig, SchedulingMode, TOLERANCE, within
from coordsched_cli.core.scheduling.timing import UnitTimeline, build_schedule, empty_schedule, ready_time
from coordsched_cli.errors import InfeasibleScheduleError, InstanceTooLargeError

logger = logging.getLogger(__name__)


@dataclass
class SearchStats:
    explored: int = 0
    pruned: int = 0
    symmetric: int = 0
    improvements: int = 0


def _unit_signature(unit: ProcessingUnit) -> Tuple[str, Tuple, float]:
    return unit.unit_type, tuple(sorted(unit.opps)), unit.static_power_mw


class _Search:
    def __init__(self, graph: AppGraph, cost_model: CostModel, config: SchedulerConfig,
                 deadline_ms: float, minimize_energy: bool):
        self.graph = graph
        self.cost_model = cost_model
        self.config = config
        self.deadline = deadline_ms
        self.minimize_energy = minimize_energy
        # an energy budget constrains makespan minimization only
        self.budget = None if minimize_energy else config.energy_budget_mj
        self.comm = config.comm_cost_ms
        self.static_mw = cost_model.static_power_mw
        self.stats = SearchStats()

        self.options: Dict[str, List[TaskOption]] = {
            task.name: cost_model.options(task) for task in graph.nodes
        }
        self.min_energy = {name: min(o.energy_mj for o in opts) for name, opts in self.options.items()}
        self.min_time = {name: min(o.time_ms for o in opts) for name, opts in self.options.items()}
        # min-time critical tail including the task itself
        self.tail: Dict[str, float] = {}
        for name in reversed(graph.topo_order):
            rest = max((self.comm + self.tail[s] for s in graph.successors(name)), default=0.0)
            self.tail[name] = self.min_time[name] + rest

        # earlier units with an identical signature, per unit
        self.twins: Dict[str, List[str]] = {}
        by_signature: Dict[Tuple, List[str]] = {}
        for unit in sorted(cost_model.platform.units, key=lambda u: u.name):
            earlier = by_signature.setdefault(_unit_signature(unit), [])
            self.twins[unit.name] = list(earlier)
            earlier.append(unit.name)
        self.groups = {
            task.name: replica_group(task) if config.ft_distinct_units else None for task in graph.nodes
        }

        self.best_value: Optional[float] = None
        self.best: Optional[Tuple[Dict[str, TaskOption], Dict[str, Tuple[float, float]]]] = None

        self.assignment: Dict[str, TaskOption] = {}
        self.times: Dict[str, Tuple[float, float]] = {}
        self.timelines: Dict[str, UnitTimeline] = {}
        self.remaining = {name: len(graph.predecessors(name)) for name in graph.node_names}

    def seed(self, schedule: Schedule) -> None:
        assignment = {
            p.task: self.cost_model.option(self.graph.node(p.task), p.unit, p.version, p.opp)
            for p in schedule.placements
        }
        times = {p.task: (p.start_ms, p.finish_ms) for p in schedule.placements}
        self.best = (assignment, times)
        self.best_value = schedule.predicted_total_mj if self.minimize_energy else schedule.predicted_makespan_ms

    def _improves(self, value: float) -> bool:
        if self.best_value is None:
            return True
        return value < self.best_value - TOLERANCE * max(1.0, abs(self.best_value))

    def _bounds(self, makespan: float, dynamic: float) -> Tuple[float, float]:
        """Lower bounds on (makespan, total energy) of any completion."""
        lb_makespan = makespan
        for name in self.remaining:
            if name in self.assignment:
                continue
            preds_done = [p for p in self.graph.predecessors(name) if p in self.times]
            est = max((self.times[p][1] + self.comm for p in preds_done), default=0.0)
            lb_makespan = max(lb_makespan, est + self.tail[name])
        lb_energy = dynamic + sum(self.min_energy[n] for n in self.remaining if n not in self.assignment)
        lb_energy += self.static_mw * lb_makespan / 1000.0
        return lb_makespan, lb_energy

    def _skip_symmetric(self, unit: str) -> bool:
        """An empty unit is interchangeable with any earlier empty twin."""
        if not self._unit_empty(unit):
            return False
        return any(self._unit_empty(twin) for twin in self.twins.get(unit, ()))

    def _unit_empty(self, unit: str) -> bool:
        timeline = self.timelines.get(unit)
        return timeline is None or timeline.is_empty

    def run(self) -> None:
        self._dfs(0.0, 0.0)

    def _dfs(self, makespan: float, dynamic: float) -> None:
        self.stats.explored += 1
        if len(self.assignment) == len(self.options):
            energy = dynamic + self.static_mw * makespan / 1000.0
            value = energy if self.minimize_energy else makespan
            if self.minimize_energy and not within(makespan, self.deadline):
                return
            if self.budget is not None and not within(energy, self.budget):
                return
            if self._improves(value):
                self.best_value = value
                self.best = (dict(self.assignment), dict(self.times))
                self.stats.improvements += 1
            return

        lb_makespan, lb_energy = self._bounds(makespan, dynamic)
        if self.minimize_energy and not within(lb_makespan, self.deadline):
            self.stats.pruned += 1
            return
        if self.budget is not None and not within(lb_energy, self.budget):
            self.stats.pruned += 1
            return
        if not self._improves(lb_energy if self.minimize_energy else lb_makespan):
            self.stats.pruned += 1
            return

        ready = sorted(n for n, c in self.remaining.items() if c == 0 and n not in self.assignment)
        for name in ready:
            at = ready_time(self.graph, name, {n: t[1] for n, t in self.times.items()}, self.comm)
            group = self.groups[name]
            taken = {
                o.unit for n, o in self.assignment.items() if group is not None and self.groups[n] == group
            }
            for option in self.options[name]:
                if option.unit in taken:
                    continue
                if self._skip_symmetric(option.unit):
                    self.stats.symmetric += 1
                    continue
                timeline = self.timelines.setdefault(option.unit, UnitTimeline())
                start = timeline.earliest_start(at, option.time_ms)
                finish = start + option.time_ms

                timeline.reserve(start, finish)
                self.assignment[name] = option
                self.times[name] = (start, finish)
                for succ in self.graph.successors(name):
                    self.remaining[succ] -= 1

                self._dfs(max(makespan, finish), dynamic + option.energy_mj)

                for succ in self.graph.successors(name):
                    self.remaining[succ] += 1
                del self.times[name]
                del self.assignment[name]
                timeline.release(start, finish)


def schedule_exhaustive(
    graph: AppGraph,
    cost_model: CostModel,
    config: SchedulerConfig,
    deadline_ms: Optional[float] = None,
) -> Schedule:
    """
    Optimal schedule over all assignments and topological orders.

    Minimizes total energy under the deadline when the application objective
    is minimize_energy, otherwise minimizes makespan, within
    ``config.energy_budget_mj`` when one is set.

    Raises:
        InstanceTooLargeError: more tasks than ``config.exhaustive_max_tasks``
        InfeasibleScheduleError: no assignment meets the deadline, or the energy budget
    """
    deadline = deadline_ms if deadline_ms is not None else config.deadline_for(graph.deadline_ms)
    task_count = len(graph.nodes)
    if task_count > config.exhaustive_max_tasks:
        raise InstanceTooLargeError(task_count, config.exhaustive_max_tasks)
    if task_count > config.exhaustive_warn_tasks:
        logger.warning(f"Exhaustive search over {task_count} tasks may take a long time")
    if not graph.nodes:
        return empty_schedule(graph, SchedulingMode.EXACT, deadline, cost_model.use_average, config.energy_budget_mj)

    minimize_energy = graph.objective is Objective.MINIMIZE_ENERGY
    search = _Search(graph, cost_model, config, deadline, minimize_energy)

    achieved: Optional[float] = None
    try:
        if minimize_energy:
            seed = schedule_energy(graph, cost_model, config, deadline)
        else:
            seed = schedule_makespan(graph, cost_model, config)
        if seed.budget_met:
            search.seed(seed)
    except InfeasibleScheduleError as e:
        achieved = e.achieved_makespan_ms
        logger.debug(f"Heuristic seed unavailable: {e}")

    search.run()
    stats = search.stats
    logger.info(
        f"Exhaustive search: {stats.explored} node(s) explored, {stats.pruned} pruned, "
        f"{stats.symmetric} symmetric skip(s), {stats.improvements} improvement(s) over the seed"
    )

    if search.best is None:
        if search.budget is not None:
            raise InfeasibleScheduleError(f"energy budget {search.budget:.3f} mJ cannot be met by any schedule")
        raise InfeasibleScheduleError(f"deadline {deadline:.3f} ms cannot be met by any schedule", achieved)
    assignment, times = search.best
    return build_schedule(
        graph, cost_model, assignment, times, SchedulingMode.EXACT, deadline, config.energy_budget_mj
    )
