"""
Discrete-event replay of a schedule over one application cycle.

Makespan and energy are recomputed from the event trace rather than copied
from the schedule, so the simulator doubles as an independent check of the
schedulers' accounting.
"""

import heapq
import json
import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Dict, List, Mapping, Tuple, Union

from coordsched_cli.core.graph.model import AppGraph, Edge
from coordsched_cli.core.platform.energy import static_energy
from coordsched_cli.core.scheduling.costs import CostModel, TaskOption
from coordsched_cli.core.scheduling.model import Placement, Schedule, TOLERANCE, within
from coordsched_cli.errors import MissingContractError, SchedulingError, SimulationViolation

logger = logging.getLogger(__name__)


class EventKind(str, Enum):
    TASK_START = "task_start"
    TASK_FINISH = "task_finish"
    TOKEN_PRODUCED = "token_produced"
    TOKEN_CONSUMED = "token_consumed"


# order of simultaneous events
_PHASE = {
    EventKind.TASK_FINISH: 0,
    EventKind.TOKEN_PRODUCED: 1,
    EventKind.TOKEN_CONSUMED: 2,
    EventKind.TASK_START: 3,
}


class ReplayKind(str, Enum):
    STRICT = "strict"
    DATA_DRIVEN = "data-driven"


@dataclass(frozen=True)
class SimEvent:
    time_ms: float
    kind: EventKind
    subject: str

    def to_dict(self) -> Dict[str, object]:
        return {"t_ms": self.time_ms, "kind": self.kind.value, "subject": self.subject}


@dataclass(frozen=True)
class UnitUsage:
    busy_ms: float
    idle_ms: float
    dynamic_mj: float


@dataclass(frozen=True)
class SimReport:
    """Outcome of one simulated cycle; busy + idle equals the makespan on every unit."""
    makespan_ms: float
    per_unit: Mapping[str, UnitUsage]
    static_mj: float
    dynamic_mj: float
    total_mj: float
    deadline_ms: float
    deadline_met: bool
    event_trace: Tuple[SimEvent, ...]
    intervals: Mapping[str, Tuple[Tuple[str, float, float], ...]] = field(default_factory=dict)
    token_counts: Mapping[str, Tuple[int, int]] = field(default_factory=dict)
    replay: ReplayKind = ReplayKind.STRICT


Times = Dict[str, Tuple[float, float]]


def _close(a: float, b: float) -> bool:
    return abs(a - b) <= TOLERANCE * max(1.0, abs(a), abs(b))


class Simulator:
    """Replays schedules of one graph on one platform."""

    def __init__(self, graph: AppGraph, cost_model: CostModel, comm_cost_ms: float = 0.0):
        """
        Initialize the simulator.

        Args:
            graph: The (expanded) application graph the schedule was made for
            cost_model: Contracts and case selection used to cost placements
            comm_cost_ms: Per-edge token latency
        """
        self.graph = graph
        self.cost_model = cost_model
        self.comm_cost_ms = comm_cost_ms

    def _violation(self, message: str, time_ms: float, task: str) -> SimulationViolation:
        return SimulationViolation(message, SimEvent(time_ms, EventKind.TASK_START, task))

    def _check_coverage(self, schedule: Schedule) -> Dict[str, Placement]:
        placed: Dict[str, Placement] = {}
        for placement in schedule.placements:
            if placement.task not in self.graph:
                raise self._violation(f"unknown task {placement.task} in schedule", placement.start_ms, placement.task)
            if placement.task in placed:
                raise self._violation(f"task {placement.task} is placed twice", placement.start_ms, placement.task)
            placed[placement.task] = placement
        for name in self.graph.node_names:
            if name not in placed:
                raise SimulationViolation(f"task {name} is not placed")
        return placed

    def _resolve(self, placement: Placement) -> TaskOption:
        task = self.graph.node(placement.task)
        try:
            return self.cost_model.option(task, placement.unit, placement.version, placement.opp)
        except MissingContractError as e:
            raise self._violation(f"missing contract: {e}", placement.start_ms, placement.task) from None
        except SchedulingError as e:
            raise self._violation(f"incompatible placement: {e}", placement.start_ms, placement.task) from None

    def _replay_times(self, placed: Dict[str, Placement], options: Dict[str, TaskOption]) -> Times:
        """Keep every unit's task order and let durations follow the requested case."""
        rank = {name: i for i, name in enumerate(self.graph.topo_order)}
        order = sorted(placed.values(), key=lambda p: (p.start_ms, rank[p.task]))
        unit_free: Dict[str, float] = defaultdict(float)
        times: Times = {}
        for placement in order:
            name = placement.task
            ready = max((times[p][1] + self.comm_cost_ms for p in self.graph.predecessors(name)), default=0.0)
            start = max(ready, unit_free[placement.unit])
            finish = start + options[name].time_ms
            unit_free[placement.unit] = finish
            times[name] = (start, finish)
        return times

    def _run_events(
        self,
        placed: Dict[str, Placement],
        options: Dict[str, TaskOption],
        times: Times,
        check_durations: bool,
    ) -> Tuple[List[SimEvent], Dict[str, List[int]]]:
        heap: List[Tuple[float, int, str, EventKind]] = []
        for name, (start, _) in times.items():
            heapq.heappush(heap, (start, _PHASE[EventKind.TASK_START], name, EventKind.TASK_START))

        trace: List[SimEvent] = []
        tokens: Dict[Edge, List[int]] = {edge: [0, 0] for edge in self.graph.edges}
        running_on: Dict[str, Tuple[str, float]] = {}

        while heap:
            time_ms, _, name, kind = heapq.heappop(heap)
            placement = placed[name]
            start, finish = times[name]

            if kind is EventKind.TASK_FINISH:
                trace.append(SimEvent(time_ms, EventKind.TASK_FINISH, name))
                for edge in self.graph.out_edges(name):
                    tokens[edge][0] += 1
                    trace.append(SimEvent(time_ms, EventKind.TOKEN_PRODUCED, str(edge)))
                continue

            if start < 0:
                raise self._violation(f"task {name} starts before t=0", start, name)
            option = options.get(name)
            if option is None:
                option = options[name] = self._resolve(placement)
            if check_durations and not _close(finish - start, option.time_ms):
                raise self._violation(
                    f"duration: {name} runs {finish - start:.3f} ms on {placement.unit}, "
                    f"contract gives {option.time_ms:.3f} ms",
                    start, name,
                )
            for edge in self.graph.in_edges(name):
                producer_finish = times[edge.producer][1]
                available = producer_finish + self.comm_cost_ms
                if not within(available, start):
                    raise self._violation(
                        f"precedence: {edge.producer}.{edge.producer_port} not available at t={start:.3f}",
                        start, name,
                    )
            busy = running_on.get(placement.unit)
            if busy is not None and not within(busy[1], start):
                raise self._violation(
                    f"unit overlap: {name} starts on {placement.unit} at t={start:.3f} "
                    f"while {busy[0]} runs until {busy[1]:.3f}",
                    start, name,
                )

            for edge in self.graph.in_edges(name):
                tokens[edge][1] += 1
                trace.append(SimEvent(start, EventKind.TOKEN_CONSUMED, str(edge)))
            trace.append(SimEvent(start, EventKind.TASK_START, name))
            running_on[placement.unit] = (name, finish)
            heapq.heappush(heap, (finish, _PHASE[EventKind.TASK_FINISH], name, EventKind.TASK_FINISH))

        counts = {str(edge): tokens[edge] for edge in sorted(tokens)}
        return trace, counts

    def run(self, schedule: Schedule) -> SimReport:
        """
        Replay ``schedule``.

        The replay is strict when the cost model's case matches the
        schedule's; otherwise each unit keeps its task order and the times
        are recomputed data-driven.

        Raises:
            SimulationViolation: the first illegal event found
        """
        placed = self._check_coverage(schedule)
        options: Dict[str, TaskOption] = {}
        original = {name: (p.start_ms, p.finish_ms) for name, p in placed.items()}

        if self.cost_model.use_average == schedule.use_average:
            replay = ReplayKind.STRICT
            times = original
            trace, counts = self._run_events(placed, options, times, check_durations=True)
        else:
            replay = ReplayKind.DATA_DRIVEN
            self._run_events(placed, options, original, check_durations=False)
            times = self._replay_times(placed, options)
            trace, counts = self._run_events(placed, options, times, check_durations=False)

        makespan = max((event.time_ms for event in trace), default=0.0)
        busy: Dict[str, List[float]] = defaultdict(list)
        energy: Dict[str, List[float]] = defaultdict(list)
        intervals: Dict[str, List[Tuple[str, float, float]]] = defaultdict(list)
        for name, (start, finish) in times.items():
            unit = placed[name].unit
            busy[unit].append(finish - start)
            energy[unit].append(options[name].energy_mj)
            intervals[unit].append((name, start, finish))

        per_unit: Dict[str, UnitUsage] = {}
        for unit in self.cost_model.platform.unit_names:
            busy_ms = math.fsum(busy.get(unit, ()))
            per_unit[unit] = UnitUsage(busy_ms, makespan - busy_ms, math.fsum(energy.get(unit, ())))

        dynamic = math.fsum(options[name].energy_mj for name in times)
        static = static_energy(self.cost_model.platform, makespan)
        deadline_met = within(makespan, schedule.deadline_ms)
        if schedule.feasible and not deadline_met:
            raise SimulationViolation(
                f"deadline: makespan {makespan:.3f} ms exceeds deadline {schedule.deadline_ms:.3f} ms "
                "on a schedule marked feasible"
            )

        report = SimReport(
            makespan_ms=makespan,
            per_unit=per_unit,
            static_mj=static,
            dynamic_mj=dynamic,
            total_mj=dynamic + static,
            deadline_ms=schedule.deadline_ms,
            deadline_met=deadline_met,
            event_trace=tuple(trace),
            intervals={u: tuple(sorted(v, key=lambda i: (i[1], i[0]))) for u, v in sorted(intervals.items())},
            token_counts={k: (v[0], v[1]) for k, v in counts.items()},
            replay=replay,
        )
        logger.info(
            f"Simulation ({replay.value}): makespan {makespan:.3f} ms, total {report.total_mj:.3f} mJ, "
            f"deadline {'met' if deadline_met else 'missed'}"
        )
        return report


def simulate(graph: AppGraph, schedule: Schedule, cost_model: CostModel, comm_cost_ms: float = 0.0) -> SimReport:
    """Replay ``schedule``; see Simulator.run."""
    return Simulator(graph, cost_model, comm_cost_ms).run(schedule)


def write_trace(report: SimReport, path: Union[str, Path]) -> None:
    """Write the event trace as JSON lines with keys t_ms, kind and subject."""
    with open(path, "w", encoding="utf-8") as f:
        for event in report.event_trace:
            f.write(json.dumps(event.to_dict(), sort_keys=True) + "\n")
