"""
Tests for the discrete-event replay.
"""

import json
from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import WIFI_FORKJOIN, WIFI_FORKJOIN_FT, WIFI_MONO, load_graph
from coordsched_cli.core.graph.ft_expansion import expand_ft
from coordsched_cli.core.scheduling.exhaustive import schedule_exhaustive
from coordsched_cli.core.scheduling.heuristic import schedule_energy, schedule_makespan
from coordsched_cli.core.scheduling.model import Placement, SchedulerConfig, SchedulingMode, within
from coordsched_cli.core.simulation.simulator import EventKind, ReplayKind, UnitUsage, simulate, write_trace
from coordsched_cli.errors import SimulationViolation
from strategies import OPP, cost_model, dag_graph, make_unit, manual_schedule, random_instance

ENERGY = SchedulerConfig(mode=SchedulingMode.ENERGY)
MAKESPAN = SchedulerConfig(mode=SchedulingMode.MAKESPAN)
EXACT = SchedulerConfig(mode=SchedulingMode.EXACT)


def moved(schedule, task, **changes):
    placements = [replace(p, **changes) if p.task == task else p for p in schedule.placements]
    return replace(schedule, placements=tuple(placements))


def two_independent(static_mw=0.0):
    graph = dag_graph(2, [], deadline_ms=20)
    costs = cost_model([make_unit("u0", "A", static_mw=static_mw), make_unit("u1", "A")], {
        ("T0", "v1", "A", OPP): (4, 1),
        ("T1", "v1", "A", OPP): (4, 1),
    })
    return graph, costs


class TestAgreement:
    def test_vision_energy_schedule(self, vision_graph, vision_costs):
        schedule = schedule_energy(vision_graph, vision_costs, ENERGY)
        report = simulate(vision_graph, schedule, vision_costs)
        assert report.replay is ReplayKind.STRICT
        assert report.makespan_ms == pytest.approx(schedule.predicted_makespan_ms)
        assert report.dynamic_mj == pytest.approx(schedule.predicted_dynamic_mj)
        assert report.static_mj == pytest.approx(schedule.predicted_static_mj)
        assert report.total_mj == pytest.approx(schedule.predicted_total_mj)
        assert report.deadline_met
        for usage in report.per_unit.values():
            assert usage.busy_ms + usage.idle_ms == pytest.approx(report.makespan_ms)
        assert set(report.per_unit) == set(vision_costs.platform.unit_names)

    def test_chain_totals(self):
        graph = dag_graph(2, [(0, 1)], deadline_ms=20)
        costs = cost_model([make_unit("u0", "A", static_mw=500)], {
            ("T0", "v1", "A", OPP): (4, 5),
            ("T1", "v1", "A", OPP): (6, 8),
        })
        report = simulate(graph, schedule_makespan(graph, costs, MAKESPAN), costs)
        assert (report.makespan_ms, report.dynamic_mj, report.static_mj, report.total_mj) == pytest.approx(
            (10.0, 13.0, 5.0, 18.0)
        )
        assert report.per_unit["u0"].busy_ms == 10.0
        assert report.intervals == {"u0": (("T0", 0.0, 4.0), ("T1", 4.0, 10.0))}

    def test_one_token_per_edge(self, vision_graph, vision_costs):
        report = simulate(vision_graph, schedule_energy(vision_graph, vision_costs, ENERGY), vision_costs)
        assert len(report.token_counts) == 5
        assert set(report.token_counts.values()) == {(1, 1)}
        assert "ImageCapture.frame -> OpticalFlow.frame" in report.token_counts

    def test_trace_is_time_ordered(self, vision_graph, vision_costs):
        report = simulate(vision_graph, schedule_energy(vision_graph, vision_costs, ENERGY), vision_costs)
        times = [event.time_ms for event in report.event_trace]
        assert times == sorted(times)
        kinds = [event.kind for event in report.event_trace]
        assert kinds.count(EventKind.TASK_START) == 5
        assert kinds.count(EventKind.TASK_FINISH) == 5
        assert kinds.count(EventKind.TOKEN_PRODUCED) == kinds.count(EventKind.TOKEN_CONSUMED) == 5

    def test_empty_schedule(self):
        graph = dag_graph(0, [])
        costs = cost_model([make_unit("u0", "A", static_mw=100)], {})
        report = simulate(graph, schedule_energy(graph, costs, ENERGY), costs)
        assert report.makespan_ms == 0.0
        assert report.total_mj == 0.0
        assert report.event_trace == ()


class TestDataDrivenReplay:
    def test_average_case_replay_is_never_slower(self, vision_graph, vision_costs):
        schedule = schedule_energy(vision_graph, vision_costs, ENERGY)
        average = vision_costs.with_case(True)
        report = simulate(vision_graph, schedule, average)
        assert report.replay is ReplayKind.DATA_DRIVEN
        assert report.makespan_ms <= schedule.predicted_makespan_ms + 1e-9
        assert report.dynamic_mj < schedule.predicted_dynamic_mj
        assert report.deadline_met
        for unit, rows in report.intervals.items():
            planned = [p.task for p in schedule.by_unit()[unit]]
            assert [task for task, _, _ in rows] == planned


class TestViolations:
    def test_consumer_starts_before_its_input(self, vision_graph, vision_costs):
        schedule = schedule_makespan(vision_graph, vision_costs, MAKESPAN)
        flow = schedule.placement("OpticalFlow")
        finish = schedule.placement("DecisionMaking").start_ms + 1
        broken = moved(schedule, "OpticalFlow", start_ms=finish - flow.duration_ms, finish_ms=finish)
        with pytest.raises(SimulationViolation) as excinfo:
            simulate(vision_graph, broken, vision_costs)
        assert str(excinfo.value).startswith("precedence: OpticalFlow.motion not available at t=")
        assert excinfo.value.event.subject == "DecisionMaking"

    def test_wrong_duration(self, vision_graph, vision_costs):
        schedule = schedule_makespan(vision_graph, vision_costs, MAKESPAN)
        recorder = schedule.placement("DecisionRec")
        broken = moved(schedule, "DecisionRec", finish_ms=recorder.finish_ms + 1)
        with pytest.raises(SimulationViolation, match="duration: DecisionRec runs"):
            simulate(vision_graph, broken, vision_costs)

    def test_unit_overlap(self):
        graph, costs = two_independent()
        schedule = manual_schedule([
            Placement("T0", "u0", "v1", OPP, 0.0, 4.0),
            Placement("T1", "u0", "v1", OPP, 2.0, 6.0),
        ])
        with pytest.raises(SimulationViolation, match="unit overlap: T1 starts on u0 at t=2.000 while T0 runs until 4.000"):
            simulate(graph, schedule, costs)

    def test_task_not_placed(self):
        graph, costs = two_independent()
        schedule = manual_schedule([Placement("T0", "u0", "v1", OPP, 0.0, 4.0)])
        with pytest.raises(SimulationViolation, match="task T1 is not placed"):
            simulate(graph, schedule, costs)

    def test_incompatible_unit(self, vision_graph, vision_costs):
        schedule = schedule_makespan(vision_graph, vision_costs, MAKESPAN)
        broken = moved(schedule, "DecisionRec", unit="GPU0", opp="800MHz@0.90V")
        with pytest.raises(SimulationViolation, match="incompatible placement"):
            simulate(vision_graph, broken, vision_costs)

    def test_feasible_flag_checked(self):
        graph, costs = two_independent()
        schedule = manual_schedule([
            Placement("T0", "u0", "v1", OPP, 0.0, 4.0),
            Placement("T1", "u1", "v1", OPP, 0.0, 4.0),
        ], deadline_ms=3.0, feasible=True)
        with pytest.raises(SimulationViolation, match="deadline: makespan 4.000 ms exceeds deadline 3.000 ms"):
            simulate(graph, schedule, costs)

    def test_missed_deadline_reported_when_not_claimed(self):
        graph, costs = two_independent(static_mw=250)
        schedule = manual_schedule([
            Placement("T0", "u0", "v1", OPP, 0.0, 4.0),
            Placement("T1", "u0", "v1", OPP, 4.0, 8.0),
        ], deadline_ms=6.0, feasible=False)
        report = simulate(graph, schedule, costs)
        assert not report.deadline_met
        assert report.per_unit["u1"] == UnitUsage(0.0, 8.0, 0.0)
        assert report.static_mj == pytest.approx(2.0)


class TestTraceFile:
    def test_json_lines(self, tmp_path, vision_graph, vision_costs):
        report = simulate(vision_graph, schedule_energy(vision_graph, vision_costs, ENERGY), vision_costs)
        path = tmp_path / "trace.jsonl"
        write_trace(report, path)
        lines = [json.loads(line) for line in path.read_text().splitlines()]
        assert len(lines) == len(report.event_trace)
        assert set(lines[0]) == {"t_ms", "kind", "subject"}
        assert lines[0] == {"t_ms": 0.0, "kind": "task_start", "subject": "ImageCapture"}


def assert_agrees(graph, schedule, costs):
    report = simulate(graph, schedule, costs)
    assert report.replay is ReplayKind.STRICT
    assert report.makespan_ms == pytest.approx(schedule.predicted_makespan_ms)
    assert report.dynamic_mj == pytest.approx(schedule.predicted_dynamic_mj)
    assert report.static_mj == pytest.approx(schedule.predicted_static_mj)
    assert report.total_mj == pytest.approx(schedule.predicted_total_mj)
    assert report.deadline_met == within(schedule.predicted_makespan_ms, schedule.deadline_ms)


def mutations(graph, schedule):
    """Edits that each make ``schedule`` illegal, labelled for failure messages."""
    placements = {p.task: p for p in schedule.placements}
    for name, placement in sorted(placements.items()):
        yield f"stretch {name}", moved(schedule, name, start_ms=placement.start_ms + placement.duration_ms / 2)
        yield f"unknown OPP for {name}", moved(schedule, name, opp="999MHz@0.99V")
        yield f"drop {name}", replace(schedule, placements=tuple(p for p in schedule.placements if p.task != name))
        for pred in graph.predecessors(name):
            early = placements[pred].start_ms
            yield f"{name} before {pred}", moved(
                schedule, name, start_ms=early, finish_ms=early + placement.duration_ms
            )
    for rows in schedule.by_unit().values():
        if len(rows) >= 2:
            first, second = sorted(rows, key=lambda p: p.start_ms)[:2]
            yield f"stack {second.task} on {first.task}", moved(
                schedule, second.task, start_ms=first.start_ms, finish_ms=first.start_ms + second.duration_ms
            )


class TestWifiAgreement:
    @pytest.mark.parametrize("app", [WIFI_MONO, WIFI_FORKJOIN, WIFI_FORKJOIN_FT])
    def test_fastest_schedule(self, app, wifi_costs):
        graph = expand_ft(load_graph(app))
        assert_agrees(graph, schedule_makespan(graph, wifi_costs, MAKESPAN), wifi_costs)

    def test_energy_schedule(self, wifi_costs):
        graph = load_graph(WIFI_FORKJOIN)
        schedule = schedule_energy(graph, wifi_costs, ENERGY)
        assert_agrees(graph, schedule, wifi_costs)
        assert simulate(graph, schedule, wifi_costs).total_mj == pytest.approx(103.6)


@pytest.mark.acceptance
class TestReplayProperties:
    @settings(max_examples=150, deadline=None)
    @given(st.randoms(use_true_random=False))
    def test_every_scheduler_agrees_with_the_replay(self, rng):
        graph, costs, slack = random_instance(rng)
        fast = schedule_makespan(graph, costs, MAKESPAN)
        deadline = fast.predicted_makespan_ms * slack
        for schedule in (
            fast,
            schedule_energy(graph, costs, ENERGY, deadline_ms=deadline),
            schedule_exhaustive(graph, costs, EXACT, deadline_ms=deadline),
        ):
            assert_agrees(graph, schedule, costs)

    @settings(max_examples=100, deadline=None)
    @given(st.randoms(use_true_random=False))
    def test_every_illegal_edit_is_rejected(self, rng):
        graph, costs, _ = random_instance(rng)
        schedule = schedule_makespan(graph, costs, MAKESPAN)
        for label, broken in mutations(graph, schedule):
            with pytest.raises(SimulationViolation):
                simulate(graph, broken, costs)
                pytest.fail(f"accepted: {label}")
