"""
Tests for the text Gantt chart.
"""

from coordsched_cli.core.scheduling.heuristic import schedule_energy, schedule_makespan
from coordsched_cli.core.scheduling.model import Placement, SchedulerConfig
from coordsched_cli.core.simulation.gantt import gantt
from coordsched_cli.core.simulation.simulator import simulate
from strategies import OPP, cost_model, dag_graph, make_unit, manual_schedule

CONFIG = SchedulerConfig(mode="makespan")


def chain():
    graph = dag_graph(2, [(0, 1)], deadline_ms=20)
    costs = cost_model([make_unit("u0", "A"), make_unit("u1", "A")], {
        ("T0", "v1", "A", OPP): (4, 5),
        ("T1", "v1", "A", OPP): (6, 8),
    })
    return graph, costs


def test_chain_rows():
    graph, costs = chain()
    chart = gantt(schedule_makespan(graph, costs, CONFIG), width=10)
    assert chart.splitlines() == [
        "unit |0 10.000 ms|",
        "u0   |T0--T1----|",
    ]


def test_idle_units_listed_on_request():
    graph, costs = chain()
    chart = gantt(schedule_makespan(graph, costs, CONFIG), width=10, units=("u0", "u1"))
    assert chart.splitlines()[-1] == "u1   |..........|"


def test_minimum_width():
    graph, costs = chain()
    row = gantt(schedule_makespan(graph, costs, CONFIG), width=3).splitlines()[1]
    assert row == "u0   |T0--T1----|"


def test_idle_gap_and_short_task():
    schedule = manual_schedule([
        Placement("Long", "cpu", "v1", OPP, 0.0, 5.0),
        Placement("x", "cpu", "v1", OPP, 7.5, 7.6),
        Placement("Tail", "cpu", "v1", OPP, 9.0, 10.0),
    ])
    row = gantt(schedule, width=20).splitlines()[1]
    assert row == "cpu  |Long------.....x..Ta|"


def test_empty_schedule_has_header_only():
    graph = dag_graph(0, [])
    costs = cost_model([make_unit("u0", "A")], {})
    schedule = schedule_energy(graph, costs, CONFIG)
    assert gantt(schedule, width=10).splitlines() == ["unit |0 0.000 ms|"]
    assert gantt(schedule, width=10, units=["u0"]).splitlines()[1] == "u0   |..........|"


def test_simulation_report_renders_like_the_schedule(vision_graph, vision_costs):
    schedule = schedule_energy(vision_graph, vision_costs, SchedulerConfig())
    report = simulate(vision_graph, schedule, vision_costs)
    assert gantt(report, width=40) == gantt(schedule, width=40)
