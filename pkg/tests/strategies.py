"""
Builders and hypothesis strategies for random applications, platforms and contracts.
"""

import random
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from hypothesis import strategies as st

from coordsched_cli.core.contracts.store import (
    ContractEntry,
    ContractKey,
    ContractStore,
    EnergyContract,
    TimeContract,
)
from coordsched_cli.core.dsl.declarations import FtAnnotation, Objective, PortDecl, PortDirection, VersionDecl
from coordsched_cli.core.dsl.parser import parse_app
from coordsched_cli.core.graph.model import AppGraph, Edge, TaskNode, assemble_graph, build_graph
from coordsched_cli.core.platform.energy import OperatingPoint, Platform, ProcessingUnit, ScalingModel
from coordsched_cli.core.scheduling.costs import CostModel
from coordsched_cli.core.scheduling.model import Placement, Schedule, SchedulingMode

DATA = "D"
OPP = "1000MHz@1.00V"


def graph_from_source(text: str) -> AppGraph:
    decl = parse_app(text, "<test>")
    assert not isinstance(decl, list), [d.render() for d in decl]
    graph = build_graph(decl)
    assert not isinstance(graph, list), [d.render() for d in graph]
    return graph


def task_node(
    name: str,
    preds: Sequence[str],
    unit_types: Sequence[str],
    ft: Optional[int] = None,
    versions: Sequence[str] = ("v1",),
) -> TaskNode:
    """A task with one input per predecessor and a single output ``out``."""
    ports = [PortDecl(PortDirection.INPUT, DATA, f"in_{p}") for p in preds]
    ports.append(PortDecl(PortDirection.OUTPUT, DATA, "out"))
    return TaskNode(
        name,
        tuple(ports),
        tuple(VersionDecl(v, tuple(unit_types)) for v in versions),
        FtAnnotation(ft) if ft else None,
    )


def dag_graph(
    size: int,
    edges: Iterable[Tuple[int, int]],
    unit_types: Sequence[str] = ("A",),
    deadline_ms: float = 100.0,
    ft: Optional[Dict[int, int]] = None,
    objective: Objective = Objective.MINIMIZE_ENERGY,
) -> AppGraph:
    """Graph over tasks T0..T<size-1>; every (i, j) edge needs i < j."""
    ft = ft or {}
    names = [f"T{i}" for i in range(size)]
    pairs = sorted(set(edges))
    preds: Dict[int, List[int]] = {j: [] for j in range(size)}
    for i, j in pairs:
        preds[j].append(i)
    nodes = [task_node(names[j], [names[i] for i in preds[j]], unit_types, ft.get(j)) for j in range(size)]
    links = [Edge(names[i], "out", names[j], f"in_{names[i]}") for i, j in pairs]
    graph = assemble_graph("Random", nodes, links, max(deadline_ms, 1.0) * 2, deadline_ms, objective)
    assert not isinstance(graph, list), [d.render() for d in graph]
    return graph


def make_unit(name: str, unit_type: str, opps: Sequence[str] = (OPP,), static_mw: float = 0.0) -> ProcessingUnit:
    return ProcessingUnit(name, unit_type, tuple(OperatingPoint.parse(o) for o in opps), static_mw)


def make_store(cells: Dict[Tuple[str, str, str, str], Tuple[float, float]]) -> ContractStore:
    """(component, version, unit type, opp) -> (time_ms, energy_mj); average case equals worst case."""
    entries = {
        ContractKey(*key): ContractEntry(TimeContract(t, t), EnergyContract(e, e))
        for key, (t, e) in cells.items()
    }
    return ContractStore(entries)


def cost_model(units: Sequence[ProcessingUnit], cells, name: str = "test") -> CostModel:
    platform = Platform(name, tuple(units))
    return CostModel(platform, make_store(cells), ScalingModel.for_platform(platform))


@st.composite
def dag_shapes(draw, max_nodes: int = 12) -> Tuple[int, Set[Tuple[int, int]]]:
    """(size, forward edges) of a random DAG."""
    size = draw(st.integers(min_value=1, max_value=max_nodes))
    pairs = [(i, j) for j in range(size) for i in range(j)]
    chosen = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return size, {pair for pair, keep in zip(pairs, chosen) if keep}


@st.composite
def ft_graphs(draw, max_nodes: int = 8) -> Tuple[AppGraph, Dict[int, int]]:
    size, edges = draw(dag_shapes(max_nodes))
    annotated = draw(st.dictionaries(
        st.integers(min_value=0, max_value=size - 1),
        st.sampled_from((2, 3, 5, 7)),
        max_size=size,
    ))
    return dag_graph(size, edges, ft=annotated), annotated


def random_instance(rng: random.Random, max_tasks: int = 5, max_units: int = 3, max_opps: int = 2):
    """
    A small scheduling instance: (graph, cost model, critical-path slack factor).

    Units of one type share their OPPs; every task runs on every type and
    every cell carries an exact integer contract.
    """
    size = rng.randint(1, max_tasks)
    edges = {(i, j) for j in range(size) for i in range(j) if rng.random() < 0.4}

    unit_count = rng.randint(1, max_units)
    types = ["A", "B"][: rng.randint(1, min(2, unit_count))]
    type_opps = {
        t: sorted({f"{rng.choice((600, 800, 1000, 1400))}MHz@{rng.choice((0.8, 0.9, 1.0, 1.1)):.2f}V"
                   for _ in range(rng.randint(1, max_opps))})
        for t in types
    }
    units = []
    for index in range(unit_count):
        unit_type = types[index % len(types)]
        units.append(make_unit(f"u{index}", unit_type, type_opps[unit_type], float(rng.choice((0, 50, 100, 200, 400)))))

    cells = {}
    for j in range(size):
        for unit_type in types:
            for opp in type_opps[unit_type]:
                cells[(f"T{j}", "v1", unit_type, opp)] = (float(rng.randint(1, 10)), float(rng.randint(1, 10)))

    graph = dag_graph(size, edges, types)
    return graph, cost_model(units, cells), rng.uniform(1.0, 3.0)


def little_big_pair(scale: float = 1.0) -> Tuple[AppGraph, CostModel]:
    """Two independent tasks; a slow frugal unit L and a fast hungry unit B."""
    graph = dag_graph(2, [], unit_types=("L", "B"), deadline_ms=10 * scale)
    cells = {}
    for task in ("T0", "T1"):
        cells[(task, "v1", "L", OPP)] = (10 * scale, 5 * scale)
        cells[(task, "v1", "B", OPP)] = (4 * scale, 8 * scale)
    units = [make_unit("L", "L", static_mw=100), make_unit("B", "B", static_mw=400)]
    return graph, cost_model(units, cells)


def assert_valid(schedule, graph: AppGraph) -> None:
    """Every task placed once, precedence respected, no overlap on a unit."""
    assert sorted(schedule.tasks) == sorted(graph.node_names)
    for edge in graph.edges:
        assert schedule.placement(edge.producer).finish_ms <= schedule.placement(edge.consumer).start_ms + 1e-9
    for placements in schedule.by_unit().values():
        ordered = sorted(placements, key=lambda p: p.start_ms)
        for before, after in zip(ordered, ordered[1:]):
            assert before.finish_ms <= after.start_ms + 1e-9


def manual_schedule(placements: Sequence[Placement], deadline_ms: float = 20.0, feasible: bool = True) -> Schedule:
    """A hand-written schedule; predicted energies are left at zero."""
    makespan = max((p.finish_ms for p in placements), default=0.0)
    return Schedule(tuple(placements), makespan, 0.0, 0.0, 0.0, Objective.MINIMIZE_ENERGY,
                    SchedulingMode.ENERGY, deadline_ms, feasible)
