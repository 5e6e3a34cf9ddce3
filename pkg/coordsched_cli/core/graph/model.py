"""
Typed streaming network: construction, static validation and activation waves.
"""

import json
import logging
from collections import defaultdict
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

import networkx as nx

from coordsched_cli.core.dsl.declarations import (
    AppDecl,
    FtAnnotation,
    Objective,
    PortDecl,
    PortDirection,
    VersionDecl,
)
from coordsched_cli.core.dsl.diagnostics import Diagnostic, DiagnosticCollector, SourceSpan, has_errors
from coordsched_cli.errors import GraphError

logger = logging.getLogger(__name__)


class TaskRole(str, Enum):
    """Origin of a task node."""
    COMPONENT = "component"
    REPLICA = "replica"
    VOTER = "voter"


class NodeCategory(str, Enum):
    SOURCE = "source"
    SINK = "sink"
    INTERIOR = "interior"


@dataclass(frozen=True)
class NodeKind:
    """Structural classification of a node by its ports."""
    kind: NodeCategory
    stateless: bool


@dataclass(frozen=True)
class TaskNode:
    """
    A schedulable component instance.

    ``contract_name`` is the component name used for contract lookups;
    replicas share the original's, voters use the reserved voter name.
    """
    name: str
    ports: Tuple[PortDecl, ...]
    versions: Tuple[VersionDecl, ...]
    ft: Optional[FtAnnotation] = None
    contract_name: str = ""
    role: TaskRole = TaskRole.COMPONENT
    replica_of: Optional[str] = None
    span: Optional[SourceSpan] = field(default=None, compare=False)

    def __post_init__(self):
        if not self.contract_name:
            object.__setattr__(self, "contract_name", self.name)

    @property
    def inputs(self) -> Tuple[PortDecl, ...]:
        return tuple(p for p in self.ports if p.direction is PortDirection.INPUT)

    @property
    def outputs(self) -> Tuple[PortDecl, ...]:
        return tuple(p for p in self.ports if p.direction is PortDirection.OUTPUT)

    @property
    def states(self) -> Tuple[PortDecl, ...]:
        return tuple(p for p in self.ports if p.direction is PortDirection.STATE)

    def port(self, name: str) -> Optional[PortDecl]:
        for port in self.ports:
            if port.port_name == name:
                return port
        return None

    def version(self, name: str) -> Optional[VersionDecl]:
        for version in self.versions:
            if version.version_name == name:
                return version
        return None


@dataclass(frozen=True, order=True)
class Edge:
    """A channel from ``producer.producer_port`` to ``consumer.consumer_port``."""
    producer: str
    producer_port: str
    consumer: str
    consumer_port: str
    span: Optional[SourceSpan] = field(default=None, compare=False)

    def __str__(self) -> str:
        return f"{self.producer}.{self.producer_port} -> {self.consumer}.{self.consumer_port}"


@dataclass(frozen=True)
class AppGraph:
    """
    A validated acyclic streaming network.

    Instances are only created through build_graph/assemble_graph, so every
    AppGraph satisfies the soundness rules checked by check_soundness.
    """
    app_name: str
    nodes: Tuple[TaskNode, ...]
    edges: FrozenSet[Edge]
    period_ms: float
    deadline_ms: float
    objective: Objective = Objective.MINIMIZE_ENERGY
    topo_order: Tuple[str, ...] = field(default=(), compare=False)
    warnings: Tuple[Diagnostic, ...] = field(default=(), compare=False)

    @cached_property
    def _by_name(self) -> Dict[str, TaskNode]:
        return {node.name: node for node in self.nodes}

    @cached_property
    def _in_edges(self) -> Dict[str, List[Edge]]:
        result: Dict[str, List[Edge]] = defaultdict(list)
        for edge in sorted(self.edges):
            result[edge.consumer].append(edge)
        return result

    @cached_property
    def _out_edges(self) -> Dict[str, List[Edge]]:
        result: Dict[str, List[Edge]] = defaultdict(list)
        for edge in sorted(self.edges):
            result[edge.producer].append(edge)
        return result

    @property
    def node_names(self) -> List[str]:
        return [node.name for node in self.nodes]

    def __len__(self) -> int:
        return len(self.nodes)

    def __contains__(self, name: object) -> bool:
        return name in self._by_name

    def node(self, name: str) -> TaskNode:
        try:
            return self._by_name[name]
        except KeyError:
            raise GraphError(f"unknown node {name}") from None

    def in_edges(self, name: str) -> List[Edge]:
        return list(self._in_edges.get(name, ()))

    def out_edges(self, name: str) -> List[Edge]:
        return list(self._out_edges.get(name, ()))

    def predecessors(self, name: str) -> List[str]:
        return sorted({edge.producer for edge in self._in_edges.get(name, ())})

    def successors(self, name: str) -> List[str]:
        return sorted({edge.consumer for edge in self._out_edges.get(name, ())})

    def to_networkx(self) -> nx.DiGraph:
        return _task_digraph(self.node_names, self.edges)


def _task_digraph(names: Iterable[str], edges: Iterable[Edge]) -> nx.DiGraph:
    digraph = nx.DiGraph()
    digraph.add_nodes_from(sorted(names))
    digraph.add_edges_from(sorted({(e.producer, e.consumer) for e in edges}))
    return digraph


def _find_cycle(names: Sequence[str], edges: Iterable[Edge]) -> Optional[List[str]]:
    digraph = _task_digraph(names, edges)
    try:
        cycle = nx.find_cycle(digraph, source=sorted(digraph.nodes))
    except nx.NetworkXNoCycle:
        return None
    path = [cycle[0][0]] + [v for _, v in cycle]
    return path


def check_soundness(
    nodes: Sequence[TaskNode],
    edges: Iterable[Edge],
) -> List[Diagnostic]:
    """
    Check every soundness rule of a streaming network.

    All violations are reported; none aborts the others. Unconnected
    output ports produce warnings.
    """
    collector = DiagnosticCollector()
    edges = sorted(set(edges))

    by_name: Dict[str, TaskNode] = {}
    for node in nodes:
        if node.name in by_name:
            collector.error(f"duplicate component '{node.name}'", node.span)
            continue
        by_name[node.name] = node

    producers: Dict[Tuple[str, str], List[Edge]] = defaultdict(list)
    consumed: set = set()
    resolved: List[Edge] = []

    for edge in edges:
        producer = by_name.get(edge.producer)
        consumer = by_name.get(edge.consumer)
        if producer is None or consumer is None:
            missing = edge.producer if producer is None else edge.consumer
            collector.error(f"unknown component {missing}", edge.span)
            continue
        out_port = producer.port(edge.producer_port)
        in_port = consumer.port(edge.consumer_port)
        if out_port is None or out_port.direction is not PortDirection.OUTPUT:
            collector.error(f"{edge.producer}.{edge.producer_port} is not an output port", edge.span)
            continue
        if in_port is None or in_port.direction is not PortDirection.INPUT:
            collector.error(f"{edge.consumer}.{edge.consumer_port} is not an input port", edge.span)
            continue
        resolved.append(edge)
        consumed.add((edge.producer, edge.producer_port))
        producers[(edge.consumer, edge.consumer_port)].append(edge)
        if out_port.data_type != in_port.data_type:
            collector.error(
                f"type mismatch on edge {edge}: {out_port.data_type} vs {in_port.data_type}",
                edge.span,
            )

    for node in by_name.values():
        for port in node.inputs:
            feeding = producers.get((node.name, port.port_name), [])
            if not feeding:
                collector.error(f"unconnected input port {node.name}.{port.port_name}", port.span or node.span)
            elif len(feeding) > 1:
                sources = ", ".join(f"{e.producer}.{e.producer_port}" for e in feeding)
                collector.error(
                    f"input port {node.name}.{port.port_name} has {len(feeding)} producers: {sources}",
                    feeding[1].span or port.span,
                )
        for port in node.outputs:
            if (node.name, port.port_name) not in consumed:
                collector.warning(f"output port {node.name}.{port.port_name} is not consumed", port.span or node.span)

    cycle = _find_cycle(list(by_name), resolved)
    if cycle is not None:
        first = next((e for e in resolved if e.producer == cycle[0] and e.consumer == cycle[1]), None)
        collector.error("cycle: " + " -> ".join(cycle), first.span if first else None)

    return collector.diagnostics


def validate_graph(graph: AppGraph) -> List[Diagnostic]:
    """Re-run every soundness rule on an already built graph."""
    return check_soundness(graph.nodes, graph.edges)


def assemble_graph(
    app_name: str,
    nodes: Sequence[TaskNode],
    edges: Iterable[Edge],
    period_ms: float,
    deadline_ms: float,
    objective: Objective = Objective.MINIMIZE_ENERGY,
) -> Union[AppGraph, List[Diagnostic]]:
    """Validate nodes and edges and freeze them into an AppGraph."""
    edges = frozenset(edges)
    diags = check_soundness(nodes, edges)
    if has_errors(diags):
        return diags
    digraph = _task_digraph([n.name for n in nodes], edges)
    topo = tuple(nx.lexicographical_topological_sort(digraph))
    for warning in diags:
        logger.warning(warning.render())
    return AppGraph(
        app_name=app_name,
        nodes=tuple(nodes),
        edges=edges,
        period_ms=period_ms,
        deadline_ms=deadline_ms,
        objective=objective,
        topo_order=topo,
        warnings=tuple(diags),
    )


def build_graph(decl: AppDecl) -> Union[AppGraph, List[Diagnostic]]:
    """
    Build and statically validate the streaming network of an application.

    Returns:
        The AppGraph, or every diagnostic found (errors and warnings)
    """
    nodes = [
        TaskNode(comp.name, comp.ports, comp.versions, comp.ft, span=comp.span)
        for comp in decl.components
    ]
    edges = [
        Edge(e.producer, e.producer_port, e.consumer, e.consumer_port, span=e.span)
        for e in decl.edges
    ]
    return assemble_graph(decl.app_name, nodes, edges, decl.period_ms, decl.deadline_ms, decl.objective)


def classify_node(graph: AppGraph, node: str) -> NodeKind:
    """
    Classify a node as source, sink or interior, and as stateless or not.

    A node without any input or output port counts as a source.
    """
    task = graph.node(node)
    if not task.inputs:
        kind = NodeCategory.SOURCE
    elif not task.outputs:
        kind = NodeCategory.SINK
    else:
        kind = NodeCategory.INTERIOR
    return NodeKind(kind, stateless=not task.states)


def activation_sets(graph: AppGraph) -> List[List[str]]:
    """
    Partition nodes into data-driven activation waves.

    Wave 0 holds the sources; a node belongs to the first wave after all of
    its producers. Names within a wave are sorted.
    """
    level: Dict[str, int] = {}
    for name in graph.topo_order:
        preds = graph.predecessors(name)
        level[name] = 1 + max(level[p] for p in preds) if preds else 0
    waves: List[List[str]] = [[] for _ in range(max(level.values(), default=-1) + 1)]
    for name, wave in level.items():
        waves[wave].append(name)
    return [sorted(wave) for wave in waves]


def with_ft(graph: AppGraph, component: str, replicas: Optional[int]) -> AppGraph:
    """Copy of ``graph`` with the ft annotation of one component replaced or removed."""
    task = graph.node(component)
    ft = FtAnnotation(replicas) if replicas else None
    nodes = tuple(replace(task, ft=ft) if n.name == component else n for n in graph.nodes)
    return replace(graph, nodes=nodes)


def dump_graph(graph: AppGraph) -> str:
    """JSON rendering of nodes, edges and activation waves with stable key order."""
    nodes = []
    for task in graph.nodes:
        kind = classify_node(graph, task.name)
        nodes.append({
            "name": task.name,
            "kind": kind.kind.value,
            "stateless": kind.stateless,
            "role": task.role.value,
            "contract": task.contract_name,
            "replica_of": task.replica_of,
            "ft_replicas": task.ft.replicas if task.ft else None,
            "ports": [
                {"direction": p.direction.value, "type": p.data_type, "name": p.port_name}
                for p in task.ports
            ],
            "versions": [
                {"name": v.version_name, "unit_types": list(v.compatible_unit_types)}
                for v in task.versions
            ],
        })
    document = {
        "app": graph.app_name,
        "period_ms": graph.period_ms,
        "deadline_ms": graph.deadline_ms,
        "objective": graph.objective.value,
        "nodes": nodes,
        "edges": [
            {"producer": e.producer, "producer_port": e.producer_port,
             "consumer": e.consumer, "consumer_port": e.consumer_port}
            for e in sorted(graph.edges)
        ],
        "topo_order": list(graph.topo_order),
        "waves": activation_sets(graph),
    }
    return json.dumps(document, indent=2, sort_keys=True)
