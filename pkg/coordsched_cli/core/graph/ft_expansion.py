"""
Modular-redundancy rewrite: each ft-annotated task becomes N replicas and a voter.
"""

import logging
from dataclasses import dataclass, replace
from typing import Dict, List, Set, Tuple

from coordsched_cli.core.dsl.declarations import PortDecl, PortDirection, VersionDecl
from coordsched_cli.core.dsl.diagnostics import Diagnostic, DiagnosticCollector
from coordsched_cli.core.graph.model import AppGraph, Edge, TaskNode, TaskRole, assemble_graph
from coordsched_cli.errors import FtExpansionError

logger = logging.getLogger(__name__)

VOTER_CONTRACT = "__voter"
VOTER_VERSION = "vote"

# replicas of a sink report completion to their voter through this port
COMPLETION_PORT = "__done"
COMPLETION_TYPE = "__Completion"


@dataclass(frozen=True)
class VoterSpec:
    """The voter generated for one ft-annotated component."""
    voted_component: str
    replica_count: int

    @property
    def voter_name(self) -> str:
        return f"{self.voted_component}__voter"

    @property
    def voter_contract_key(self) -> str:
        return VOTER_CONTRACT

    @property
    def replica_names(self) -> List[str]:
        return [replica_name(self.voted_component, i) for i in range(1, self.replica_count + 1)]


def replica_name(component: str, index: int) -> str:
    return f"{component}__r{index}"


def voter_input_port(index: int, port_name: str) -> str:
    return f"r{index}_{port_name}"


def _voted_ports(task: TaskNode) -> Tuple[PortDecl, ...]:
    """Ports the voter compares; a sink votes on its completion signal."""
    if task.outputs:
        return task.outputs
    return (PortDecl(PortDirection.OUTPUT, COMPLETION_TYPE, COMPLETION_PORT),)


def _voter_node(task: TaskNode, spec: VoterSpec) -> TaskNode:
    ports: List[PortDecl] = []
    for port in _voted_ports(task):
        for index in range(1, spec.replica_count + 1):
            ports.append(PortDecl(PortDirection.INPUT, port.data_type, voter_input_port(index, port.port_name)))
    ports.extend(PortDecl(PortDirection.OUTPUT, p.data_type, p.port_name) for p in task.outputs)

    unit_types: List[str] = []
    for version in task.versions:
        for unit_type in version.compatible_unit_types:
            if unit_type not in unit_types:
                unit_types.append(unit_type)

    return TaskNode(
        name=spec.voter_name,
        ports=tuple(ports),
        versions=(VersionDecl(VOTER_VERSION, tuple(unit_types)),),
        contract_name=VOTER_CONTRACT,
        role=TaskRole.VOTER,
        replica_of=task.name,
        span=task.span,
    )


def _check_annotated(task: TaskNode, taken: Set[str], collector: DiagnosticCollector) -> None:
    output_types = sorted({p.data_type for p in task.outputs})
    if len(output_types) > 1:
        collector.error(
            f"ft on {task.name}: outputs carry several types ({', '.join(output_types)}); "
            "voting needs a single output type",
            task.ft.span or task.span,
        )
    spec = VoterSpec(task.name, task.ft.replicas)
    for generated in spec.replica_names + [spec.voter_name]:
        if generated in taken:
            collector.error(f"ft on {task.name}: generated name {generated} collides with a component", task.span)


def expand_ft_checked(graph: AppGraph) -> Tuple[AppGraph, List[Diagnostic]]:
    """
    Rewrite every ft-annotated node of ``graph``.

    Returns:
        Tuple of (expanded graph, warnings)

    Raises:
        FtExpansionError: an annotated node cannot be expanded
    """
    annotated = [task for task in graph.nodes if task.ft is not None]
    if not annotated:
        return graph, []

    collector = DiagnosticCollector()
    taken = set(graph.node_names)
    for task in annotated:
        _check_annotated(task, taken, collector)
    if not collector.ok:
        raise FtExpansionError(collector.diagnostics)

    nodes: List[TaskNode] = []
    edges: Set[Edge] = set(graph.edges)
    specs: Dict[str, VoterSpec] = {}

    for task in graph.nodes:
        if task.ft is None:
            nodes.append(task)
            continue

        spec = VoterSpec(task.name, task.ft.replicas)
        specs[task.name] = spec
        replica_ports = task.ports if task.outputs else task.ports + _voted_ports(task)
        for index, name in enumerate(spec.replica_names, start=1):
            nodes.append(TaskNode(
                name=name,
                ports=replica_ports,
                versions=task.versions,
                contract_name=task.contract_name,
                role=TaskRole.REPLICA,
                replica_of=task.name,
                span=task.span,
            ))
        voter = _voter_node(task, spec)
        nodes.append(voter)

        # rewire against the working set so adjacent ft nodes compose
        incoming = [e for e in edges if e.consumer == task.name]
        outgoing = [e for e in edges if e.producer == task.name]
        edges.difference_update(incoming)
        edges.difference_update(outgoing)
        for edge in incoming:
            for name in spec.replica_names:
                edges.add(Edge(edge.producer, edge.producer_port, name, edge.consumer_port, edge.span))
        for port in _voted_ports(task):
            for index, name in enumerate(spec.replica_names, start=1):
                edges.add(Edge(name, port.port_name, voter.name, voter_input_port(index, port.port_name)))
        for edge in outgoing:
            edges.add(Edge(voter.name, edge.producer_port, edge.consumer, edge.consumer_port, edge.span))

        if not task.outputs:
            collector.warning(f"voter {voter.name} has no consumers ({task.name} is a sink)", task.span)

    result = assemble_graph(
        graph.app_name, nodes, edges, graph.period_ms, graph.deadline_ms, graph.objective
    )
    if isinstance(result, list):
        raise FtExpansionError([d for d in result if d.is_error])

    warnings = list(result.warnings) + collector.diagnostics
    for warning in collector.diagnostics:
        logger.warning(warning.render())
    logger.info(
        "ft expansion: %d component(s) replicated, %d -> %d tasks",
        len(specs), len(graph.nodes), len(result.nodes),
    )
    return result, warnings


def expand_ft(graph: AppGraph) -> AppGraph:
    """
    Replace each ft node by replicas ``<name>__r1..__rN`` and a voter ``<name>__voter``.

    Each replica receives a copy of every input edge of the original, the
    voter consumes every replica output and every former consumer now reads
    from the voter. Replicas of a sink gain a completion output the voter
    consumes, so the voter still runs after all of them. Graphs without annotations are returned unchanged.
    """
    expanded, _ = expand_ft_checked(graph)
    return expanded


def strip_ft(graph: AppGraph) -> AppGraph:
    """Copy of ``graph`` with every ft annotation removed (``--no-ft``)."""
    if all(task.ft is None for task in graph.nodes):
        return graph
    return replace(graph, nodes=tuple(replace(task, ft=None) for task in graph.nodes))


def voter_specs(graph: AppGraph) -> List[VoterSpec]:
    return [VoterSpec(task.name, task.ft.replicas) for task in graph.nodes if task.ft is not None]

