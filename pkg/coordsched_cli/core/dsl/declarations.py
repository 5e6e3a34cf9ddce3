"""
Declaration tree produced by the coordination-language parser.

Spans never take part in equality, so a pretty-printed and re-parsed
application compares equal to the original.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

from coordsched_cli.core.dsl.diagnostics import SourceSpan

ALLOWED_REPLICAS = (2, 3, 5, 7)


class PortDirection(str, Enum):
    """Direction of a component port."""
    INPUT = "in"
    OUTPUT = "out"
    STATE = "state"


class Objective(str, Enum):
    """Application-level optimisation objective."""
    MINIMIZE_ENERGY = "minimize_energy"
    MINIMIZE_MAKESPAN = "minimize_makespan"


@dataclass(frozen=True)
class PortDecl:
    """A typed input, output or state port."""
    direction: PortDirection
    data_type: str
    port_name: str
    span: Optional[SourceSpan] = field(default=None, compare=False)


@dataclass(frozen=True)
class VersionDecl:
    """One implementation of a component and the unit types it runs on."""
    version_name: str
    compatible_unit_types: Tuple[str, ...]
    span: Optional[SourceSpan] = field(default=None, compare=False)
    unit_spans: Tuple[SourceSpan, ...] = field(default=(), compare=False)


@dataclass(frozen=True)
class FtAnnotation:
    """N-modular redundancy request for a component."""
    replicas: int
    span: Optional[SourceSpan] = field(default=None, compare=False)


@dataclass(frozen=True)
class ComponentDecl:
    """A named black-box task with typed ports and implementation versions."""
    name: str
    ports: Tuple[PortDecl, ...]
    versions: Tuple[VersionDecl, ...]
    ft: Optional[FtAnnotation] = None
    span: Optional[SourceSpan] = field(default=None, compare=False)

    @property
    def inputs(self) -> Tuple[PortDecl, ...]:
        return tuple(p for p in self.ports if p.direction is PortDirection.INPUT)

    @property
    def outputs(self) -> Tuple[PortDecl, ...]:
        return tuple(p for p in self.ports if p.direction is PortDirection.OUTPUT)

    def port(self, name: str) -> Optional[PortDecl]:
        for port in self.ports:
            if port.port_name == name:
                return port
        return None


@dataclass(frozen=True)
class EdgeDecl:
    """A data-flow channel from an output port to an input port."""
    producer: str
    producer_port: str
    consumer: str
    consumer_port: str
    span: Optional[SourceSpan] = field(default=None, compare=False)
    producer_span: Optional[SourceSpan] = field(default=None, compare=False)
    consumer_span: Optional[SourceSpan] = field(default=None, compare=False)

    def __str__(self) -> str:
        return f"{self.producer}.{self.producer_port} -> {self.consumer}.{self.consumer_port}"


@dataclass(frozen=True)
class AppDecl:
    """A parsed application: timing requirements, types, components and edges."""
    app_name: str
    period_ms: float
    deadline_ms: float
    objective: Objective
    type_names: Tuple[str, ...]
    components: Tuple[ComponentDecl, ...]
    edges: Tuple[EdgeDecl, ...]
    span: Optional[SourceSpan] = field(default=None, compare=False)

    def component(self, name: str) -> Optional[ComponentDecl]:
        for comp in self.components:
            if comp.name == name:
                return comp
        return None
