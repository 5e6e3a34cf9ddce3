"""
Parser for the .coord coordination language.

Syntax is handled by a lark LALR grammar (coord.lark); name resolution and
the remaining static rules run over the parse tree and report every problem
they find instead of stopping at the first one.
"""

import functools
import logging
import math
from collections import defaultdict
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Set, Tuple, Union

from lark import Lark, Token, Tree
from lark.exceptions import LarkError

from coordsched_cli.core.dsl.declarations import (
    ALLOWED_REPLICAS,
    AppDecl,
    ComponentDecl,
    EdgeDecl,
    FtAnnotation,
    Objective,
    PortDecl,
    PortDirection,
    VersionDecl,
)
from coordsched_cli.core.dsl.diagnostics import Diagnostic, DiagnosticCollector, SourceSpan
from coordsched_cli.core.dsl.lark_errors import diagnostics_from_lark, token_span

logger = logging.getLogger(__name__)

_GRAMMAR_FILE = Path(__file__).with_name("coord.lark")

RESERVED_WORDS = frozenset([
    "app", "period", "deadline", "objective", "type", "component",
    "in", "out", "state", "version", "on", "edge", "ft", "replicas",
])


@functools.lru_cache(maxsize=None)
def coord_parser() -> Lark:
    """The compiled .coord grammar (built once per process)."""
    return Lark(
        _GRAMMAR_FILE.read_text(encoding="utf-8"),
        parser="lalr",
        propagate_positions=True,
        maybe_placeholders=False,
    )


def parse_app(source_text: Union[str, bytes], file_name: Union[str, Path] = "<input>") -> Union[AppDecl, List[Diagnostic]]:
    """
    Parse coordination-language source into an AppDecl.

    Args:
        source_text: Source text (bytes are decoded as UTF-8)
        file_name: Name used in diagnostic spans

    Returns:
        The AppDecl, or a non-empty list of diagnostics
    """
    file_name = str(file_name)
    if isinstance(source_text, (bytes, bytearray)):
        try:
            source_text = bytes(source_text).decode("utf-8")
        except UnicodeDecodeError as e:
            return [Diagnostic(f"source is not valid UTF-8 (byte offset {e.start})", SourceSpan(file_name, 1, 1))]

    parser = coord_parser()
    try:
        tree = parser.parse(source_text)
    except LarkError as exc:
        return diagnostics_from_lark(exc, parser, source_text, file_name)

    return _AppBuilder(file_name).build(tree)


def parse_app_file(path: Union[str, Path]) -> Union[AppDecl, List[Diagnostic]]:
    """Read and parse a .coord file. I/O errors propagate as OSError."""
    path = Path(path)
    return parse_app(path.read_bytes(), str(path))


class _AppBuilder:
    """Resolves a .coord parse tree into declarations."""

    def __init__(self, file_name: str):
        self.file_name = file_name
        self.collector = DiagnosticCollector()

    def _span(self, token: Token) -> SourceSpan:
        return token_span(token, self.file_name)

    def _tree_span(self, tree: Tree, fallback: Token) -> SourceSpan:
        meta = tree.meta
        if getattr(meta, "empty", True):
            return self._span(fallback)
        length = meta.end_column - meta.column if meta.end_line == meta.line else 1
        return SourceSpan(self.file_name, meta.line, meta.column, max(1, length))

    def _identifier(self, token: Token, what: str) -> str:
        name = str(token)
        if name in RESERVED_WORDS:
            self.collector.error(f"'{name}' is a reserved word and cannot name a {what}", self._span(token))
        return name

    def build(self, tree: Tree) -> Union[AppDecl, List[Diagnostic]]:
        name_token, *items = tree.children
        app_name = self._identifier(name_token, "application")

        groups: Dict[str, List[Tree]] = defaultdict(list)
        for item in items:
            groups[str(item.data)].append(item)

        period = self._duration(groups["period"], "period", name_token)
        deadline = self._duration(groups["deadline"], "deadline", name_token)
        objective = self._objective(groups["objective"])
        type_names = self._types(groups["type_decl"])

        components: Dict[str, ComponentDecl] = {}
        for comp_tree in groups["component"]:
            comp = self._component(comp_tree, set(type_names))
            if comp.name in components:
                self.collector.error(f"duplicate component '{comp.name}'", comp.span)
                continue
            components[comp.name] = comp

        edges = self._edges(groups["edge"], components)

        if period and deadline and deadline[0] > period[0]:
            self.collector.error(
                f"deadline {deadline[0]:g}ms exceeds period {period[0]:g}ms", deadline[1]
            )

        if not self.collector.ok:
            return self.collector.diagnostics

        return AppDecl(
            app_name=app_name,
            period_ms=period[0],
            deadline_ms=deadline[0],
            objective=objective,
            type_names=tuple(type_names),
            components=tuple(components.values()),
            edges=tuple(edges),
            span=self._span(name_token),
        )

    def _duration(self, trees: Sequence[Tree], keyword: str, app_token: Token) -> Optional[Tuple[float, SourceSpan]]:
        if not trees:
            self.collector.error(f"missing {keyword}", self._span(app_token))
            return None
        for extra in trees[1:]:
            self.collector.error(f"duplicate {keyword}", self._span(extra.children[0]))
        token = trees[0].children[0]
        value = float(str(token)[:-2])
        if not math.isfinite(value):
            self.collector.error(f"{keyword} is too large to represent in ms", self._span(token))
            return None
        if value <= 0:
            self.collector.error(f"{keyword} must be > 0ms", self._span(token))
            return None
        return value, self._span(token)

    def _objective(self, trees: Sequence[Tree]) -> Objective:
        for extra in trees[1:]:
            self.collector.error("duplicate objective", self._span(extra.children[0]))
        if not trees:
            return Objective.MINIMIZE_ENERGY
        token = trees[0].children[0]
        try:
            return Objective(str(token))
        except ValueError:
            allowed = ", ".join(o.value for o in Objective)
            self.collector.error(f"unknown objective '{token}' (expected one of {allowed})", self._span(token))
            return Objective.MINIMIZE_ENERGY

    def _types(self, trees: Sequence[Tree]) -> List[str]:
        names: List[str] = []
        for tree in trees:
            token = tree.children[0]
            name = self._identifier(token, "type")
            if name in names:
                self.collector.error(f"duplicate type '{name}'", self._span(token))
                continue
            names.append(name)
        return names

    def _component(self, tree: Tree, type_names: Set[str]) -> ComponentDecl:
        name_token, *items = tree.children
        name = self._identifier(name_token, "component")

        ports: List[PortDecl] = []
        versions: List[VersionDecl] = []
        ft: Optional[FtAnnotation] = None

        for item in items:
            kind = str(item.data)
            if kind == "port":
                port = self._port(item, name, type_names)
                if any(p.port_name == port.port_name for p in ports):
                    self.collector.error(f"duplicate port '{port.port_name}' in component {name}", port.span)
                    continue
                ports.append(port)
            elif kind == "version":
                version = self._version(item, name)
                if any(v.version_name == version.version_name for v in versions):
                    self.collector.error(
                        f"duplicate version '{version.version_name}' in component {name}", version.span
                    )
                    continue
                versions.append(version)
            elif kind == "ft":
                token = item.children[0]
                if ft is not None:
                    self.collector.error(f"duplicate ft block in component {name}", self._span(token))
                    continue
                replicas = int(str(token))
                if replicas not in ALLOWED_REPLICAS:
                    allowed = ", ".join(str(n) for n in ALLOWED_REPLICAS)
                    self.collector.error(f"replicas must be one of {allowed} (got {replicas})", self._span(token))
                ft = FtAnnotation(replicas, self._span(token))

        if not versions:
            self.collector.error(f"component {name} declares no version", self._span(name_token))

        return ComponentDecl(name, tuple(ports), tuple(versions), ft, self._span(name_token))

    def _port(self, tree: Tree, component: str, type_names: Set[str]) -> PortDecl:
        direction_token, type_token, name_token = tree.children
        data_type = str(type_token)
        if data_type not in type_names:
            self.collector.error(f"unknown type '{data_type}'", self._span(type_token))
        port_name = self._identifier(name_token, "port")
        return PortDecl(PortDirection(str(direction_token)), data_type, port_name, self._span(name_token))

    def _version(self, tree: Tree, component: str) -> VersionDecl:
        name_token, *unit_tokens = tree.children
        version_name = self._identifier(name_token, "version")
        units: List[str] = []
        spans: List[SourceSpan] = []
        for token in unit_tokens:
            unit = str(token)
            if unit in units:
                self.collector.error(
                    f"duplicate unit type '{unit}' in version {version_name} of {component}", self._span(token)
                )
                continue
            units.append(unit)
            spans.append(self._span(token))
        return VersionDecl(version_name, tuple(units), self._span(name_token), tuple(spans))

    def _edges(self, trees: Sequence[Tree], components: Dict[str, ComponentDecl]) -> List[EdgeDecl]:
        edges: List[EdgeDecl] = []
        for tree in trees:
            producer, producer_port, consumer, consumer_port = tree.children
            edge = EdgeDecl(
                str(producer), str(producer_port), str(consumer), str(consumer_port),
                span=self._tree_span(tree, producer),
                producer_span=self._span(producer_port),
                consumer_span=self._span(consumer_port),
            )
            resolved = self._check_endpoint(edge, edge.producer, edge.producer_port, edge.producer_span,
                                            PortDirection.OUTPUT, components)
            resolved &= self._check_endpoint(edge, edge.consumer, edge.consumer_port, edge.consumer_span,
                                             PortDirection.INPUT, components)
            if not resolved:
                continue
            if edge in edges:
                self.collector.error(f"duplicate edge {edge}", edge.span)
                continue
            edges.append(edge)
        return edges

    def _check_endpoint(
        self,
        edge: EdgeDecl,
        component: str,
        port_name: str,
        port_span: SourceSpan,
        direction: PortDirection,
        components: Dict[str, ComponentDecl],
    ) -> bool:
        comp = components.get(component)
        if comp is None:
            self.collector.error(f"unknown component {component}", edge.span)
            return False
        port = comp.port(port_name)
        if port is None:
            self.collector.error(f"component {component} has no port '{port_name}'", port_span)
            return False
        if port.direction is not direction:
            kind = "an output" if direction is PortDirection.OUTPUT else "an input"
            self.collector.error(f"{component}.{port_name} is not {kind} port", port_span)
            return False
        return True
