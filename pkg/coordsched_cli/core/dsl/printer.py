"""
Canonical pretty printer for AppDecl.
"""

from decimal import Decimal
from typing import List

from coordsched_cli.core.dsl.declarations import AppDecl, ComponentDecl


def format_ms(value: float) -> str:
    """Render a duration without exponent or trailing zeros, e.g. ``12.5ms``."""
    text = format(Decimal(repr(float(value))), "f")
    if "." in text:
        text = text.rstrip("0").rstrip(".")
    return f"{text}ms"


def _format_component(comp: ComponentDecl) -> List[str]:
    lines = [f"  component {comp.name} {{"]
    for port in comp.ports:
        lines.append(f"    {port.direction.value} {port.data_type} {port.port_name};")
    for version in comp.versions:
        units = ", ".join(version.compatible_unit_types)
        lines.append(f"    version {version.version_name} on {units};")
    if comp.ft is not None:
        lines.append(f"    ft {{ replicas {comp.ft.replicas}; }}")
    lines.append("  }")
    return lines


def format_app(decl: AppDecl) -> str:
    """Print an AppDecl in canonical .coord syntax; re-parsing yields an equal AppDecl."""
    lines = [
        f"app {decl.app_name} {{",
        f"  period {format_ms(decl.period_ms)};",
        f"  deadline {format_ms(decl.deadline_ms)};",
        f"  objective {decl.objective.value};",
    ]
    lines.extend(f"  type {name};" for name in decl.type_names)
    for comp in decl.components:
        lines.extend(_format_component(comp))
    lines.extend(f"  edge {edge};" for edge in decl.edges)
    lines.append("}")
    return "\n".join(lines) + "\n"
