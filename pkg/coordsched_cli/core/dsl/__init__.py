"""Coordination-language frontend."""

from coordsched_cli.core.dsl.declarations import (
    AppDecl,
    ComponentDecl,
    EdgeDecl,
    FtAnnotation,
    Objective,
    PortDecl,
    PortDirection,
    VersionDecl,
)
from coordsched_cli.core.dsl.diagnostics import Diagnostic, Severity, SourceSpan, render_diagnostics
from coordsched_cli.core.dsl.parser import parse_app, parse_app_file
from coordsched_cli.core.dsl.printer import format_app

__all__ = [
    "AppDecl", "ComponentDecl", "EdgeDecl", "FtAnnotation", "Objective", "PortDecl",
    "PortDirection", "VersionDecl", "Diagnostic", "Severity", "SourceSpan",
    "render_diagnostics", "parse_app", "parse_app_file", "format_app",
]
