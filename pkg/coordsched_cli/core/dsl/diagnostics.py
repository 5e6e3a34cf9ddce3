"""
Source-located diagnostics shared by every frontend and loader.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, List, Optional


class Severity(str, Enum):
    """Diagnostic severity."""
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class SourceSpan:
    """A 1-based location of a token in a source file."""
    file: str
    line: int
    column: int
    length: int = 1

    def __post_init__(self):
        if self.line < 1 or self.column < 1 or self.length < 1:
            raise ValueError(f"invalid source span {self.line}:{self.column}+{self.length}")

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


@dataclass(frozen=True)
class Diagnostic:
    """A single error or warning, optionally tied to a source position."""
    message: str
    span: Optional[SourceSpan] = None
    severity: Severity = Severity.ERROR

    @property
    def is_error(self) -> bool:
        return self.severity is Severity.ERROR

    def sort_key(self):
        if self.span is None:
            return ("", 0, 0)
        return (self.span.file, self.span.line, self.span.column)

    def render(self) -> str:
        if self.span is None:
            return f"{self.severity.value}: {self.message}"
        return f"{self.span}: {self.severity.value}: {self.message}"


def render_diagnostics(diags: Iterable[Diagnostic]) -> str:
    """
    Render diagnostics one per line as ``file:line:col: severity: message``.

    Lines are sorted by (file, line, column); diagnostics at the same
    position keep their input order.
    """
    ordered = sorted(diags, key=Diagnostic.sort_key)
    return "\n".join(diag.render() for diag in ordered)


def has_errors(diags: Iterable[Diagnostic]) -> bool:
    """True if any diagnostic is an error."""
    return any(diag.is_error for diag in diags)


class DiagnosticCollector:
    """Accumulates errors and warnings while a checker walks its input."""

    def __init__(self):
        self.errors: List[Diagnostic] = []
        self.warnings: List[Diagnostic] = []

    def error(self, message: str, span: Optional[SourceSpan] = None) -> None:
        self.errors.append(Diagnostic(message, span, Severity.ERROR))

    def warning(self, message: str, span: Optional[SourceSpan] = None) -> None:
        self.warnings.append(Diagnostic(message, span, Severity.WARNING))

    def extend(self, diags: Iterable[Diagnostic]) -> None:
        for diag in diags:
            if diag.is_error:
                self.errors.append(diag)
            else:
                self.warnings.append(diag)

    @property
    def ok(self) -> bool:
        return not self.errors

    @property
    def diagnostics(self) -> List[Diagnostic]:
        return self.errors + self.warnings
