"""
Translation of lark parse failures into diagnostics.
"""

from typing import Iterable, List

from lark import Lark, Token
from lark.exceptions import LarkError, UnexpectedCharacters, UnexpectedEOF, UnexpectedToken

from coordsched_cli.core.dsl.diagnostics import Diagnostic, SourceSpan

MAX_EXPECTED = 6


def end_span(text: str, file_name: str) -> SourceSpan:
    """Span just past the last character of ``text``."""
    lines = text.split("\n")
    return SourceSpan(file_name, len(lines), len(lines[-1]) + 1, 1)


def token_span(token: Token, file_name: str) -> SourceSpan:
    """Span covering a lexed token."""
    return SourceSpan(file_name, token.line, token.column, max(1, len(str(token))))


def _describe_terminal(parser: Lark, name: str) -> str:
    try:
        pattern = parser.get_terminal(name).pattern
    except KeyError:
        return name.lower()
    if pattern.type == "str":
        return f"'{pattern.value}'"
    return name.lower()


def _describe_expected(parser: Lark, names: Iterable[str]) -> str:
    described = sorted({_describe_terminal(parser, name) for name in names if name != "$END"})
    if not described:
        return ""
    if len(described) > MAX_EXPECTED:
        described = described[:MAX_EXPECTED] + ["..."]
    return " (expected " + ", ".join(described) + ")"


def _position(exc: LarkError, text: str, file_name: str, length: int = 1) -> SourceSpan:
    line = getattr(exc, "line", None)
    column = getattr(exc, "column", None)
    if isinstance(line, int) and isinstance(column, int) and line >= 1 and column >= 1:
        return SourceSpan(file_name, line, column, max(1, length))
    return end_span(text, file_name)


def diagnostics_from_lark(exc: LarkError, parser: Lark, text: str, file_name: str) -> List[Diagnostic]:
    """Turn any lark exception into a single located syntax diagnostic."""
    if isinstance(exc, UnexpectedCharacters):
        message = f"syntax error: unexpected character {exc.char!r}"
        return [Diagnostic(message, _position(exc, text, file_name))]

    if isinstance(exc, UnexpectedEOF):
        message = "syntax error: unexpected end of input" + _describe_expected(parser, exc.expected)
        return [Diagnostic(message, end_span(text, file_name))]

    if isinstance(exc, UnexpectedToken):
        token = exc.token
        expected = _describe_expected(parser, exc.expected)
        if token.type == "$END":
            return [Diagnostic("syntax error: unexpected end of input" + expected, end_span(text, file_name))]
        message = f"syntax error: unexpected {str(token)!r}" + expected
        return [Diagnostic(message, _position(exc, text, file_name, len(str(token))))]

    return [Diagnostic(f"syntax error: {exc}", end_span(text, file_name))]
