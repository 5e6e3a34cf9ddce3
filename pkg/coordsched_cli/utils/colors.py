"""
Color utilities for terminal output.

Colour is applied only when the target stream is a terminal and NO_COLOR
is unset, so piped reports and captured output stay plain text.
"""

import os
import sys
from typing import Optional, TextIO


class Colors:
    """ANSI styling for status lines, diagnostics and verdicts."""

    RED = '\033[0;31m'
    GREEN = '\033[0;32m'
    YELLOW = '\033[0;33m'
    BLUE = '\033[0;34m'
    BOLD_WHITE = '\033[1;37m'

    RESET = '\033[0m'

    SEVERITY = {"error": RED, "warning": YELLOW}

    @staticmethod
    def enabled(stream: Optional[TextIO] = None) -> bool:
        stream = stream if stream is not None else sys.stdout
        if "NO_COLOR" in os.environ:
            return False
        isatty = getattr(stream, "isatty", None)
        return bool(isatty and isatty())

    @staticmethod
    def colorize(text: str, color: str, stream: Optional[TextIO] = None) -> str:
        """Apply color to text if ``stream`` (default stdout) is a terminal."""
        if not Colors.enabled(stream):
            return text
        return f"{color}{text}{Colors.RESET}"

    @staticmethod
    def success(text: str, stream: Optional[TextIO] = None) -> str:
        return Colors.colorize(text, Colors.GREEN, stream)

    @staticmethod
    def error(text: str, stream: Optional[TextIO] = None) -> str:
        return Colors.colorize(text, Colors.RED, stream)

    @staticmethod
    def warning(text: str, stream: Optional[TextIO] = None) -> str:
        return Colors.colorize(text, Colors.YELLOW, stream)

    @staticmethod
    def info(text: str, stream: Optional[TextIO] = None) -> str:
        return Colors.colorize(text, Colors.BLUE, stream)

    @staticmethod
    def bold(text: str, stream: Optional[TextIO] = None) -> str:
        return Colors.colorize(text, Colors.BOLD_WHITE, stream)

    @staticmethod
    def verdict(text: str, ok: bool, stream: Optional[TextIO] = None) -> str:
        """Green when a deadline was met or a check passed, yellow otherwise."""
        return Colors.success(text, stream) if ok else Colors.warning(text, stream)

    @staticmethod
    def diagnostic(line: str, severity: str, stream: Optional[TextIO] = None) -> str:
        """Colour a rendered ``file:line:col: severity: message`` line by its severity."""
        color = Colors.SEVERITY.get(severity)
        return Colors.colorize(line, color, stream) if color else line
