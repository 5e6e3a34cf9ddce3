"""
Reader for the record-based input files shared by platforms and contracts.
"""

import functools
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Set, Tuple, Union

from lark import Lark, Token
from lark.exceptions import LarkError

from coordsched_cli.core.dsl.diagnostics import Diagnostic, DiagnosticCollector, SourceSpan
from coordsched_cli.core.dsl.lark_errors import diagnostics_from_lark, token_span

logger = logging.getLogger(__name__)

_GRAMMAR_FILE = Path(__file__).with_name("records.lark")

Scalar = Union[str, float]


@functools.lru_cache(maxsize=None)
def records_parser() -> Lark:
    return Lark(
        _GRAMMAR_FILE.read_text(encoding="utf-8"),
        parser="lalr",
        propagate_positions=True,
        maybe_placeholders=False,
    )


@dataclass(frozen=True)
class RecordField:
    key: str
    value: Scalar
    span: SourceSpan
    value_span: SourceSpan


@dataclass
class Record:
    """One ``[kind]`` block with its fields in file order."""
    kind: str
    span: SourceSpan
    fields: List[RecordField] = field(default_factory=list)

    def all(self, key: str) -> List[RecordField]:
        return [f for f in self.fields if f.key == key]

    def first(self, key: str) -> Optional[RecordField]:
        matches = self.all(key)
        return matches[0] if matches else None


def parse_records(text: Union[str, bytes], file_name: str) -> Union[List[Record], List[Diagnostic]]:
    """
    Parse record syntax into Records.

    Only syntax is checked here; field semantics belong to the callers.
    """
    if isinstance(text, (bytes, bytearray)):
        try:
            text = bytes(text).decode("utf-8")
        except UnicodeDecodeError as e:
            return [Diagnostic(f"file is not valid UTF-8 (byte offset {e.start})", SourceSpan(file_name, 1, 1))]

    parser = records_parser()
    # every field line must end in a newline
    padded = text if text.endswith("\n") else text + "\n"
    try:
        tree = parser.parse(padded)
    except LarkError as exc:
        return diagnostics_from_lark(exc, parser, text, file_name)

    records: List[Record] = []
    for record_tree in tree.children:
        kind_token, *field_trees = record_tree.children
        record = Record(str(kind_token), token_span(kind_token, file_name))
        for field_tree in field_trees:
            key_token, value_tree = field_tree.children
            value_token: Token = value_tree.children[0]
            if value_tree.data == "string":
                value: Scalar = str(value_token)[1:-1].replace('\\"', '"').replace("\\\\", "\\")
            else:
                value = float(str(value_token))
            record.fields.append(RecordField(
                str(key_token), value,
                token_span(key_token, file_name),
                token_span(value_token, file_name),
            ))
        records.append(record)
    return records


class RecordChecker:
    """
    Typed field access over one record, collecting problems as it goes.

    Missing, mistyped, duplicated and unknown fields each produce one
    diagnostic; callers read every field they need and then check ``ok``.
    """

    def __init__(self, record: Record, collector: DiagnosticCollector, known: Sequence[str],
                 repeatable: Sequence[str] = ()):
        self.record = record
        self.collector = collector
        self.ok = True
        self._check_fields(set(known), set(repeatable))

    def _check_fields(self, known: Set[str], repeatable: Set[str]) -> None:
        seen: Dict[str, RecordField] = {}
        for fld in self.record.fields:
            if fld.key not in known:
                self.collector.warning(f"unknown field '{fld.key}' in [{self.record.kind}] record", fld.span)
                continue
            if fld.key in seen and fld.key not in repeatable:
                self.collector.error(f"duplicate field '{fld.key}' in [{self.record.kind}] record", fld.span)
                self.ok = False
                continue
            seen[fld.key] = fld

    def _missing(self, key: str) -> None:
        self.collector.error(f"[{self.record.kind}] record lacks field '{key}'", self.record.span)
        self.ok = False

    def string(self, key: str) -> Tuple[Optional[str], Optional[SourceSpan]]:
        fld = self.record.first(key)
        if fld is None:
            self._missing(key)
            return None, None
        if not isinstance(fld.value, str):
            self.collector.error(f"field '{key}' must be a string", fld.value_span)
            self.ok = False
            return None, fld.value_span
        if not fld.value:
            self.collector.error(f"field '{key}' must not be empty", fld.value_span)
            self.ok = False
            return None, fld.value_span
        return fld.value, fld.value_span

    def strings(self, key: str) -> List[Tuple[str, SourceSpan]]:
        values: List[Tuple[str, SourceSpan]] = []
        for fld in self.record.all(key):
            if isinstance(fld.value, str):
                values.append((fld.value, fld.value_span))
            else:
                self.collector.error(f"field '{key}' must be a string", fld.value_span)
                self.ok = False
        return values

    def number(self, key: str, positive: bool = True, default: Optional[float] = None) -> Optional[float]:
        fld = self.record.first(key)
        if fld is None:
            if default is not None:
                return default
            self._missing(key)
            return None
        if not isinstance(fld.value, float):
            self.collector.error(f"field '{key}' must be a number", fld.value_span)
            self.ok = False
            return None
        if positive and fld.value <= 0:
            self.collector.error(f"{key} must be > 0 (got {fld.value:g})", fld.value_span)
            self.ok = False
            return None
        if not positive and fld.value < 0:
            self.collector.error(f"{key} must be >= 0 (got {fld.value:g})", fld.value_span)
            self.ok = False
            return None
        return fld.value

    def span_of(self, key: str) -> SourceSpan:
        fld = self.record.first(key)
        return fld.span if fld is not None else self.record.span

