"""
Contracts file loader (``.contracts``).
"""

import logging
from pathlib import Path
from typing import Dict, List, Union

from coordsched_cli.config.loaders.records import Record, RecordChecker, parse_records
from coordsched_cli.core.contracts.store import (
    ContractEntry,
    ContractKey,
    ContractStore,
    EnergyContract,
    TimeContract,
)
from coordsched_cli.core.dsl.diagnostics import Diagnostic, DiagnosticCollector, SourceSpan
from coordsched_cli.core.platform.energy import OperatingPoint
from coordsched_cli.errors import CoordschedError

logger = logging.getLogger(__name__)

CONTRACT_FIELDS = ["component", "version", "unit_type", "opp", "wcet_ms", "acet_ms", "wce_mj", "ace_mj"]


class ContractsLoader:
    """Builds a ContractStore from ``[contract]`` and ``[reference]`` records."""

    def __init__(self, file_name: str = "<contracts>"):
        self.file_name = file_name
        self.collector = DiagnosticCollector()
        self.entries: Dict[ContractKey, ContractEntry] = {}
        self.key_spans: Dict[ContractKey, SourceSpan] = {}
        self.references: Dict[str, OperatingPoint] = {}

    def load_text(self, text: Union[str, bytes]) -> Union[ContractStore, List[Diagnostic]]:
        """
        Parse and validate contracts text.

        Returns:
            The store, or every diagnostic found
        """
        records = parse_records(text, self.file_name)
        if records and isinstance(records[0], Diagnostic):
            return records

        for record in records:
            if record.kind == "contract":
                self._parse_contract(record)
            elif record.kind == "reference":
                self._parse_reference(record)
            else:
                self.collector.error(f"unknown record kind [{record.kind}] in contracts file", record.span)

        if not self.collector.ok:
            return self.collector.diagnostics
        for warning in self.collector.warnings:
            logger.warning(warning.render())
        logger.debug(f"Loaded {len(self.entries)} contract entries from {self.file_name}")
        return ContractStore(self.entries, self.references)

    def _parse_contract(self, record: Record) -> None:
        checker = RecordChecker(record, self.collector, CONTRACT_FIELDS)
        component, _ = checker.string("component")
        version, _ = checker.string("version")
        unit_type, _ = checker.string("unit_type")
        opp, opp_span = checker.string("opp")
        wcet = checker.number("wcet_ms")
        acet = checker.number("acet_ms")
        wce = checker.number("wce_mj")
        ace = checker.number("ace_mj")

        if wcet is not None and acet is not None and acet > wcet:
            self.collector.error(f"acet_ms {acet:g} exceeds wcet_ms {wcet:g}", checker.span_of("acet_ms"))
            checker.ok = False
        if wce is not None and ace is not None and ace > wce:
            self.collector.error(f"ace_mj {ace:g} exceeds wce_mj {wce:g}", checker.span_of("ace_mj"))
            checker.ok = False
        if not checker.ok:
            return

        try:
            key = ContractKey(component, version, unit_type, opp)
            entry = ContractEntry(TimeContract(wcet, acet), EnergyContract(wce, ace))
        except CoordschedError as e:
            self.collector.error(str(e), opp_span)
            return

        if key in self.entries:
            first = self.key_spans[key]
            self.collector.error(f"duplicate contract {key} (first defined at {first})", record.span)
            return
        self.entries[key] = entry
        self.key_spans[key] = record.span

    def _parse_reference(self, record: Record) -> None:
        checker = RecordChecker(record, self.collector, ["unit_type", "opp"])
        unit_type, _ = checker.string("unit_type")
        text, span = checker.string("opp")
        if unit_type is None or text is None:
            return
        try:
            opp = OperatingPoint.parse(text)
        except CoordschedError as e:
            self.collector.error(str(e), span)
            return
        if unit_type in self.references:
            self.collector.error(f"duplicate reference for unit type {unit_type}", record.span)
            return
        self.references[unit_type] = opp


def parse_contracts(text: Union[str, bytes], file_name: str = "<contracts>") -> Union[ContractStore, List[Diagnostic]]:
    return ContractsLoader(file_name).load_text(text)


def load_contracts(path: Union[str, Path]) -> Union[ContractStore, List[Diagnostic]]:
    """Load a ``.contracts`` file. I/O errors propagate as OSError."""
    path = Path(path)
    return parse_contracts(path.read_bytes(), str(path))
