"""
Platform file loader (``.platform``).

Records:
    [platform]   name
    [unit]       name, type, static_power_mw, repeated opp = "fMHz@vV"
    [reference]  unit_type, opp   (optional reference OPP per unit type)
"""

import logging
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from coordsched_cli.config.loaders.records import Record, RecordChecker, parse_records
from coordsched_cli.core.dsl.diagnostics import Diagnostic, DiagnosticCollector, SourceSpan
from coordsched_cli.core.platform.energy import OperatingPoint, Platform, ProcessingUnit, ScalingModel
from coordsched_cli.errors import PlatformError

logger = logging.getLogger(__name__)


class PlatformLoader:
    """Loads a platform description and its scaling references from a record file."""

    def __init__(self, file_name: str = "<platform>"):
        """
        Initialize the platform loader.

        Args:
            file_name: Name used in diagnostic spans and as the fallback platform name
        """
        self.file_name = file_name
        self.collector = DiagnosticCollector()

    def load_text(self, text: Union[str, bytes]) -> Union[Tuple[Platform, ScalingModel], List[Diagnostic]]:
        """
        Parse and validate platform text.

        Returns:
            (Platform, ScalingModel) or the diagnostics found
        """
        records = parse_records(text, self.file_name)
        if records and isinstance(records[0], Diagnostic):
            return records

        name: Optional[str] = None
        units: List[ProcessingUnit] = []
        unit_spans: Dict[str, SourceSpan] = {}
        references: Dict[str, Tuple[OperatingPoint, SourceSpan]] = {}

        for record in records:
            if record.kind == "platform":
                if name is not None:
                    self.collector.error("duplicate [platform] record", record.span)
                    continue
                checker = RecordChecker(record, self.collector, ["name"])
                name, _ = checker.string("name")
            elif record.kind == "unit":
                unit = self._parse_unit(record)
                if unit is None:
                    continue
                if unit.name in unit_spans:
                    self.collector.error(f"duplicate unit name '{unit.name}'", record.span)
                    continue
                unit_spans[unit.name] = record.span
                units.append(unit)
            elif record.kind == "reference":
                self._parse_reference(record, references)
            else:
                self.collector.error(f"unknown record kind [{record.kind}] in platform file", record.span)

        if not units and self.collector.ok:
            self.collector.error("platform declares no [unit] record", SourceSpan(self.file_name, 1, 1))

        if not self.collector.ok:
            return self.collector.diagnostics

        platform = Platform(name or Path(self.file_name).stem, tuple(units))
        try:
            scaling = ScalingModel.for_platform(platform, {t: opp for t, (opp, _) in references.items()})
        except PlatformError as e:
            span = next(iter(references.values()))[1] if references else SourceSpan(self.file_name, 1, 1)
            return [Diagnostic(str(e), span)] + self.collector.warnings

        for warning in self.collector.warnings:
            logger.warning(warning.render())
        logger.debug(f"Loaded platform {platform.name} with {len(platform.units)} units from {self.file_name}")
        return platform, scaling

    def _parse_opp(self, text: str, span: SourceSpan) -> Optional[OperatingPoint]:
        try:
            return OperatingPoint.parse(text)
        except PlatformError as e:
            self.collector.error(str(e), span)
            return None

    def _parse_unit(self, record: Record) -> Optional[ProcessingUnit]:
        checker = RecordChecker(record, self.collector, ["name", "type", "static_power_mw", "opp"], repeatable=["opp"])
        name, _ = checker.string("name")
        unit_type, _ = checker.string("type")
        static_power = checker.number("static_power_mw", positive=False, default=0.0)

        opps: List[OperatingPoint] = []
        for text, span in checker.strings("opp"):
            opp = self._parse_opp(text, span)
            if opp is None:
                checker.ok = False
            elif opp in opps:
                self.collector.error(f"duplicate operating point {opp.id} on unit {name}", span)
                checker.ok = False
            else:
                opps.append(opp)
        if not record.all("opp"):
            self.collector.error(f"unit {name or '?'} declares no operating point", record.span)
            checker.ok = False

        if not checker.ok or name is None or unit_type is None or static_power is None:
            return None
        return ProcessingUnit(name, unit_type, tuple(opps), static_power)

    def _parse_reference(self, record: Record, references: Dict[str, Tuple[OperatingPoint, SourceSpan]]) -> None:
        checker = RecordChecker(record, self.collector, ["unit_type", "opp"])
        unit_type, _ = checker.string("unit_type")
        text, span = checker.string("opp")
        if unit_type is None or text is None:
            return
        opp = self._parse_opp(text, span)
        if opp is None:
            return
        if unit_type in references:
            self.collector.error(f"duplicate reference for unit type {unit_type}", record.span)
            return
        references[unit_type] = (opp, span)


def parse_platform(text: Union[str, bytes], file_name: str = "<platform>") -> Union[Tuple[Platform, ScalingModel], List[Diagnostic]]:
    return PlatformLoader(file_name).load_text(text)


def load_platform(path: Union[str, Path]) -> Union[Tuple[Platform, ScalingModel], List[Diagnostic]]:
    """Load a ``.platform`` file. I/O errors propagate as OSError."""
    path = Path(path)
    return parse_platform(path.read_bytes(), str(path))
