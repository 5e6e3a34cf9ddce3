"""
Heterogeneous platform model with DVFS scaling and static energy.

Unit algebra: mW * ms = uJ; every energy figure leaves this module in mJ.
"""

import logging
import math
import re
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

from coordsched_cli.errors import PlatformError

logger = logging.getLogger(__name__)

_OPP_PATTERN = re.compile(r"^\s*(\d+(?:\.\d+)?)\s*MHz\s*@\s*(\d+(?:\.\d+)?)\s*V\s*$")


def _decimal(value: float, min_places: int = 0) -> str:
    """Shortest plain decimal that parses back to ``value``, padded to ``min_places``."""
    text = repr(float(value))
    if "e" in text or "E" in text:
        text = f"{value:.15f}"
    whole, _, frac = text.partition(".")
    frac = frac.rstrip("0").ljust(min_places, "0")
    return f"{whole}.{frac}" if frac else whole


@dataclass(frozen=True, order=True)
class OperatingPoint:
    """A (frequency, voltage) pair; ``800MHz@0.9V`` and ``800MHz@0.90V`` are equal."""
    freq_mhz: float
    voltage_v: float

    def __post_init__(self):
        if not (self.freq_mhz > 0 and self.voltage_v > 0):
            raise PlatformError(f"operating point needs positive frequency and voltage: {self.freq_mhz}MHz@{self.voltage_v}V")

    @property
    def id(self) -> str:
        """
        Canonical id: frequency without trailing zeros, voltage with at least
        two decimals. ``OperatingPoint.parse(opp.id) == opp`` always holds.
        """
        return f"{_decimal(self.freq_mhz)}MHz@{_decimal(self.voltage_v, 2)}V"

    @classmethod
    def parse(cls, text: str) -> "OperatingPoint":
        """
        Parse ``fMHz@vV``.

        Raises:
            PlatformError: malformed id or non-positive values
        """
        match = _OPP_PATTERN.match(text)
        if not match:
            raise PlatformError(f"malformed operating point '{text}' (expected e.g. 800MHz@0.90V)")
        return cls(float(match.group(1)), float(match.group(2)))

    def __str__(self) -> str:
        return self.id


@dataclass(frozen=True)
class ProcessingUnit:
    name: str
    unit_type: str
    opps: Tuple[OperatingPoint, ...]
    static_power_mw: float = 0.0

    def __post_init__(self):
        if not self.opps:
            raise PlatformError(f"unit {self.name} declares no operating point")
        if len(set(self.opps)) != len(self.opps):
            raise PlatformError(f"unit {self.name} declares an operating point twice")
        if self.static_power_mw < 0:
            raise PlatformError(f"unit {self.name}: static power must be >= 0")

    def supports(self, opp: OperatingPoint) -> bool:
        return opp in self.opps

    @property
    def fastest(self) -> OperatingPoint:
        return max(self.opps)


@dataclass(frozen=True)
class Platform:
    """A named set of processing units; unit names are unique."""
    name: str
    units: Tuple[ProcessingUnit, ...]

    def __post_init__(self):
        if not self.units:
            raise PlatformError(f"platform {self.name} has no processing unit")
        names = [unit.name for unit in self.units]
        duplicates = sorted({n for n in names if names.count(n) > 1})
        if duplicates:
            raise PlatformError(f"duplicate unit name(s): {', '.join(duplicates)}")

    def unit(self, name: str) -> ProcessingUnit:
        for unit in self.units:
            if unit.name == name:
                return unit
        raise PlatformError(f"unknown unit {name}")

    @property
    def unit_names(self) -> List[str]:
        return sorted(unit.name for unit in self.units)

    @property
    def unit_types(self) -> List[str]:
        return sorted({unit.unit_type for unit in self.units})

    def units_of_type(self, unit_type: str) -> List[ProcessingUnit]:
        return sorted((u for u in self.units if u.unit_type == unit_type), key=lambda u: u.name)

    def opps_of_type(self, unit_type: str) -> List[OperatingPoint]:
        """Every OPP offered by at least one unit of ``unit_type``, sorted."""
        return sorted({opp for unit in self.units_of_type(unit_type) for opp in unit.opps})

    @property
    def total_static_power_mw(self) -> float:
        return math.fsum(unit.static_power_mw for unit in self.units)


@dataclass(frozen=True)
class ScalingModel:
    """
    Cycle-scaling DVFS model: time scales with 1/f, dynamic energy with V^2.

    ``reference`` maps each unit type to the OPP at which reference contract
    entries are measured.
    """
    kind: str = "cycle_scaling"
    reference: Mapping[str, OperatingPoint] = field(default_factory=dict)

    def reference_for(self, unit_type: str) -> Optional[OperatingPoint]:
        return self.reference.get(unit_type)

    @classmethod
    def for_platform(
        cls,
        platform: Platform,
        overrides: Optional[Mapping[str, OperatingPoint]] = None,
    ) -> "ScalingModel":
        """
        Reference OPPs for every unit type of ``platform``.

        Without an override, a type's reference is the highest-frequency OPP
        shared by all of its units.

        Raises:
            PlatformError: an override is missing on some unit, or a type has no common OPP
        """
        overrides = dict(overrides or {})
        reference: Dict[str, OperatingPoint] = {}
        for unit_type in platform.unit_types:
            units = platform.units_of_type(unit_type)
            common = set(units[0].opps)
            for unit in units[1:]:
                common &= set(unit.opps)
            if unit_type in overrides:
                opp = overrides.pop(unit_type)
                lacking = [u.name for u in units if not u.supports(opp)]
                if lacking:
                    raise PlatformError(
                        f"reference {opp} for {unit_type} is not offered by unit(s) {', '.join(lacking)}"
                    )
                reference[unit_type] = opp
            elif common:
                reference[unit_type] = max(common)
            else:
                raise PlatformError(f"units of type {unit_type} share no operating point; declare a reference")
        for unit_type in overrides:
            logger.warning("reference OPP given for unknown unit type %s", unit_type)
        return cls(reference=reference)


def scale_time(t_ref_ms: float, ref: OperatingPoint, target: OperatingPoint) -> float:
    """Execution time at ``target`` for a fixed cycle count measured at ``ref``."""
    if ref == target:
        return t_ref_ms
    return t_ref_ms * ref.freq_mhz / target.freq_mhz


def scale_energy(e_ref_mj: float, ref: OperatingPoint, target: OperatingPoint) -> float:
    """Dynamic energy at ``target``; switching energy per cycle goes with V^2."""
    if ref == target:
        return e_ref_mj
    return e_ref_mj * (target.voltage_v / ref.voltage_v) ** 2


def static_energy(platform: Platform, makespan_ms: float) -> float:
    """Energy in mJ burnt by every unit's static power over the makespan."""
    if makespan_ms < 0:
        raise PlatformError(f"makespan must be >= 0 (got {makespan_ms})")
    return math.fsum(unit.static_power_mw * makespan_ms for unit in platform.units) / 1000.0


def _format_number(value: float) -> str:
    return _decimal(value)


def dump_platform(platform: Platform, scaling: Optional[ScalingModel] = None) -> str:
    """Serialize a platform back to ``.platform`` record syntax."""
    lines: List[str] = ["[platform]", f'name = "{platform.name}"', ""]
    for unit in platform.units:
        lines.append("[unit]")
        lines.append(f'name = "{unit.name}"')
        lines.append(f'type = "{unit.unit_type}"')
        lines.append(f"static_power_mw = {_format_number(unit.static_power_mw)}")
        lines.extend(f'opp = "{opp.id}"' for opp in unit.opps)
        lines.append("")
    if scaling is not None:
        for unit_type, opp in sorted(scaling.reference.items()):
            lines.extend(["[reference]", f'unit_type = "{unit_type}"', f'opp = "{opp.id}"', ""])
    return "\n".join(lines)


def platform_rows(platform: Platform, scaling: Optional[ScalingModel] = None) -> Iterable[Dict[str, object]]:
    """One row per (unit, OPP) for tabular display."""
    for unit in sorted(platform.units, key=lambda u: u.name):
        reference = scaling.reference_for(unit.unit_type) if scaling else None
        for opp in unit.opps:
            yield {
                "unit": unit.name,
                "type": unit.unit_type,
                "static_power_mw": unit.static_power_mw,
                "opp": opp.id,
                "freq_mhz": opp.freq_mhz,
                "voltage_v": opp.voltage_v,
                "reference": opp == reference,
            }
