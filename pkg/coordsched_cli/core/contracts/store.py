"""
Non-functional contract matrix: (component, version, unit type, OPP) -> time and energy.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, Iterator, List, Mapping, Optional, Tuple

from coordsched_cli.core.graph.ft_expansion import VOTER_CONTRACT
from coordsched_cli.core.graph.model import AppGraph
from coordsched_cli.core.platform.energy import (
    OperatingPoint,
    Platform,
    ScalingModel,
    scale_energy,
    scale_time,
)
from coordsched_cli.errors import ContractError, PlatformError

logger = logging.getLogger(__name__)

REFERENCE_OPP = "ref"


@dataclass(frozen=True)
class TimeContract:
    wcet_ms: float
    acet_ms: float

    def __post_init__(self):
        if not (self.wcet_ms > 0 and self.acet_ms > 0):
            raise ContractError(f"execution times must be > 0 (wcet {self.wcet_ms}, acet {self.acet_ms})")
        if self.acet_ms > self.wcet_ms:
            raise ContractError(f"acet_ms {self.acet_ms:g} exceeds wcet_ms {self.wcet_ms:g}")

    def pick(self, use_average: bool) -> float:
        return self.acet_ms if use_average else self.wcet_ms


@dataclass(frozen=True)
class EnergyContract:
    wce_mj: float
    ace_mj: float

    def __post_init__(self):
        if not (self.wce_mj > 0 and self.ace_mj > 0):
            raise ContractError(f"energies must be > 0 (wce {self.wce_mj}, ace {self.ace_mj})")
        if self.ace_mj > self.wce_mj:
            raise ContractError(f"ace_mj {self.ace_mj:g} exceeds wce_mj {self.wce_mj:g}")

    def pick(self, use_average: bool) -> float:
        return self.ace_mj if use_average else self.wce_mj


@dataclass(frozen=True, order=True)
class ContractKey:
    """
    Key of one matrix cell.

    ``opp`` holds a canonical OPP id, or ``ref`` for a reference-point entry.
    """
    component: str
    version: str
    unit_type: str
    opp: str

    def __post_init__(self):
        for name in ("component", "version", "unit_type", "opp"):
            if not getattr(self, name):
                raise ContractError(f"contract key field '{name}' is empty")
        if self.opp != REFERENCE_OPP:
            try:
                canonical = OperatingPoint.parse(self.opp).id
            except PlatformError as e:
                raise ContractError(str(e)) from None
            object.__setattr__(self, "opp", canonical)

    @classmethod
    def at(cls, component: str, version: str, unit_type: str, opp: OperatingPoint) -> "ContractKey":
        return cls(component, version, unit_type, opp.id)

    @property
    def is_reference(self) -> bool:
        return self.opp == REFERENCE_OPP

    @property
    def operating_point(self) -> Optional[OperatingPoint]:
        return None if self.is_reference else OperatingPoint.parse(self.opp)

    def __str__(self) -> str:
        return f"{self.component}/{self.version}/{self.unit_type}@{self.opp}"


@dataclass(frozen=True)
class ContractEntry:
    time: TimeContract
    energy: EnergyContract


@dataclass(frozen=True)
class ContractLookup:
    """Result of a lookup; ``derived`` is set when the figures were scaled from ``source``."""
    time: TimeContract
    energy: EnergyContract
    derived: bool
    source: ContractKey


class ContractStore:
    """
    Read-only contract database.

    ``reference_opp`` maps unit types to the OPP at which ``ref`` entries
    were measured; types without one fall back to the scaling model.
    """

    def __init__(
        self,
        entries: Optional[Mapping[ContractKey, ContractEntry]] = None,
        reference_opp: Optional[Mapping[str, OperatingPoint]] = None,
    ):
        self._entries: Dict[ContractKey, ContractEntry] = dict(entries or {})
        self.reference_opp: Dict[str, OperatingPoint] = dict(reference_opp or {})

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, key: object) -> bool:
        return key in self._entries

    def __iter__(self) -> Iterator[ContractKey]:
        return iter(sorted(self._entries))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ContractStore):
            return NotImplemented
        return self._entries == other._entries and self.reference_opp == other.reference_opp

    def __repr__(self) -> str:
        return f"ContractStore({len(self._entries)} entries)"

    def get(self, key: ContractKey) -> Optional[ContractEntry]:
        return self._entries.get(key)

    def items(self) -> List[Tuple[ContractKey, ContractEntry]]:
        return sorted(self._entries.items())

    def components(self) -> List[str]:
        return sorted({key.component for key in self._entries})

    def without(self, predicate: Callable[[ContractKey], bool]) -> "ContractStore":
        """Copy of the store without the entries matching ``predicate``."""
        kept = {k: v for k, v in self._entries.items() if not predicate(k)}
        return ContractStore(kept, self.reference_opp)

    def reference_for(self, unit_type: str, scaling: Optional[ScalingModel]) -> Optional[OperatingPoint]:
        opp = self.reference_opp.get(unit_type)
        if opp is None and scaling is not None:
            opp = scaling.reference_for(unit_type)
        return opp


def lookup(store: ContractStore, key: ContractKey, scaling: Optional[ScalingModel] = None) -> Optional[ContractLookup]:
    """
    Figures for ``key``.

    An exact entry wins. Otherwise an entry for the same component, version
    and unit type at the reference OPP (a ``ref`` entry, or an explicit entry
    at that OPP) is scaled to the requested OPP. Returns None when neither
    exists.
    """
    exact = store.get(key)
    if exact is not None:
        return ContractLookup(exact.time, exact.energy, derived=False, source=key)
    if key.is_reference:
        return None

    reference = store.reference_for(key.unit_type, scaling)
    if reference is None:
        return None
    for opp in (REFERENCE_OPP, reference.id):
        source = ContractKey(key.component, key.version, key.unit_type, opp)
        entry = store.get(source)
        if entry is not None:
            break
    else:
        return None

    target = key.operating_point
    time = TimeContract(
        scale_time(entry.time.wcet_ms, reference, target),
        scale_time(entry.time.acet_ms, reference, target),
    )
    energy = EnergyContract(
        scale_energy(entry.energy.wce_mj, reference, target),
        scale_energy(entry.energy.ace_mj, reference, target),
    )
    return ContractLookup(time, energy, derived=True, source=source)


def required_keys(graph: AppGraph, platform: Platform, skip_contracts: Iterable[str] = ()) -> List[ContractKey]:
    """Every (task, version, compatible unit type, OPP) cell a schedule may need."""
    skip = set(skip_contracts)
    keys = set()
    for task in graph.nodes:
        if task.contract_name in skip:
            continue
        for version in task.versions:
            for unit_type in version.compatible_unit_types:
                for opp in platform.opps_of_type(unit_type):
                    keys.add(ContractKey.at(task.contract_name, version.version_name, unit_type, opp))
    return sorted(keys)


def coverage_report(
    store: ContractStore,
    graph: AppGraph,
    platform: Platform,
    scaling: Optional[ScalingModel] = None,
    voter_default: bool = True,
) -> List[ContractKey]:
    """
    Contract keys the scheduler may need but lookup cannot answer.

    Voter tasks are skipped while a default voter contract applies. An empty
    result means the graph can be scheduled without missing data.
    """
    if scaling is None:
        try:
            scaling = ScalingModel.for_platform(platform)
        except PlatformError as e:
            logger.warning(f"No scaling model for platform {platform.name}: {e}")
    skip = [VOTER_CONTRACT] if voter_default else []
    missing = [key for key in required_keys(graph, platform, skip) if lookup(store, key, scaling) is None]
    return missing


def _number(value: float) -> str:
    return repr(float(value))


def dump_contracts(store: ContractStore) -> str:
    """Serialize a store to ``.contracts`` syntax; loading the text yields an equal store."""
    lines: List[str] = []
    for unit_type, opp in sorted(store.reference_opp.items()):
        lines.extend(["[reference]", f'unit_type = "{unit_type}"', f'opp = "{opp.id}"', ""])
    for key, entry in store.items():
        lines.extend([
            "[contract]",
            f'component = "{key.component}"',
            f'version = "{key.version}"',
            f'unit_type = "{key.unit_type}"',
            f'opp = "{key.opp}"',
            f"wcet_ms = {_number(entry.time.wcet_ms)}",
            f"acet_ms = {_number(entry.time.acet_ms)}",
            f"wce_mj = {_number(entry.energy.wce_mj)}",
            f"ace_mj = {_number(entry.energy.ace_mj)}",
            "",
        ])
    return "\n".join(lines)
