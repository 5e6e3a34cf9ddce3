"""
Cost model shared by the schedulers, energy prediction and the simulator.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from coordsched_cli.core.contracts.store import ContractKey, ContractStore, lookup
from coordsched_cli.core.graph.ft_expansion import VOTER_CONTRACT
from coordsched_cli.core.graph.model import TaskNode
from coordsched_cli.core.platform.energy import OperatingPoint, Platform, ScalingModel
from coordsched_cli.errors import InfeasibleScheduleError, MissingContractError, PlatformError, SchedulingError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class TaskOption:
    """One way to run a task: unit, version and OPP with the resulting figures."""
    unit: str
    version: str
    opp: str
    time_ms: float = field(compare=False)
    energy_mj: float = field(compare=False)
    unit_type: str = field(compare=False)
    derived: bool = field(default=False, compare=False)

    @property
    def placement_key(self) -> Tuple[str, str, str]:
        return self.unit, self.version, self.opp


class CostModel:
    """
    Resolves time and energy of (task, version, unit type, OPP) cells.

    Worst-case figures are used unless ``use_average`` is set. Voters fall
    back to a fixed default contract when the store has no ``__voter`` entry.
    """

    def __init__(
        self,
        platform: Platform,
        contracts: ContractStore,
        scaling: Optional[ScalingModel] = None,
        use_average: bool = False,
        voter_wcet_ms: float = 0.5,
        voter_energy_mj: float = 0.1,
    ):
        self.platform = platform
        self.contracts = contracts
        if scaling is None:
            try:
                scaling = ScalingModel.for_platform(platform)
            except PlatformError as e:
                logger.warning(f"No scaling references for platform {platform.name}: {e}")
                scaling = ScalingModel()
        self.scaling = scaling
        self.use_average = use_average
        self.voter_wcet_ms = voter_wcet_ms
        self.voter_energy_mj = voter_energy_mj
        self._options: Dict[TaskNode, List[TaskOption]] = {}

    def with_case(self, use_average: bool) -> "CostModel":
        """Same inputs, other case selection."""
        return CostModel(
            self.platform, self.contracts, self.scaling, use_average,
            self.voter_wcet_ms, self.voter_energy_mj,
        )

    @property
    def static_power_mw(self) -> float:
        return self.platform.total_static_power_mw

    def figures(
        self, contract_name: str, version: str, unit_type: str, opp: OperatingPoint
    ) -> Optional[Tuple[float, float, bool]]:
        """(time_ms, energy_mj, derived) for one cell, or None when no contract answers."""
        key = ContractKey.at(contract_name, version, unit_type, opp)
        found = lookup(self.contracts, key, self.scaling)
        if found is not None:
            return found.time.pick(self.use_average), found.energy.pick(self.use_average), found.derived
        if contract_name == VOTER_CONTRACT:
            return self.voter_wcet_ms, self.voter_energy_mj, False
        return None

    def options(self, task: TaskNode) -> List[TaskOption]:
        """
        Every costed option of ``task``, sorted by unit, version and OPP id.

        Raises:
            InfeasibleScheduleError: no unit of a compatible type exists
            MissingContractError: compatible units exist but no cell is costed
        """
        cached = self._options.get(task)
        if cached is not None:
            return cached

        options: List[TaskOption] = []
        missing: List[ContractKey] = []
        compatible_units = 0
        for version in task.versions:
            for unit_type in version.compatible_unit_types:
                for unit in self.platform.units_of_type(unit_type):
                    compatible_units += 1
                    for opp in unit.opps:
                        found = self.figures(task.contract_name, version.version_name, unit_type, opp)
                        if found is None:
                            missing.append(ContractKey.at(task.contract_name, version.version_name, unit_type, opp))
                            continue
                        time_ms, energy_mj, derived = found
                        options.append(TaskOption(
                            unit.name, version.version_name, opp.id, time_ms, energy_mj, unit_type, derived
                        ))

        if not options:
            if not compatible_units:
                raise InfeasibleScheduleError(f"task {task.name} has no compatible processing unit")
            raise MissingContractError(task.name, sorted(set(missing)))
        if missing:
            logger.debug(f"{task.name}: {len(set(missing))} uncosted cell(s) skipped")

        options.sort()
        self._options[task] = options
        return options

    def option(self, task: TaskNode, unit: str, version: str, opp: str) -> TaskOption:
        """
        The option for an explicit placement.

        Raises:
            SchedulingError: unit, version or OPP incompatible with the task
            MissingContractError: no contract answers for the cell
        """
        try:
            processing_unit = self.platform.unit(unit)
        except PlatformError:
            raise SchedulingError(f"unknown unit {unit} for task {task.name}") from None
        decl = task.version(version)
        if decl is None:
            raise SchedulingError(f"task {task.name} has no version {version}")
        if processing_unit.unit_type not in decl.compatible_unit_types:
            raise SchedulingError(
                f"version {version} of {task.name} cannot run on {unit} (type {processing_unit.unit_type})"
            )
        try:
            point = OperatingPoint.parse(opp)
        except PlatformError as e:
            raise SchedulingError(str(e)) from None
        if not processing_unit.supports(point):
            raise SchedulingError(f"unit {unit} has no operating point {point.id}")
        found = self.figures(task.contract_name, version, processing_unit.unit_type, point)
        if found is None:
            raise MissingContractError(
                task.name, [ContractKey.at(task.contract_name, version, processing_unit.unit_type, point)]
            )
        time_ms, energy_mj, derived = found
        return TaskOption(unit, version, point.id, time_ms, energy_mj, processing_unit.unit_type, derived)
