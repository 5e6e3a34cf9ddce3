"""
Mode dispatch for the schedulers.
"""

from typing import Optional

from coordsched_cli.core.contracts.store import ContractStore
from coordsched_cli.core.graph.model import AppGraph
from coordsched_cli.core.platform.energy import Platform, ScalingModel
from coordsched_cli.core.scheduling.costs import CostModel
from coordsched_cli.core.scheduling.exhaustive import schedule_exhaustive
from coordsched_cli.core.scheduling.heuristic import schedule_energy, schedule_makespan
from coordsched_cli.core.scheduling.model import Schedule, SchedulerConfig, SchedulingMode


def cost_model_for(
    platform: Platform,
    contracts: ContractStore,
    config: SchedulerConfig,
    scaling: Optional[ScalingModel] = None,
) -> CostModel:
    return CostModel(
        platform,
        contracts,
        scaling=scaling,
        use_average=config.use_average,
        voter_wcet_ms=config.voter_wcet_ms,
        voter_energy_mj=config.voter_energy_mj,
    )


def solve(graph: AppGraph, cost_model: CostModel, config: SchedulerConfig) -> Schedule:
    """Run the scheduler selected by ``config.mode``."""
    if config.mode is SchedulingMode.MAKESPAN:
        return schedule_makespan(graph, cost_model, config)
    if config.mode is SchedulingMode.EXACT:
        return schedule_exhaustive(graph, cost_model, config)
    return schedule_energy(graph, cost_model, config)
