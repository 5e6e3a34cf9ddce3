"""
End-to-end pipeline: check, expand-ft, schedule, simulate.

Every stage converts its failures into a StageError carrying the stable
exit code of the command-line surface.
"""

import logging
from dataclasses import dataclass, field, replace
from enum import IntEnum
from pathlib import Path
from typing import List, Mapping, Optional, Tuple, Union

from coordsched_cli.config.loaders.contracts_loader import load_contracts
from coordsched_cli.config.loaders.platform_loader import load_platform
from coordsched_cli.core.contracts.store import ContractKey, ContractStore, coverage_report
from coordsched_cli.core.dsl.declarations import Objective
from coordsched_cli.core.dsl.diagnostics import Diagnostic
from coordsched_cli.core.dsl.parser import parse_app_file
from coordsched_cli.core.graph.ft_expansion import expand_ft_checked, strip_ft
from coordsched_cli.core.graph.model import AppGraph, build_graph, with_ft
from coordsched_cli.core.platform.energy import Platform, ScalingModel
from coordsched_cli.core.reporting.manifest import RunManifest
from coordsched_cli.core.scheduling.costs import CostModel
from coordsched_cli.core.scheduling.model import Schedule, SchedulerConfig, SchedulingMode
from coordsched_cli.core.scheduling.solver import cost_model_for, solve
from coordsched_cli.core.simulation.simulator import SimReport, simulate
from coordsched_cli.errors import (
    CoordschedError,
    FtExpansionError,
    GraphError,
    InfeasibleScheduleError,
    MissingContractError,
    SchedulingError,
    SimulationViolation,
)

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


class ExitCode(IntEnum):
    OK = 0
    DIAGNOSTICS = 1
    IO = 2
    INPUTS = 3
    INFEASIBLE = 4
    VIOLATION = 5
    DRIFT = 6
    INTERRUPTED = 130


class StageError(CoordschedError):
    """
    A pipeline stage failed; ``exit_code`` is what the CLI returns.

    ``mode`` is the scheduling mode in effect once the application was
    loaded, or None when the failure came earlier.
    """

    def __init__(
        self,
        stage: str,
        message: str,
        exit_code: ExitCode,
        diagnostics: Optional[List[Diagnostic]] = None,
        best_schedule: Optional[Schedule] = None,
        mode: Optional[SchedulingMode] = None,
    ):
        self.stage = stage
        self.mode = mode
        self.exit_code = exit_code
        self.diagnostics = list(diagnostics or [])
        self.best_schedule = best_schedule
        super().__init__(message)


def load_app(path: PathLike) -> AppGraph:
    """Parse and validate a .coord file (exit 1 on diagnostics, 2 on I/O failure)."""
    try:
        result = parse_app_file(path)
    except OSError as e:
        raise StageError("check", f"cannot read {path}: {e.strerror or e}", ExitCode.IO) from e
    if isinstance(result, list):
        raise StageError("check", f"{path} has errors", ExitCode.DIAGNOSTICS, result)
    graph = build_graph(result)
    if isinstance(graph, list):
        raise StageError("check", f"{path} is not a sound streaming network", ExitCode.DIAGNOSTICS, graph)
    logger.info(f"Loaded {graph.app_name}: {len(graph)} components, {len(graph.edges)} edges")
    return graph


def prepare_graph(
    graph: AppGraph,
    no_ft: bool = False,
    ft_overrides: Optional[Mapping[str, Optional[int]]] = None,
) -> Tuple[AppGraph, List[Diagnostic]]:
    """
    Apply ft overrides (or drop every annotation) and expand the graph.

    Returns:
        Tuple of (expanded graph, warnings)
    """
    for component, replicas in (ft_overrides or {}).items():
        try:
            graph = with_ft(graph, component, replicas)
        except GraphError as e:
            raise StageError("expand-ft", str(e), ExitCode.DIAGNOSTICS) from e
    if no_ft:
        graph = strip_ft(graph)
    try:
        return expand_ft_checked(graph)
    except FtExpansionError as e:
        raise StageError("expand-ft", "fault-tolerance expansion failed", ExitCode.DIAGNOSTICS, e.diagnostics) from e


def load_platform_file(path: PathLike) -> Tuple[Platform, ScalingModel]:
    try:
        result = load_platform(path)
    except OSError as e:
        raise StageError("platform", f"cannot read {path}: {e.strerror or e}", ExitCode.IO) from e
    if isinstance(result, list):
        raise StageError("platform", f"{path} has errors", ExitCode.INPUTS, result)
    platform, scaling = result
    logger.info(f"Loaded platform {platform.name}: {len(platform.units)} units")
    return platform, scaling


def load_contracts_file(path: PathLike) -> ContractStore:
    try:
        result = load_contracts(path)
    except OSError as e:
        raise StageError("contracts", f"cannot read {path}: {e.strerror or e}", ExitCode.IO) from e
    if isinstance(result, list):
        raise StageError("contracts", f"{path} has errors", ExitCode.INPUTS, result)
    logger.info(f"Loaded {len(result)} contract entries")
    return result


def check_coverage(graph: AppGraph, cost_model: CostModel) -> List[ContractKey]:
    """Log uncovered cells; they only become fatal when a task ends up without any option."""
    missing = coverage_report(cost_model.contracts, graph, cost_model.platform, cost_model.scaling)
    if missing:
        logger.warning(f"{len(missing)} contract cell(s) not covered, those placements are skipped")
        for key in missing:
            logger.debug(f"uncovered: {key}")
    return missing


def make_schedule(graph: AppGraph, cost_model: CostModel, config: SchedulerConfig) -> Schedule:
    try:
        return solve(graph, cost_model, config)
    except InfeasibleScheduleError as e:
        raise StageError("schedule", str(e), ExitCode.INFEASIBLE, best_schedule=e.best_schedule) from e
    except MissingContractError as e:
        raise StageError("schedule", str(e), ExitCode.INPUTS) from e
    except SchedulingError as e:
        raise StageError("schedule", str(e), ExitCode.INFEASIBLE) from e


def run_simulation(
    graph: AppGraph, schedule: Schedule, cost_model: CostModel, comm_cost_ms: float = 0.0
) -> SimReport:
    try:
        return simulate(graph, schedule, cost_model, comm_cost_ms)
    except SimulationViolation as e:
        raise StageError("simulate", f"simulation violation: {e}", ExitCode.VIOLATION) from e


@dataclass
class RunResult:
    """Everything one pipeline run produced."""
    graph: AppGraph
    expanded: AppGraph
    cost_model: CostModel
    schedule: Schedule
    report: Optional[SimReport] = None
    manifest: Optional[RunManifest] = None
    warnings: List[Diagnostic] = field(default_factory=list)


def run_pipeline(
    app_path: PathLike,
    platform_path: PathLike,
    contracts_path: PathLike,
    config: SchedulerConfig,
    no_ft: bool = False,
    ft_overrides: Optional[Mapping[str, Optional[int]]] = None,
    run_simulator: bool = True,
    follow_objective: bool = False,
) -> RunResult:
    """
    Run check, expand-ft, schedule and (optionally) simulate.

    With ``follow_objective`` the scheduling mode is taken from the
    application's objective instead of ``config.mode``.

    Raises:
        StageError: the first failing stage, with its exit code
    """
    graph = load_app(app_path)
    if follow_objective:
        config = replace(config, mode=mode_for_objective(graph.objective))
    try:
        expanded, warnings = prepare_graph(graph, no_ft, ft_overrides)
        platform, scaling = load_platform_file(platform_path)
        contracts = load_contracts_file(contracts_path)

        cost_model = cost_model_for(platform, contracts, config, scaling)
        check_coverage(expanded, cost_model)
        schedule = make_schedule(expanded, cost_model, config)

        report = None
        if run_simulator:
            report = run_simulation(expanded, schedule, cost_model, config.comm_cost_ms)
    except StageError as e:
        e.mode = e.mode or config.mode
        raise

    manifest = RunManifest.capture(app_path, platform_path, contracts_path, config_echo(config, no_ft))
    return RunResult(graph, expanded, cost_model, schedule, report, manifest, warnings)


def config_echo(config: SchedulerConfig, no_ft: bool = False) -> dict:
    """Plain mapping of the effective settings for the run manifest."""
    return {
        "mode": config.mode.value,
        "use_average": config.use_average,
        "ft_distinct_units": config.ft_distinct_units,
        "comm_cost_ms": config.comm_cost_ms,
        "deadline_override_ms": config.deadline_override_ms,
        "energy_budget_mj": config.energy_budget_mj,
        "voter_wcet_ms": config.voter_wcet_ms,
        "voter_energy_mj": config.voter_energy_mj,
        "no_ft": no_ft,
    }


def mode_for_objective(objective: Objective) -> SchedulingMode:
    if objective is Objective.MINIMIZE_MAKESPAN:
        return SchedulingMode.MAKESPAN
    return SchedulingMode.ENERGY
