"""
Exception hierarchy shared by all coordsched modules.
"""

from typing import Iterable, List, Optional, TYPE_CHECKING

if TYPE_CHECKING:
    from coordsched_cli.core.dsl.diagnostics import Diagnostic
    from coordsched_cli.core.scheduling.model import Schedule
    from coordsched_cli.core.simulation.simulator import SimEvent


class CoordschedError(Exception):
    """Base class for all coordsched errors."""
    pass


class DiagnosticsError(CoordschedError):
    """Raised when a loader is used in raising mode and input has errors."""

    def __init__(self, diagnostics: Iterable["Diagnostic"]):
        self.diagnostics: List["Diagnostic"] = list(diagnostics)
        super().__init__(f"{len(self.diagnostics)} diagnostic(s)")


class GraphError(CoordschedError):
    """Raised on invalid lookups against an application graph."""
    pass


class FtExpansionError(DiagnosticsError):
    """Raised when fault-tolerance expansion cannot rewrite the graph."""
    pass


class PlatformError(CoordschedError):
    """Raised when a platform model is inconsistent."""
    pass


class ContractError(CoordschedError):
    """Raised when contract data is unusable."""
    pass


class SchedulingError(CoordschedError):
    """Base class for scheduler failures."""
    pass


class InfeasibleScheduleError(SchedulingError):
    """No schedule meeting the constraints was found."""

    def __init__(
        self,
        reason: str,
        achieved_makespan_ms: Optional[float] = None,
        best_schedule: Optional["Schedule"] = None,
    ):
        self.reason = reason
        self.achieved_makespan_ms = achieved_makespan_ms
        self.best_schedule = best_schedule
        message = reason
        if achieved_makespan_ms is not None:
            message += f" (achieved makespan {achieved_makespan_ms:.3f} ms)"
        super().__init__(message)


class MissingContractError(SchedulingError, ContractError):
    """A task cannot be costed because contracts are missing."""

    def __init__(self, task: str, keys: Iterable[object] = ()):
        self.task = task
        self.keys = list(keys)
        detail = ", ".join(str(key) for key in self.keys[:4])
        if len(self.keys) > 4:
            detail += ", ..."
        message = f"missing contract for task {task}"
        if detail:
            message += f": {detail}"
        super().__init__(message)


class InstanceTooLargeError(SchedulingError):
    """The exhaustive scheduler refuses instances above its task cap."""

    def __init__(self, task_count: int, cap: int):
        self.task_count = task_count
        self.cap = cap
        super().__init__(f"instance has {task_count} tasks, exhaustive search is capped at {cap}")


class SimulationViolation(CoordschedError):
    """The simulator found an illegal event while replaying a schedule."""

    def __init__(self, message: str, event: Optional["SimEvent"] = None):
        self.event = event
        super().__init__(message)
