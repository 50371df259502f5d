"""
Shared backend plumbing: session cap, timing, metrics, logging.
"""

import threading
import time
from abc import ABC, abstractmethod
from typing import Optional

from ..config import get_settings
from ..exceptions import SolverError
from ..logging_config import get_logger
from ..metrics import record_error, record_solve
from .interfaces import BackendDiagnostic, SolveLimits, SolveOutcome
from .model import AbstractModel

logger = get_logger(__name__)


def default_limits(time_limit_s: Optional[float] = None, mip_gap: Optional[float] = None) -> SolveLimits:
    s = get_settings()
    return SolveLimits(
        time_limit_s=time_limit_s if time_limit_s is not None else s.time_limit_s,
        mip_gap=mip_gap if mip_gap is not None else s.mip_gap,
        threads=s.solver_threads,
        feasibility_tol=s.feasibility_tol,
        integrality_tol=s.integrality_tol,
        optimality_tol=s.optimality_tol,
    )


class BaseBackend(ABC):
    """Base class for MILP backends; at most `session_cap` solves run at once."""

    name: str = "base"

    def __init__(self, session_cap: Optional[int] = None):
        cap = session_cap or get_settings().solver_session_cap
        self._sessions = threading.BoundedSemaphore(cap)
        self.logger = logger.bind(backend=self.name)

    def solve(self, model: AbstractModel, limits: Optional[SolveLimits] = None) -> SolveOutcome:
        limits = limits or default_limits()
        kind = "mip" if model.is_mip else "lp"
        with self._sessions:
            start = time.perf_counter()
            try:
                outcome = self._solve(model, limits)
            except SolverError:
                record_error("SolverError", self.name)
                raise
            except Exception as e:
                record_error(type(e).__name__, self.name)
                raise SolverError(f"{self.name} failed on model {model.name!r}: {e}") from e
            elapsed = time.perf_counter() - start
        outcome.wall_time = elapsed
        outcome.tolerances = limits.tolerances
        record_solve(self.name, kind, outcome.status.value, elapsed)
        self.logger.debug(
            f"Solved {model.name} ({model.num_vars} vars, {model.num_constrs} rows): "
            f"{outcome.status.value} obj={outcome.objective}",
            extra={"duration": elapsed},
        )
        return outcome

    @abstractmethod
    def _solve(self, model: AbstractModel, limits: SolveLimits) -> SolveOutcome:
        ...

    @abstractmethod
    def write(self, model: AbstractModel, path: str) -> None:
        ...

    @abstractmethod
    def diagnose(self) -> BackendDiagnostic:
        ...
