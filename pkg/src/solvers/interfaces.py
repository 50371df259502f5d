from enum import Enum
from typing import Dict, List, Optional, Protocol

from pydantic import BaseModel, Field

from .model import AbstractModel


class SolveStatus(str, Enum):
    OPTIMAL = "optimal"
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    TIME_LIMIT = "time_limit"
    NO_SOLUTION = "no_solution"
    ERROR = "error"


class SolveLimits(BaseModel):
    time_limit_s: Optional[float] = None
    mip_gap: float = 1e-9
    threads: int = 1
    feasibility_tol: float = 1e-9
    integrality_tol: float = 1e-7
    optimality_tol: float = 1e-9

    @property
    def tolerances(self) -> Dict[str, float]:
        return {
            "feasibility": self.feasibility_tol,
            "integrality": self.integrality_tol,
            "optimality": self.optimality_tol,
            "mip_gap": self.mip_gap,
        }


class SolveOutcome(BaseModel):
    backend: str
    status: SolveStatus
    objective: Optional[float] = None
    bound: Optional[float] = None
    values: Optional[List[float]] = None
    duals: Optional[List[float]] = None
    wall_time: float = 0.0
    tolerances: Dict[str, float] = Field(default_factory=dict)

    @property
    def has_solution(self) -> bool:
        return self.values is not None and self.status in (SolveStatus.OPTIMAL, SolveStatus.FEASIBLE)

    def value(self, idx: int) -> float:
        if self.values is None:
            raise ValueError("solve produced no primal values")
        return self.values[idx]


class BackendDiagnostic(BaseModel):
    name: str
    available: bool
    detail: str = ""


class SolverBackend(Protocol):
    """Interface every MILP backend implements"""

    name: str

    def solve(self, model: AbstractModel, limits: Optional[SolveLimits] = None) -> SolveOutcome:
        """Solve the model and return status, values and (for LPs) row duals"""
        ...

    def write(self, model: AbstractModel, path: str) -> None:
        """Write the model in the backend's LP/MPS writer format (by extension)"""
        ...

    def diagnose(self) -> BackendDiagnostic:
        """Report whether the backend can be loaded and licensed"""
        ...
