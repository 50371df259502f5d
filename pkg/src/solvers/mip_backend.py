"""
python-mip backend (CBC bundled, Gurobi through python-mip when licensed).
"""

from typing import List, Tuple

from ..exceptions import SolverUnavailableError
from .base import BaseBackend, default_limits
from .interfaces import BackendDiagnostic, SolveLimits, SolveOutcome, SolveStatus
from .model import AbstractModel, ObjectiveSense, Sense, VarKind

try:
    import mip
except ImportError:  # pragma: no cover - checked by diagnose()
    mip = None


def _status_map():
    S = mip.OptimizationStatus
    return {
        S.OPTIMAL: SolveStatus.OPTIMAL,
        S.FEASIBLE: SolveStatus.FEASIBLE,
        S.INFEASIBLE: SolveStatus.INFEASIBLE,
        S.INT_INFEASIBLE: SolveStatus.INFEASIBLE,
        S.UNBOUNDED: SolveStatus.UNBOUNDED,
        S.NO_SOLUTION_FOUND: SolveStatus.NO_SOLUTION,
        S.ERROR: SolveStatus.ERROR,
    }


class MipBackend(BaseBackend):
    """Backend driving python-mip with the given solver library."""

    def __init__(self, solver_name: str = "CBC", name: str = "cbc", session_cap=None):
        self.name = name
        self.solver_name = solver_name
        super().__init__(session_cap)

    def _require(self):
        if mip is None:
            raise SolverUnavailableError(f"{self.name}: python-mip is not installed")

    def _build(self, model: AbstractModel, limits: SolveLimits) -> Tuple["mip.Model", List, List]:
        self._require()
        sense = mip.MINIMIZE if model.sense == ObjectiveSense.MINIMIZE else mip.MAXIMIZE
        try:
            m = mip.Model(name=model.name, sense=sense, solver_name=self.solver_name)
        except Exception as e:
            raise SolverUnavailableError(f"{self.name}: cannot load solver library: {e}") from e
        m.verbose = 0
        m.threads = limits.threads
        m.infeas_tol = limits.feasibility_tol
        m.integer_tol = limits.integrality_tol
        m.opt_tol = limits.optimality_tol
        m.max_mip_gap = limits.mip_gap
        m.max_mip_gap_abs = limits.mip_gap

        mvars = [
            m.add_var(
                name=model.backend_name(v.index),
                lb=v.lb,
                ub=v.ub,
                var_type=mip.BINARY if v.kind == VarKind.BINARY else mip.CONTINUOUS,
            )
            for v in model.variables
        ]
        mconstrs = []
        for c in model.constraints:
            expr = mip.xsum(a * mvars[j] for j, a in c.coeffs.items())
            if c.sense == Sense.LE:
                row = expr <= c.rhs
            elif c.sense == Sense.GE:
                row = expr >= c.rhs
            else:
                row = expr == c.rhs
            mconstrs.append(m.add_constr(row, name=model.backend_name(c.index, row=True)))
        objective = mip.xsum(c * mvars[j] for j, c in model.objective.items()) + model.objective_constant
        m.objective = mip.minimize(objective) if model.sense == ObjectiveSense.MINIMIZE else mip.maximize(objective)
        return m, mvars, mconstrs

    def _solve(self, model: AbstractModel, limits: SolveLimits) -> SolveOutcome:
        m, mvars, mconstrs = self._build(model, limits)
        kwargs = {}
        if limits.time_limit_s is not None:
            kwargs["max_seconds"] = limits.time_limit_s
        raw = m.optimize(**kwargs)
        status = _status_map().get(raw, SolveStatus.ERROR)
        outcome = SolveOutcome(backend=self.name, status=status)
        if m.num_solutions > 0 and status in (SolveStatus.OPTIMAL, SolveStatus.FEASIBLE):
            outcome.values = [float(v.x) for v in mvars]
            outcome.objective = float(m.objective_value)
            outcome.bound = float(m.objective_bound) if model.is_mip else outcome.objective
            if not model.is_mip and status == SolveStatus.OPTIMAL:
                outcome.duals = [float(c.pi) if c.pi is not None else 0.0 for c in mconstrs]
        return outcome

    def write(self, model: AbstractModel, path: str) -> None:
        m, _, _ = self._build(model, default_limits())
        m.write(path)

    def diagnose(self) -> BackendDiagnostic:
        if mip is None:
            return BackendDiagnostic(name=self.name, available=False, detail="python-mip is not installed")
        try:
            trial = mip.Model(solver_name=self.solver_name)
            trial.verbose = 0
            x = trial.add_var(ub=1.0)
            trial.objective = mip.maximize(x)
            status = trial.optimize()
        except Exception as e:
            return BackendDiagnostic(name=self.name, available=False, detail=str(e))
        ok = status == mip.OptimizationStatus.OPTIMAL
        return BackendDiagnostic(
            name=self.name,
            available=ok,
            detail=f"python-mip {getattr(mip, '__version__', '?')}, solver {self.solver_name}, trial {status.name}",
        )
