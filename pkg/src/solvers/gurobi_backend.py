"""
Native gurobipy backend (optional, needs a license).
"""

from ..exceptions import SolverUnavailableError
from .base import BaseBackend, default_limits
from .interfaces import BackendDiagnostic, SolveLimits, SolveOutcome, SolveStatus
from .model import AbstractModel, ObjectiveSense, Sense, VarKind

try:
    import gurobipy as gp
    from gurobipy import GRB
except ImportError:  # pragma: no cover - optional dependency
    gp = None
    GRB = None

# Gurobi rejects tolerances below these
_MIN_TOL = 1e-9


class GurobiBackend(BaseBackend):
    name = "gurobi"

    def _env(self):
        if gp is None:
            raise SolverUnavailableError("gurobi: gurobipy is not installed")
        try:
            env = gp.Env(empty=True)
            env.setParam("OutputFlag", 0)
            env.start()
        except gp.GurobiError as e:
            raise SolverUnavailableError(f"gurobi: license or environment error: {e}") from e
        return env

    def _build(self, model: AbstractModel, limits: SolveLimits):
        env = self._env()
        m = gp.Model(model.name, env=env)
        m.Params.Threads = limits.threads
        m.Params.FeasibilityTol = max(limits.feasibility_tol, _MIN_TOL)
        m.Params.IntFeasTol = max(limits.integrality_tol, _MIN_TOL)
        m.Params.OptimalityTol = max(limits.optimality_tol, _MIN_TOL)
        m.Params.MIPGap = limits.mip_gap
        if limits.time_limit_s is not None:
            m.Params.TimeLimit = limits.time_limit_s

        gvars = [
            m.addVar(
                lb=v.lb if v.lb != -float("inf") else -GRB.INFINITY,
                ub=v.ub if v.ub != float("inf") else GRB.INFINITY,
                vtype=GRB.BINARY if v.kind == VarKind.BINARY else GRB.CONTINUOUS,
                name=model.backend_name(v.index),
            )
            for v in model.variables
        ]
        senses = {Sense.LE: GRB.LESS_EQUAL, Sense.GE: GRB.GREATER_EQUAL, Sense.EQ: GRB.EQUAL}
        gconstrs = []
        for c in model.constraints:
            cols = list(c.coeffs.keys())
            expr = gp.LinExpr([c.coeffs[j] for j in cols], [gvars[j] for j in cols])
            gconstrs.append(m.addLConstr(expr, senses[c.sense], c.rhs, name=model.backend_name(c.index, row=True)))
        cols = list(model.objective.keys())
        objective = gp.LinExpr([model.objective[j] for j in cols], [gvars[j] for j in cols])
        objective.addConstant(model.objective_constant)
        m.setObjective(objective, GRB.MINIMIZE if model.sense == ObjectiveSense.MINIMIZE else GRB.MAXIMIZE)
        return m, gvars, gconstrs

    def _solve(self, model: AbstractModel, limits: SolveLimits) -> SolveOutcome:
        m, gvars, gconstrs = self._build(model, limits)
        m.optimize()
        status = {
            GRB.OPTIMAL: SolveStatus.OPTIMAL,
            GRB.INFEASIBLE: SolveStatus.INFEASIBLE,
            GRB.INF_OR_UNBD: SolveStatus.INFEASIBLE,
            GRB.UNBOUNDED: SolveStatus.UNBOUNDED,
            GRB.TIME_LIMIT: SolveStatus.TIME_LIMIT,
        }.get(m.Status, SolveStatus.ERROR)
        outcome = SolveOutcome(backend=self.name, status=status)
        if m.SolCount > 0 and status in (SolveStatus.OPTIMAL, SolveStatus.TIME_LIMIT):
            outcome.values = [float(x) for x in m.getAttr("X", gvars)]
            outcome.objective = float(m.ObjVal)
            outcome.bound = float(m.ObjBound) if model.is_mip else outcome.objective
            if not model.is_mip and status == SolveStatus.OPTIMAL and gconstrs:
                outcome.duals = [float(p) for p in m.getAttr("Pi", gconstrs)]
            if status == SolveStatus.TIME_LIMIT:
                outcome.status = SolveStatus.FEASIBLE
        return outcome

    def write(self, model: AbstractModel, path: str) -> None:
        m, _, _ = self._build(model, default_limits())
        m.update()
        m.write(path)

    def diagnose(self) -> BackendDiagnostic:
        if gp is None:
            return BackendDiagnostic(name=self.name, available=False, detail="gurobipy is not installed")
        try:
            env = self._env()
            env.dispose()
        except SolverUnavailableError as e:
            return BackendDiagnostic(name=self.name, available=False, detail=str(e))
        version = ".".join(str(p) for p in gp.gurobi.version())
        return BackendDiagnostic(name=self.name, available=True, detail=f"gurobipy {version}")
