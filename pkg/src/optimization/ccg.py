"""
Column-and-constraint generation for the defender-attacker-defender game.

The master holds the defense binaries and one operator copy per generated
attack; the subproblem returns the worst attack against the master's defense.
"""

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

from ..config import get_settings
from ..di import get_solver
from ..exceptions import ModelBuildError, SolverError
from ..logging_config import get_logger
from ..metrics import record_ccg, record_iteration
from ..models import (
    AttackPlan,
    BoundsRecord,
    DADSolution,
    DefensePlan,
    NetworkInstance,
    ScenarioConfig,
    SupplySlot,
)
from ..network.topology import NetworkView, require_valid
from ..solvers import AbstractModel, Sense, SolveLimits, SolverBackend, SolveStatus, VarKind, default_limits
from .dual import evaluate_defense
from .operator import DefenseVars, OperatorModel, add_operator_block

logger = get_logger(__name__, component="ccg")

IterationCallback = Callable[[BoundsRecord], None]


@dataclass
class MasterModel:
    model: AbstractModel
    view: NetworkView
    scenario: ScenarioConfig
    eta: int
    defense_vars: DefenseVars
    blocks: List[OperatorModel] = field(default_factory=list)
    attacks: List[AttackPlan] = field(default_factory=list)

    def add_attack(self, attack: AttackPlan) -> OperatorModel:
        """Append an operator copy for `attack` and its eta linking row."""
        if attack in self.attacks:
            raise ModelBuildError(f"attack already in the master: {[str(s) for s in attack.targets]}")
        if not attack.within_budgets(self.scenario):
            raise ModelBuildError("attack exceeds the scenario budgets")
        k = len(self.attacks)
        block = add_operator_block(self.model, self.view, self.scenario, attack, self.defense_vars, prefix=f"y{k}.")
        coeffs = {self.eta: 1.0}
        for j, c in block.objective.items():
            coeffs[j] = coeffs.get(j, 0.0) - c
        self.model.add_constr(coeffs, Sense.GE, 0.0, f"link[{k}]", block="link", key=k)
        self.blocks.append(block)
        self.attacks.append(attack)
        return block


def build_master(
    instance: NetworkInstance,
    scenario: ScenarioConfig,
    attacks: List[AttackPlan],
    view: Optional[NetworkView] = None,
) -> MasterModel:
    if len(set(attacks)) != len(attacks):
        raise ModelBuildError("attacks passed to the master must be distinct")
    view = view or NetworkView(instance)
    model = AbstractModel(name=f"master_{view.instance.name}")
    eta = model.add_var("eta", family="eta")
    defense_vars = DefenseVars()
    for cell in scenario.cells:
        for slot in cell.attack_slots():
            defense_vars.defend[slot] = model.add_var(
                f"d[{slot.mode},{slot.phase},{slot.node}]", kind=VarKind.BINARY, key=slot.sort_key, family="defend"
            )
        for slot in cell.reserve_slots():
            defense_vars.open[slot] = model.add_var(
                f"o[{slot.mode},{slot.phase},{slot.node}]", kind=VarKind.BINARY, key=slot.sort_key, family="open"
            )
        model.add_constr(
            {defense_vars.defend[s]: 1.0 for s in cell.attack_slots()},
            Sense.LE,
            cell.n_defend,
            f"defend_budget[{cell.mode},{cell.phase}]",
            block="defense_budget",
        )
        model.add_constr(
            {defense_vars.open[s]: 1.0 for s in cell.reserve_slots()},
            Sense.LE,
            cell.n_open,
            f"open_budget[{cell.mode},{cell.phase}]",
            block="defense_budget",
        )
    model.set_objective({eta: 1.0})
    master = MasterModel(model=model, view=view, scenario=scenario, eta=eta, defense_vars=defense_vars)
    for attack in attacks:
        master.add_attack(attack)
    return master


def solve_master(
    master: MasterModel,
    backend: Optional[SolverBackend] = None,
    limits: Optional[SolveLimits] = None,
) -> Tuple[DefensePlan, float]:
    """Best defense against the known attacks and the resulting lower bound."""
    backend = backend or get_solver()
    outcome = backend.solve(master.model, limits)
    if outcome.values is None or outcome.status not in (SolveStatus.OPTIMAL, SolveStatus.FEASIBLE):
        raise SolverError(f"master {master.model.name!r} failed", status=outcome.status.value)
    values = outcome.values

    def chosen(index: Dict[SupplySlot, int]) -> Tuple[SupplySlot, ...]:
        return tuple(s for s, j in index.items() if values[j] > 0.5)

    defense = DefensePlan(defended=chosen(master.defense_vars.defend), opened=chosen(master.defense_vars.open))
    if outcome.status == SolveStatus.OPTIMAL:
        lower = outcome.objective
    else:
        # only the proven bound is valid below an unproven incumbent
        lower = outcome.bound if outcome.bound is not None else -math.inf
        logger.warning(f"Master stopped at a limit; lower bound {lower:.6g} from the solver bound")
    return defense, float(lower)


def _converged(gap: float, upper: float, tol: float) -> bool:
    return gap <= tol * max(1.0, abs(upper))


def ccg_solve(
    instance: NetworkInstance,
    scenario: ScenarioConfig,
    backend: Optional[SolverBackend] = None,
    on_iteration: Optional[IterationCallback] = None,
) -> DADSolution:
    """
    Solve min over defenses, max over attacks, of the operator cost.

    The loop seeds the master with the zero attack and stops when the best
    upper bound meets the lower bound, when the subproblem repeats a known
    attack, or at the iteration/time caps (status "gap_open").
    """
    require_valid(instance, scenario)
    settings = get_settings()
    backend = backend or get_solver()
    view = NetworkView(instance)
    tol = scenario.gap if scenario.gap is not None else settings.ccg_gap
    max_iterations = scenario.max_iterations or settings.ccg_max_iterations
    time_limit = scenario.time_limit_s or settings.time_limit_s
    log = logger.bind(scenario=scenario.name, backend=backend.name)

    start = time.perf_counter()
    master = build_master(view.instance, scenario, [AttackPlan()], view=view)
    lower, best_upper = -math.inf, math.inf
    best_defense: Optional[DefensePlan] = None
    worst_attack = AttackPlan()
    trace: List[BoundsRecord] = []
    status = "gap_open"

    for k in range(1, max_iterations + 1):
        remaining = time_limit - (time.perf_counter() - start)
        if remaining <= 0:
            log.warning(f"Time limit reached before iteration {k}")
            break
        limits = default_limits(time_limit_s=remaining)

        defense, master_value = solve_master(master, backend, limits)
        lower = max(lower, master_value)
        evaluation = evaluate_defense(view, scenario, defense, backend, limits)
        if evaluation.primal_value < best_upper:
            best_upper = evaluation.primal_value
            best_defense = defense
            worst_attack = evaluation.attack
        gap = best_upper - lower
        record = BoundsRecord(
            iteration=k,
            lower_bound=lower,
            sp_value=evaluation.sp_value,
            upper_bound=evaluation.primal_value,
            best_upper_bound=best_upper,
            gap=gap,
            defense=defense,
            attack=evaluation.attack,
            big_m_escalations=evaluation.escalations,
            elapsed=time.perf_counter() - start,
        )
        trace.append(record)
        record_iteration()
        log.info(
            f"CCG iteration {k}: LB={lower:.6f} SP={evaluation.sp_value:.6f} UB={best_upper:.6f} gap={gap:.3g}",
            extra={"iteration": k},
        )
        if on_iteration is not None:
            on_iteration(record)

        if _converged(gap, best_upper, tol):
            status = "optimal"
            break
        if evaluation.attack in master.attacks:
            # the master already prices this attack, so LB >= its value up to solver tolerance
            log.warning(f"Attack repeated with gap {gap:.3g}; stopping")
            status = "optimal"
            break
        master.add_attack(evaluation.attack)
    else:
        log.warning(f"Iteration cap {max_iterations} reached with gap {best_upper - lower:.3g}")

    wall = time.perf_counter() - start
    record_ccg(wall)
    if best_defense is None:
        raise SolverError("decomposition produced no incumbent before its limits")
    return DADSolution(
        status=status,
        objective=best_upper,
        lower_bound=lower,
        gap=best_upper - lower,
        defense=best_defense,
        worst_attack=worst_attack,
        attacks=list(master.attacks),
        trace=trace,
        iterations=len(trace),
        wall_time=wall,
        backend=backend.name,
    )


def selection_overlap(solution: DADSolution) -> Dict[str, bool]:
    """Pairwise disjointness of defended, opened and attacked nodes."""
    defended = {s.node for s in solution.defense.defended}
    opened = {s.node for s in solution.defense.opened}
    attacked = {s.node for s in solution.worst_attack.targets}
    return {
        "defense_reserve_disjoint": not (defended & opened),
        "defense_attack_disjoint": not (defended & attacked),
        "reserve_attack_disjoint": not (opened & attacked),
    }
