"""
Attacker subproblem SP(w).

The operator LP for the fixed defense (and no attack) is dualized row by row:
<= rows are negated into >= rows, >= rows get nonnegative duals, = rows free
duals, and each primal column becomes one dual row. The interdiction term
-|b| * delta is then replaced by -|b| * delta_bar with
delta_bar = (1 - (1 - d) a) * delta, linearized with big-M rows.
"""

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Tuple, Union

from ..config import get_settings
from ..di import get_solver
from ..exceptions import ModelBuildError, SolverError
from ..logging_config import get_logger
from ..models import (
    DUAL_DOMAINS,
    AttackPlan,
    BigMPolicy,
    DefensePlan,
    DualSolution,
    NetworkInstance,
    OperatorSolution,
    ScenarioConfig,
    SupplySlot,
)
from ..network.topology import NetworkView
from ..solvers import (
    INF,
    AbstractModel,
    ObjectiveSense,
    Sense,
    SolveLimits,
    SolverBackend,
    SolveStatus,
    VarKind,
)
from .operator import OperatorModel, build_operator_lp, evaluate_plans

logger = get_logger(__name__, component="attacker")

# delta within this share of M counts as binding
BINDING_SHARE = 0.99


# =============================
#          Dualizer
# =============================


@dataclass
class DualizedModel:
    model: AbstractModel
    primal: AbstractModel
    row_dual: Dict[int, int] = field(default_factory=dict)


def dualize(primal: AbstractModel, name: Optional[str] = None) -> DualizedModel:
    """LP dual of min{c x : A x (>=|=|<=) b, x >= 0}."""
    if primal.sense != ObjectiveSense.MINIMIZE:
        raise ModelBuildError("only minimization models can be dualized")
    for v in primal.variables:
        if v.kind != VarKind.CONTINUOUS or v.lb != 0.0 or v.ub != INF:
            raise ModelBuildError(f"column {v.name!r} is not a plain nonnegative continuous variable")

    dual = AbstractModel(name=name or f"dual_{primal.name}", sense=ObjectiveSense.MAXIMIZE)
    result = DualizedModel(model=dual, primal=primal)
    columns: Dict[int, Dict[int, float]] = defaultdict(dict)
    for row in primal.constraints:
        sign = -1.0 if row.sense == Sense.LE else 1.0
        lb = -INF if row.sense == Sense.EQ else 0.0
        y = dual.add_var(f"y{row.index}_{row.name}", lb=lb, key=row.key, family=row.block)
        result.row_dual[row.index] = y
        if row.rhs:
            dual.add_objective_term(y, sign * row.rhs)
        for j, a in row.coeffs.items():
            columns[j][y] = sign * a
    for v in primal.variables:
        dual.add_constr(
            columns.get(v.index, {}),
            Sense.LE,
            primal.objective.get(v.index, 0.0),
            f"col_{v.name}",
            block="column",
            key=v.key,
        )
    dual.objective_constant = primal.objective_constant
    return result


# =============================
#           Big-M
# =============================


def resolve_big_m(
    view: NetworkView,
    scenario: ScenarioConfig,
    policy: Optional[BigMPolicy] = None,
) -> Dict[SupplySlot, float]:
    """Numeric M per attackable slot under the given (or scenario) policy."""
    policy = policy or scenario.big_m
    scale = 1.0 + policy.margin
    if policy.kind == "fixed":
        if policy.value is None:
            raise ModelBuildError("big-M policy 'fixed' needs a value")
        return {slot: policy.value for slot in scenario.attack_slots()}
    if policy.kind == "penalty":
        return {slot: scale * view.penalty(slot.node, slot.phase, scenario) for slot in scenario.attack_slots()}
    chain = scale * sum(2.0 * view.max_penalty(p, scenario) for p in view.phases)
    return {slot: chain for slot in scenario.attack_slots()}


def bilinear_rows(defended: bool, big_m: float) -> List[Tuple[Dict[str, float], Sense, float]]:
    """
    Rows linearizing delta_bar = (1 - (1 - d) a) * delta for a fixed d.

    Coefficients are keyed by "delta", "delta_bar" and "attack".
    """
    k = 0.0 if defended else 1.0
    return [
        ({"delta_bar": 1.0}, Sense.GE, 0.0),
        ({"delta_bar": 1.0, "attack": big_m * k}, Sense.LE, big_m),
        ({"delta": 1.0, "delta_bar": -1.0}, Sense.GE, 0.0),
        ({"delta": 1.0, "delta_bar": -1.0, "attack": -big_m * k}, Sense.LE, 0.0),
    ]


# =============================
#         Subproblem
# =============================


@dataclass
class SubproblemModel:
    dual: DualizedModel
    operator: OperatorModel
    scenario: ScenarioConfig
    defense: DefensePlan
    attack_vars: Dict[SupplySlot, int] = field(default_factory=dict)
    delta: Dict[SupplySlot, int] = field(default_factory=dict)
    delta_bar: Dict[SupplySlot, int] = field(default_factory=dict)
    big_m: Dict[SupplySlot, float] = field(default_factory=dict)
    fixed_attack: Optional[AttackPlan] = None

    @property
    def model(self) -> AbstractModel:
        return self.dual.model


def linearize_bilinear(sp: SubproblemModel, big_m: Mapping[SupplySlot, float]) -> SubproblemModel:
    model = sp.model
    for slot, db in sp.delta_bar.items():
        m_value = big_m[slot]
        if not math.isfinite(m_value) or m_value < 0:
            raise ModelBuildError(f"invalid big-M {m_value} for {slot}")
        sp.big_m[slot] = m_value
        index = {"delta": sp.delta[slot], "delta_bar": db, "attack": sp.attack_vars[slot]}
        for n, (coeffs, sense, rhs) in enumerate(bilinear_rows(sp.defense.is_defended(slot), m_value)):
            if n == 0:
                continue  # delta_bar >= 0 is its variable bound
            model.add_constr(
                {index[k]: a for k, a in coeffs.items()},
                sense,
                rhs,
                f"bigm{n}[{slot.mode},{slot.phase},{slot.node}]",
                block="bigm",
                key=(slot.mode, slot.phase, slot.node, n),
            )
    return sp


def build_dual_sp(
    instance: Union[NetworkInstance, NetworkView],
    scenario: ScenarioConfig,
    defense: DefensePlan,
    fixed_attack: Optional[AttackPlan] = None,
    big_m: Optional[Mapping[SupplySlot, float]] = None,
) -> SubproblemModel:
    """Dual of the operator LP under `defense` with attack binaries and budget rows."""
    view = instance if isinstance(instance, NetworkView) else NetworkView(instance)
    op = build_operator_lp(view.instance, scenario, defense, AttackPlan(), view=view)
    dz = dualize(op.model, name=f"sp_{view.instance.name}")
    model = dz.model
    sp = SubproblemModel(dual=dz, operator=op, scenario=scenario, defense=defense, fixed_attack=fixed_attack)

    for slot in scenario.attack_slots():
        key = (slot.mode, slot.phase, slot.node)
        a = model.add_var(f"a[{slot.mode},{slot.phase},{slot.node}]", kind=VarKind.BINARY, key=key, family="attack")
        sp.attack_vars[slot] = a
        row = op.interdiction_rows.get(slot)
        if row is None:
            continue
        delta = dz.row_dual[row]
        coef = model.objective.pop(delta, 0.0)
        db = model.add_var(f"delta_bar[{slot.mode},{slot.phase},{slot.node}]", key=key, family="delta_bar")
        model.add_objective_term(db, coef)
        sp.delta[slot] = delta
        sp.delta_bar[slot] = db

    for cell in scenario.cells:
        coeffs = {sp.attack_vars[s]: 1.0 for s in cell.attack_slots()}
        model.add_constr(coeffs, Sense.LE, cell.n_attack, f"budget[{cell.mode},{cell.phase}]", block="attack_budget")

    if fixed_attack is not None:
        if not fixed_attack.within_budgets(scenario):
            raise ModelBuildError("fixed attack exceeds the scenario budgets")
        for slot, a in sp.attack_vars.items():
            model.fix(a, 1.0 if fixed_attack.is_attacked(slot) else 0.0)

    if big_m is None:
        big_m = resolve_big_m(view, scenario)
    return linearize_bilinear(sp, big_m)


def solve_subproblem(
    sp: SubproblemModel,
    backend: Optional[SolverBackend] = None,
    limits: Optional[SolveLimits] = None,
) -> Tuple[AttackPlan, float, DualSolution]:
    """Worst attack, its SP value and the dual vectors."""
    backend = backend or get_solver()
    outcome = backend.solve(sp.model, limits)
    if outcome.status not in (SolveStatus.OPTIMAL, SolveStatus.FEASIBLE) or outcome.values is None:
        raise SolverError(f"subproblem {sp.model.name!r} failed", status=outcome.status.value)
    if outcome.status != SolveStatus.OPTIMAL:
        logger.warning("Subproblem stopped at a limit; using its incumbent attack")
    values = outcome.values
    attack = AttackPlan(targets=tuple(s for s, a in sp.attack_vars.items() if values[a] > 0.5))
    duals: Dict[str, Dict[tuple, float]] = defaultdict(dict)
    for v in sp.model.variables:
        if v.family in DUAL_DOMAINS:
            duals[v.family][v.key] = values[v.index]
    return attack, float(outcome.objective), DualSolution(values=dict(duals))


# =============================
#      Audited evaluation
# =============================


@dataclass
class AttackEvaluation:
    attack: AttackPlan
    sp_value: float
    primal_value: float
    solution: OperatorSolution
    duals: DualSolution
    big_m: Dict[SupplySlot, float]
    escalations: int = 0
    binding: List[SupplySlot] = field(default_factory=list)

    @property
    def duality_gap(self) -> float:
        return self.primal_value - self.sp_value


def binding_slots(sp: SubproblemModel, duals: DualSolution, attack: AttackPlan) -> List[SupplySlot]:
    """Slots whose delta sits at its big-M cap while still priced in the objective."""
    out = []
    for slot in sp.delta:
        if attack.is_attacked(slot) and not sp.defense.is_defended(slot):
            continue  # delta_bar is forced to 0 there
        delta = duals.get("delta", (slot.mode, slot.phase, slot.node))
        if delta >= BINDING_SHARE * sp.big_m[slot] and sp.big_m[slot] > 0:
            out.append(slot)
    return out


def evaluate_defense(
    instance: Union[NetworkInstance, NetworkView],
    scenario: ScenarioConfig,
    defense: DefensePlan,
    backend: Optional[SolverBackend] = None,
    limits: Optional[SolveLimits] = None,
    max_escalations: Optional[int] = None,
) -> AttackEvaluation:
    """
    Solve SP(w), re-solve the primal under the returned attack, and audit.

    Targets the defense already covers are dropped from the returned attack;
    they change neither the operator LP nor the subproblem value.

    A binding big-M or a strong-duality mismatch multiplies every M by 10 and
    repeats, at most `max_escalations` times.
    """
    view = instance if isinstance(instance, NetworkView) else NetworkView(instance)
    settings = get_settings()
    backend = backend or get_solver()
    if max_escalations is None:
        max_escalations = settings.big_m_max_escalations
    tol = settings.ccg_gap if scenario.gap is None else scenario.gap

    big_m = resolve_big_m(view, scenario)
    escalations = 0
    while True:
        sp = build_dual_sp(view, scenario, defense, big_m=big_m)
        attack, value, duals = solve_subproblem(sp, backend, limits)
        # hits on defended slots are nullified; report the effective attack
        attack = attack.without(defense.defended)
        solution = evaluate_plans(view, scenario, defense, attack, backend, limits)
        primal = solution.objective
        binding = binding_slots(sp, duals, attack)
        mismatch = abs(primal - value) > tol * max(1.0, abs(primal))
        if not binding and not mismatch:
            break
        if escalations >= max_escalations:
            logger.warning(
                f"Big-M audit still failing after {escalations} escalations "
                f"(binding={len(binding)}, primal={primal:.6g}, sp={value:.6g})"
            )
            break
        escalations += 1
        big_m = {s: 10.0 * max(v, 1.0) for s, v in big_m.items()}
        logger.info(f"Escalating big-M (round {escalations}): binding={len(binding)}, mismatch={mismatch}")

    return AttackEvaluation(
        attack=attack,
        sp_value=value,
        primal_value=primal,
        solution=solution,
        duals=duals,
        big_m=dict(sp.big_m),
        escalations=escalations,
        binding=binding,
    )
