"""
Operator (inner) linear program.

Rows are tagged with the symbol of their dual so the attacker subproblem can be
generated mechanically. All operator variables are nonnegative and unbounded
above; every upper limit is an explicit row.
"""

from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple, Union

from ..di import get_solver
from ..exceptions import ModelBuildError, SolverError
from ..logging_config import get_logger
from ..models import (
    AttackPlan,
    CarrierKind,
    DefensePlan,
    NetworkInstance,
    OperatorSolution,
    ScenarioConfig,
    SupplySlot,
)
from ..network.topology import NetworkView, round_trip_partner, split_carrier
from ..solvers import AbstractModel, Sense, SolveLimits, SolverBackend, SolveStatus
from .bpr import build_pieces

logger = get_logger(__name__, component="operator")


@dataclass
class DefenseVars:
    """Master-problem binaries standing in for a fixed DefensePlan."""

    defend: Dict[SupplySlot, int] = field(default_factory=dict)
    open: Dict[SupplySlot, int] = field(default_factory=dict)


Defense = Union[DefensePlan, DefenseVars]


def _decision(defense: Defense, slot: SupplySlot, kind: str) -> Tuple[float, Optional[int]]:
    """(constant, variable index) of d or o for a slot."""
    if isinstance(defense, DefenseVars):
        var = (defense.defend if kind == "defend" else defense.open).get(slot)
        return 0.0, var
    chosen = defense.is_defended(slot) if kind == "defend" else defense.is_open(slot)
    return (1.0 if chosen else 0.0), None


@dataclass
class OperatorModel:
    model: AbstractModel
    view: NetworkView
    scenario: ScenarioConfig
    attack: AttackPlan
    prefix: str = ""
    bbl_flow: Dict[Tuple, int] = field(default_factory=dict)
    flow: Dict[Tuple, int] = field(default_factory=dict)
    carrier_supply: Dict[Tuple, int] = field(default_factory=dict)
    mode_supply: Dict[Tuple, int] = field(default_factory=dict)
    phase_supply: Dict[Tuple, int] = field(default_factory=dict)
    slack: Dict[Tuple, int] = field(default_factory=dict)
    arc_flow: Dict[Tuple, int] = field(default_factory=dict)
    congestion: Dict[Tuple, int] = field(default_factory=dict)
    objective: Dict[int, float] = field(default_factory=dict)
    interdiction_rows: Dict[SupplySlot, int] = field(default_factory=dict)

    def var(self, name: str, key, family: str) -> int:
        return self.model.add_var(f"{self.prefix}{name}", key=key, family=family)

    def row(self, coeffs, sense: Sense, rhs: float, name: str, block: str, key) -> Optional[int]:
        return self.model.add_constr(coeffs, sense, rhs, f"{self.prefix}{name}", block=block, key=key)

    def read_solution(self, values, status: str = "optimal", wall_time: float = 0.0) -> OperatorSolution:
        def pick(index: Dict) -> Dict:
            return {k: max(0.0, values[j]) for k, j in index.items()}

        return OperatorSolution(
            status=status,
            objective=sum(c * values[j] for j, c in self.objective.items()),
            flows=pick(self.flow),
            bbl_flows=pick(self.bbl_flow),
            arc_flows=pick(self.arc_flow),
            carrier_supply=pick(self.carrier_supply),
            mode_supply=pick(self.mode_supply),
            phase_supply=pick(self.phase_supply),
            slack=pick(self.slack),
            congestion=pick(self.congestion),
            wall_time=wall_time,
        )


def _check_plans(scenario: ScenarioConfig, defense: DefensePlan, attack: AttackPlan) -> None:
    if not defense.within_budgets(scenario):
        raise ModelBuildError("defense plan exceeds the scenario budgets")
    if not attack.within_budgets(scenario):
        raise ModelBuildError("attack plan exceeds the scenario budgets")
    attackable = set(scenario.attack_slots())
    reserves = set(scenario.reserve_slots())
    stray = [s for s in attack.targets if s not in attackable] + [s for s in defense.defended if s not in attackable]
    stray += [s for s in defense.opened if s not in reserves]
    if stray:
        raise ModelBuildError(f"plan refers to slots outside the scenario sets: {', '.join(map(str, stray))}")


def add_operator_block(
    model: AbstractModel,
    view: NetworkView,
    scenario: ScenarioConfig,
    attack: AttackPlan,
    defense: Defense,
    prefix: str = "",
) -> OperatorModel:
    """Append one copy of the operator variables and rows to `model`."""
    op = OperatorModel(model=model, view=view, scenario=scenario, attack=attack, prefix=prefix)
    instance = view.instance
    attacked = set(attack.targets)
    n_phases = instance.n_phases

    # carrier level: flows, coupling, capacities, conservation
    for m in view.modes:
        arcs = view.mode_arcs[m]
        for p in view.phases:
            gamma = view.gamma(m, p)
            for c in view.carriers(m, p, prune=scenario.prune_carriers):
                tag = f"{m},{p},{c}"
                for arc in arcs:
                    key = (m, p, c, arc.tail, arc.head)
                    fh = op.var(f"fhat[{tag},{arc.tail},{arc.head}]", key, "fhat")
                    f = op.var(f"f[{tag},{arc.tail},{arc.head}]", key, "f")
                    op.bbl_flow[key] = fh
                    op.flow[key] = f
                    op.row({f: 1.0, fh: -gamma}, Sense.EQ, 0.0, f"couple[{tag},{arc.tail},{arc.head}]", "kappa", key)
                    op.row({f: 1.0}, Sense.LE, 2.0 * arc.capacity, f"cap[{tag},{arc.tail},{arc.head}]", "mu_c", key)
                    cost = arc.flow_cost.get(p, 0.0)
                    if cost:
                        op.objective[f] = cost

                signs = {}
                for i in view.mode_nodes[m]:
                    b = view.b_cmp(i, m, p, c)
                    if b == 0:
                        continue
                    x = op.var(f"xc[{tag},{i}]", (m, p, c, i), "x_c")
                    op.carrier_supply[(m, p, c, i)] = x
                    signs[i] = 1.0 if b > 0 else -1.0
                    op.row({x: 1.0}, Sense.LE, abs(b), f"xcap[{tag},{i}]", "beta_c", (m, p, c, i))

                for i in view.mode_nodes[m]:
                    coeffs: Dict[int, float] = {}
                    for arc in view.out_arcs.get((m, i), ()):
                        coeffs[op.bbl_flow[(m, p, c, i, arc.head)]] = 1.0
                    for arc in view.in_arcs.get((m, i), ()):
                        coeffs[op.bbl_flow[(m, p, c, arc.tail, i)]] = -1.0
                    if i in signs:
                        coeffs[op.carrier_supply[(m, p, c, i)]] = -signs[i]
                    op.row(coeffs, Sense.EQ, 0.0, f"flow[{tag},{i}]", "phi", (m, p, c, i))

    # mode level: carrier aggregation, interdiction, reserve/standard balance
    for m in view.modes:
        for p in view.phases:
            carriers = view.carriers(m, p, prune=scenario.prune_carriers)
            cell = scenario.cell(m, p)
            attackable = set(cell.attackable) if cell else set()
            reserve = set(cell.reserve) if cell else set()
            for i in view.mode_nodes[m]:
                b = view.b_mp(i, m, p)
                if b == 0:
                    continue
                key = (m, p, i)
                slot = SupplySlot(mode=m, phase=p, node=i)
                x = op.var(f"xm[{m},{p},{i}]", key, "x_mp")
                s = op.var(f"s[{m},{p},{i}]", key, "slack")
                op.mode_supply[key] = x
                op.slack[key] = s
                op.objective[s] = view.penalty(i, p, scenario)

                coeffs = {x: 1.0}
                for c in carriers:
                    xc = op.carrier_supply.get((m, p, c, i))
                    if xc is not None:
                        coeffs[xc] = -1.0
                op.row(coeffs, Sense.EQ, 0.0, f"agg[{m},{p},{i}]", "sigma_mp", key)

                cap = abs(b)
                if i in attackable:
                    a = 1.0 if slot in attacked else 0.0
                    const, d_var = _decision(defense, slot, "defend")
                    coeffs = {x: 1.0}
                    rhs = cap * (1.0 - a)
                    if a:
                        if d_var is None:
                            rhs += cap * const
                        else:
                            coeffs[d_var] = -cap
                    op.interdiction_rows[slot] = op.row(coeffs, Sense.LE, rhs, f"interdict[{m},{p},{i}]", "delta", key)

                if i in reserve:
                    const, o_var = _decision(defense, slot, "open")
                    coeffs = {x: 1.0, s: 1.0}
                    if o_var is None:
                        op.row(coeffs, Sense.EQ, cap * const, f"reserve[{m},{p},{i}]", "omega", key)
                    else:
                        coeffs[o_var] = -cap
                        op.row(coeffs, Sense.EQ, 0.0, f"reserve[{m},{p},{i}]", "omega", key)
                else:
                    op.row({x: 1.0, s: 1.0}, Sense.EQ, cap, f"balance[{m},{p},{i}]", "beta_mp", key)

    # phase level: mode aggregation, aggregate cap, optional pump cap
    for p in view.phases:
        for i in view.node_ids:
            b = view.b_p(i, p)
            if b == 0:
                continue
            key = (p, i)
            xp = op.var(f"xp[{p},{i}]", key, "x_p")
            op.phase_supply[key] = xp
            coeffs = {xp: 1.0}
            for m in view.modes:
                xm = op.mode_supply.get((m, p, i))
                if xm is not None:
                    coeffs[xm] = -1.0
            op.row(coeffs, Sense.EQ, 0.0, f"magg[{p},{i}]", "sigma_p", key)
            op.row({xp: 1.0}, Sense.LE, abs(b), f"pcap[{p},{i}]", "beta_p", key)
            if scenario.pump_cap:
                node = view.nodes[i]
                if p in node.pumps and p in node.pump_rate:
                    op.row({xp: 1.0}, Sense.LE, node.pumps[p] * node.pump_rate[p], f"pump[{p},{i}]", "pump", key)

    # delivered supply cannot grow between phases
    for p in view.phases[:-1]:
        for i in view.phase_demand_nodes(p):
            now, nxt = op.phase_supply.get((p, i)), op.phase_supply.get((p + 1, i))
            if now is None or nxt is None:
                continue
            op.row({now: 1.0, nxt: -1.0}, Sense.GE, 0.0, f"mono[{p},{i}]", "upsilon", (p, i))

    # customers return to the station they were routed to
    if n_phases >= 3:
        last, prev = n_phases, n_phases - 1
        for m in view.modes:
            if (
                view.carrier_class(m, last).kind != CarrierKind.OD
                or view.carrier_class(m, prev).kind != CarrierKind.OD
            ):
                continue
            pairs = set(view.carriers(m, last, prune=scenario.prune_carriers))
            pairs.update(round_trip_partner(c) for c in view.carriers(m, prev, prune=scenario.prune_carriers))
            for c in sorted(pairs):
                s, t = split_carrier(c)
                back = op.carrier_supply.get((m, last, c, s))
                out = op.carrier_supply.get((m, prev, round_trip_partner(c), t))
                if back is None and out is None:
                    continue
                coeffs = {}
                if back is not None:
                    coeffs[back] = 1.0
                if out is not None:
                    coeffs[out] = -1.0
                op.row(coeffs, Sense.EQ, 0.0, f"trip[{m},{c}]", "theta", (m, c))

    # arc level: mode aggregation, capacity, congestion epigraph
    for m in view.modes:
        carriers = {p: view.carriers(m, p, prune=scenario.prune_carriers) for p in view.phases}
        for arc in view.mode_arcs[m]:
            key = (m, arc.tail, arc.head)
            fm = op.var(f"fm[{m},{arc.tail},{arc.head}]", key, "f_m")
            g = op.var(f"g[{m},{arc.tail},{arc.head}]", key, "g")
            op.arc_flow[key] = fm
            op.congestion[key] = g
            coeffs = {fm: 1.0}
            for p in view.phases:
                for c in carriers[p]:
                    coeffs[op.flow[(m, p, c, arc.tail, arc.head)]] = -1.0
            op.row(coeffs, Sense.EQ, 0.0, f"arcagg[{m},{arc.tail},{arc.head}]", "kappa_m", key)
            op.row({fm: 1.0}, Sense.LE, 2.0 * arc.capacity, f"arccap[{m},{arc.tail},{arc.head}]", "mu_m", key)
            pieces = build_pieces(arc, instance.n_pieces)
            for r, (alpha, xi) in enumerate(zip(pieces.slopes, pieces.intercepts), start=1):
                op.row({g: 1.0, fm: -alpha}, Sense.GE, xi, f"bpr[{m},{arc.tail},{arc.head},{r}]", "tau", key + (r,))
            if arc.time_cost:
                op.objective[g] = arc.time_cost

    return op


def build_operator_lp(
    instance: NetworkInstance,
    scenario: ScenarioConfig,
    defense: DefensePlan,
    attack: AttackPlan,
    view: Optional[NetworkView] = None,
) -> OperatorModel:
    """Operator LP for fixed defender and attacker decisions."""
    _check_plans(scenario, defense, attack)
    view = view or NetworkView(instance)
    model = AbstractModel(name=f"operator_{view.instance.name}")
    op = add_operator_block(model, view, scenario, attack, defense)
    model.set_objective(op.objective)
    return op


def solve_operator(
    op: OperatorModel,
    backend: Optional[SolverBackend] = None,
    limits: Optional[SolveLimits] = None,
) -> OperatorSolution:
    backend = backend or get_solver()
    outcome = backend.solve(op.model, limits)
    if outcome.status != SolveStatus.OPTIMAL or outcome.values is None:
        raise SolverError(f"operator LP {op.model.name!r} not solved to optimality", status=outcome.status.value)
    solution = op.read_solution(outcome.values, outcome.status.value, outcome.wall_time)
    solution.objective = outcome.objective
    return solution


def operator_objective(
    solution: OperatorSolution,
    instance: Union[NetworkInstance, NetworkView],
    scenario: Optional[ScenarioConfig] = None,
) -> float:
    """Flow cost + penalty + mode-time cost recomputed from the solution vectors."""
    view = instance if isinstance(instance, NetworkView) else NetworkView(instance)
    arcs = {a.key: a for m in view.modes for a in view.mode_arcs[m]}
    flow_cost = sum(arcs[(m, t, h)].flow_cost.get(p, 0.0) * v for (m, p, _, t, h), v in solution.flows.items())
    penalty = sum(view.penalty(i, p, scenario) * v for (_, p, i), v in solution.slack.items())
    time_cost = sum(arcs[k].time_cost * v for k, v in solution.congestion.items())
    return flow_cost + penalty + time_cost


def evaluate_plans(
    instance: Union[NetworkInstance, NetworkView],
    scenario: ScenarioConfig,
    defense: DefensePlan,
    attack: AttackPlan,
    backend: Optional[SolverBackend] = None,
    limits: Optional[SolveLimits] = None,
) -> OperatorSolution:
    """Build and solve the operator LP for one (defense, attack) pair."""
    view = instance if isinstance(instance, NetworkView) else NetworkView(instance)
    return solve_operator(build_operator_lp(view.instance, scenario, defense, attack, view=view), backend, limits)
