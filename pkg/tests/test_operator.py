import pytest

from src.exceptions import ModelBuildError
from src.models import (
    AttackPlan,
    DefensePlan,
    NodeRecord,
    NodeRole,
    ScenarioCell,
    ScenarioConfig,
    SupplySlot,
)
from src.optimization.operator import build_operator_lp, evaluate_plans, operator_objective
from tests.conftest import PENALTY, build_chain

DEPOT = SupplySlot(mode="road", phase=1, node="d")


def plans(defend, attack):
    return (
        DefensePlan(defended=(DEPOT,) if defend else ()),
        AttackPlan(targets=(DEPOT,) if attack else ()),
    )


@pytest.mark.unit
def test_rows_are_tagged_by_dual_symbol(chain_instance, chain_scenario):
    op = build_operator_lp(chain_instance, chain_scenario, DefensePlan(), AttackPlan())
    blocks = {c.block for c in op.model.constraints}
    assert {"phi", "kappa", "beta_c", "mu_c", "sigma_mp", "delta", "beta_mp", "sigma_p", "beta_p"} <= blocks
    assert {"kappa_m", "mu_m", "tau"} <= blocks
    assert DEPOT in op.interdiction_rows
    # one epigraph row per piece per arc
    assert sum(1 for _ in op.model.rows_of("tau")) == 2 * chain_instance.n_pieces


@pytest.mark.unit
def test_operator_variables_are_nonnegative(chain_instance, chain_scenario):
    op = build_operator_lp(chain_instance, chain_scenario, DefensePlan(), AttackPlan())
    assert all(v.lb == 0.0 for v in op.model.variables)
    assert not op.model.is_mip


@pytest.mark.unit
def test_plans_outside_scenario_rejected(chain_instance, chain_scenario):
    stray = SupplySlot(mode="road", phase=1, node="s")
    with pytest.raises(ModelBuildError):
        build_operator_lp(chain_instance, chain_scenario, DefensePlan(), AttackPlan(targets=(stray,)))
    with pytest.raises(ModelBuildError):
        build_operator_lp(chain_instance, chain_scenario.with_budgets(0, 0, 0), DefensePlan(), plans(False, True)[1])


@pytest.mark.integration
@pytest.mark.parametrize(
    "defend,attack,cut",
    [(False, False, False), (False, True, True), (True, False, False), (True, True, False)],
)
def test_interdiction_truth_table(cbc, chain_instance, chain_scenario, defend, attack, cut):
    """Depot output is zero exactly when the depot is attacked and undefended."""
    defense, attack_plan = plans(defend, attack)
    solution = evaluate_plans(chain_instance, chain_scenario, defense, attack_plan, cbc)
    supplied = solution.mode_supply[("road", 1, "d")]
    if cut:
        assert supplied == pytest.approx(0.0, abs=1e-7)
        assert solution.objective == pytest.approx(2 * 10 * PENALTY, rel=1e-9)
    else:
        assert supplied == pytest.approx(10.0)
        assert solution.objective < 1.0


@pytest.mark.integration
def test_unattacked_cost_is_congestion_only(cbc, chain_instance, chain_scenario):
    solution = evaluate_plans(chain_instance, chain_scenario, DefensePlan(), AttackPlan(), cbc)
    # 10 bbl/h at 0.01 v/bbl on two arcs, congestion at the first chord slope
    assert sum(solution.slack.values()) == pytest.approx(0.0, abs=1e-7)
    assert all(v == pytest.approx(0.1) for v in solution.arc_flows.values())
    assert solution.objective > 0.0
    assert operator_objective(solution, chain_instance, chain_scenario) == pytest.approx(solution.objective, rel=1e-6)


@pytest.mark.integration
def test_zero_time_cost_gives_zero_objective(cbc, chain_scenario):
    solution = evaluate_plans(build_chain(time_cost=0.0), chain_scenario, DefensePlan(), AttackPlan(), cbc)
    assert solution.objective == pytest.approx(0.0, abs=1e-7)


@pytest.mark.integration
def test_penalty_override_changes_the_price(cbc, chain_instance, chain_scenario):
    scenario = chain_scenario.model_copy(update={"penalty_overrides": {"s": {1: 50.0}}})
    solution = evaluate_plans(chain_instance, scenario, *plans(False, True), backend=cbc)
    assert solution.objective == pytest.approx(10 * PENALTY + 10 * 50.0, rel=1e-9)


def reserve_chain():
    instance = build_chain(time_cost=0.0)
    reserve = NodeRecord(id="r", role=NodeRole.DEPOT, supply={1: 10.0}, penalty={1: PENALTY})
    arcs = list(instance.arcs) + [instance.arcs[0].model_copy(update={"tail": "r"})]
    return instance.model_copy(update={"nodes": list(instance.nodes) + [reserve], "arcs": arcs})


@pytest.mark.integration
@pytest.mark.parametrize("opened", [False, True])
def test_reserve_supplies_only_when_opened(cbc, opened):
    instance = reserve_chain()
    reserve = SupplySlot(mode="road", phase=1, node="r")
    scenario = ScenarioConfig(
        cells=[ScenarioCell(mode="road", phase=1, attackable=["d"], reserve=["r"], n_attack=1, n_open=1)]
    )
    defense = DefensePlan(opened=(reserve,) if opened else ())
    solution = evaluate_plans(instance, scenario, defense, AttackPlan(targets=(DEPOT,)), cbc)
    if opened:
        # the reserve covers the station while the depot is cut
        assert solution.mode_supply[("road", 1, "r")] == pytest.approx(10.0)
        assert solution.objective == pytest.approx(10 * PENALTY)
    else:
        assert solution.mode_supply[("road", 1, "r")] == pytest.approx(0.0, abs=1e-7)
        assert solution.slack[("road", 1, "r")] == pytest.approx(0.0, abs=1e-7)
        assert solution.objective == pytest.approx(20 * PENALTY)


def pumped_chain(pumps, rate):
    instance = build_chain(time_cost=0.0)
    nodes = [
        n.model_copy(update={"pumps": {1: pumps}, "pump_rate": {1: rate}}) if n.id == "d" else n
        for n in instance.nodes
    ]
    return instance.model_copy(update={"nodes": nodes})


@pytest.mark.unit
@pytest.mark.parametrize("pump_cap,rows", [(False, 0), (True, 1)])
def test_pump_rows_follow_the_toggle(chain_scenario, pump_cap, rows):
    scenario = chain_scenario.model_copy(update={"pump_cap": pump_cap})
    op = build_operator_lp(pumped_chain(1, 4.0), scenario, DefensePlan(), AttackPlan())
    assert sum(1 for _ in op.model.rows_of("pump")) == rows


@pytest.mark.integration
@pytest.mark.parametrize("pump_cap", [False, True])
def test_pump_cap_limits_depot_output(cbc, chain_scenario, pump_cap):
    """One pump at 4 bbl/h cannot ship the depot's 10 bbl/h."""
    scenario = chain_scenario.model_copy(update={"pump_cap": pump_cap})
    solution = evaluate_plans(pumped_chain(1, 4.0), scenario, DefensePlan(), AttackPlan(), cbc)
    if pump_cap:
        assert solution.phase_supply[(1, "d")] == pytest.approx(4.0)
        # 6 bbl/h stranded at the depot and missing at the station
        assert solution.objective == pytest.approx(2 * 6 * PENALTY, rel=1e-9)
    else:
        assert solution.phase_supply[(1, "d")] == pytest.approx(10.0)
        assert solution.objective == pytest.approx(0.0, abs=1e-7)


@pytest.mark.integration
def test_slack_pump_cap_changes_nothing(cbc, chain_scenario):
    scenario = chain_scenario.model_copy(update={"pump_cap": True})
    solution = evaluate_plans(pumped_chain(3, 4.0), scenario, DefensePlan(), AttackPlan(), cbc)
    assert solution.phase_supply[(1, "d")] == pytest.approx(10.0)
    assert solution.objective == pytest.approx(0.0, abs=1e-7)


# =============================
#        Three phases
# =============================


def phase_one_stations(instance):
    return [n.id for n in instance.nodes if n.supply.get(1, 0.0) < 0]


@pytest.mark.unit
def test_three_phase_model_links_phases(three_phase):
    instance, scenario = three_phase
    op = build_operator_lp(instance, scenario, DefensePlan(), AttackPlan())
    blocks = {c.block for c in op.model.constraints}
    assert {"upsilon", "theta", "omega"} <= blocks
    # one monotonicity row per station and phase step
    assert sum(1 for _ in op.model.rows_of("upsilon")) == 2 * len(phase_one_stations(instance))
    # customer carriers only from phase 2 on
    assert {key[2] for key in op.flow if key[1] == 1} == {"road"}
    assert all("|" in key[2] for key in op.flow if key[1] >= 2)


@pytest.mark.integration
def test_three_phase_volumes_shrink_downstream(cbc, three_phase):
    instance, scenario = three_phase
    depot = next(n.id for n in instance.nodes if n.role == NodeRole.DEPOT)
    cut = AttackPlan(targets=(SupplySlot(mode="road", phase=1, node=depot),))
    for attack in (AttackPlan(), cut):
        solution = evaluate_plans(instance, scenario, DefensePlan(), attack, cbc)
        for station in phase_one_stations(instance):
            delivered = solution.phase_supply[(1, station)]
            resold = solution.phase_supply.get((2, station), 0.0)
            assert resold <= delivered + 1e-7
        # every customer returns to the station it bought from
        for (m, p, c, node), back in solution.carrier_supply.items():
            if p != 3 or "|" not in c:
                continue
            sink, source = c.split("|")
            if node != sink:
                continue
            out = solution.carrier_supply.get((m, 2, f"{source}|{sink}", source), 0.0)
            assert back == pytest.approx(out, abs=1e-6)
    # a cut depot leaves nothing to resell
    for station in phase_one_stations(instance):
        assert solution.phase_supply.get((2, station), 0.0) == pytest.approx(0.0, abs=1e-7)
