import itertools

import pytest

from src.exceptions import ModelBuildError
from src.models import AttackPlan, BigMPolicy, DefensePlan, SupplySlot
from src.network.topology import NetworkView
from src.optimization.dual import (
    bilinear_rows,
    build_dual_sp,
    dualize,
    evaluate_defense,
    resolve_big_m,
    solve_subproblem,
)
from src.optimization.operator import build_operator_lp, evaluate_plans
from src.optimization.oracle import enumerate_attacks, enumerate_defenses
from src.solvers import AbstractModel, ObjectiveSense, Sense
from tests.conftest import PENALTY, random_grid_case, three_phase_case

D1 = SupplySlot(mode="road", phase=1, node="d1")
D2 = SupplySlot(mode="road", phase=1, node="d2")


def satisfies(rows, delta, delta_bar, attack):
    point = {"delta": delta, "delta_bar": delta_bar, "attack": attack}
    for coeffs, sense, rhs in rows:
        lhs = sum(a * point[k] for k, a in coeffs.items())
        if sense == Sense.LE and lhs > rhs + 1e-9:
            return False
        if sense == Sense.GE and lhs < rhs - 1e-9:
            return False
    return True


@pytest.mark.unit
@pytest.mark.parametrize("defended,attack", list(itertools.product([False, True], [0, 1])))
def test_bilinear_rows_truth_table(defended, attack):
    """delta_bar equals delta unless the slot is attacked and undefended, where it is 0."""
    rows = bilinear_rows(defended, big_m=100.0)
    delta = 7.0
    expected = 0.0 if (attack and not defended) else delta
    assert satisfies(rows, delta, expected, attack)
    for wrong in (expected + 1.0, expected - 1.0):
        assert not satisfies(rows, delta, wrong, attack)


@pytest.mark.unit
def test_dualize_negates_le_rows():
    primal = AbstractModel(name="p")
    x = primal.add_var("x")
    primal.add_constr({x: 1.0}, Sense.GE, 2.0, "low", block="beta_p")
    primal.add_constr({x: 1.0}, Sense.LE, 5.0, "high", block="mu_m")
    primal.set_objective({x: 3.0})
    dz = dualize(primal)
    dual = dz.model
    assert dual.sense == ObjectiveSense.MAXIMIZE
    low, high = dz.row_dual[0], dz.row_dual[1]
    assert dual.objective == {low: 2.0, high: -5.0}
    (column,) = list(dual.rows_of("column"))
    assert column.coeffs == {low: 1.0, high: -1.0}
    assert column.sense == Sense.LE and column.rhs == 3.0


@pytest.mark.unit
def test_dualize_rejects_bounded_columns():
    primal = AbstractModel(name="p")
    primal.add_var("x", ub=4.0)
    with pytest.raises(ModelBuildError):
        dualize(primal)


@pytest.mark.unit
def test_big_m_policies(two_depot_instance, two_depot_scenario):
    view = NetworkView(two_depot_instance)
    chain = resolve_big_m(view, two_depot_scenario)
    assert chain == {D1: pytest.approx(1.05 * 2 * PENALTY), D2: pytest.approx(1.05 * 2 * PENALTY)}
    penalty = resolve_big_m(view, two_depot_scenario, BigMPolicy(kind="penalty", margin=0.0))
    assert penalty[D1] == pytest.approx(PENALTY)
    fixed = resolve_big_m(view, two_depot_scenario, BigMPolicy(kind="fixed", value=42.0))
    assert set(fixed.values()) == {42.0}
    with pytest.raises(ModelBuildError):
        resolve_big_m(view, two_depot_scenario, BigMPolicy(kind="fixed"))


@pytest.mark.unit
def test_subproblem_structure(two_depot_instance, two_depot_scenario):
    sp = build_dual_sp(two_depot_instance, two_depot_scenario, DefensePlan(defended=(D1,)))
    assert set(sp.attack_vars) == {D1, D2}
    assert set(sp.delta_bar) == {D1, D2}
    assert sp.model.is_mip
    # three rows per slot; delta_bar >= 0 is its bound
    assert sum(1 for _ in sp.model.rows_of("bigm")) == 3 * 2
    assert sum(1 for _ in sp.model.rows_of("attack_budget")) == 1


@pytest.mark.unit
def test_fixed_attack_over_budget_rejected(two_depot_instance, two_depot_scenario):
    with pytest.raises(ModelBuildError):
        build_dual_sp(two_depot_instance, two_depot_scenario, DefensePlan(), fixed_attack=AttackPlan(targets=(D1, D2)))


@pytest.mark.integration
def test_strong_duality_on_every_plan_pair(cbc, two_depot_instance, two_depot_scenario):
    """With the attack fixed, SP(w) equals the operator optimum for every (defense, attack)."""
    for defense in enumerate_defenses(two_depot_scenario):
        for attack in enumerate_attacks(two_depot_scenario):
            primal = evaluate_plans(two_depot_instance, two_depot_scenario, defense, attack, cbc).objective
            sp = build_dual_sp(two_depot_instance, two_depot_scenario, defense, fixed_attack=attack)
            _, value, duals = solve_subproblem(sp, cbc)
            assert value == pytest.approx(primal, rel=1e-6, abs=1e-6), (defense, attack)
            assert duals.sign_violations(tol=1e-6) == []


@pytest.mark.integration
def test_operator_lp_dual_matches_primal(cbc, chain_instance, chain_scenario):
    op = build_operator_lp(chain_instance, chain_scenario, DefensePlan(), AttackPlan())
    primal = cbc.solve(op.model).objective
    dual = cbc.solve(dualize(op.model).model).objective
    assert dual == pytest.approx(primal, rel=1e-6, abs=1e-7)


@pytest.mark.integration
def test_subproblem_finds_worst_attack(cbc, two_depot_instance, two_depot_scenario):
    evaluation = evaluate_defense(two_depot_instance, two_depot_scenario, DefensePlan(defended=(D1,)), cbc)
    assert evaluation.attack == AttackPlan(targets=(D2,))
    assert evaluation.primal_value == pytest.approx(10 * PENALTY, rel=1e-6)
    assert evaluation.duality_gap == pytest.approx(0.0, abs=1e-3)
    assert evaluation.escalations == 0


@pytest.mark.integration
def test_small_big_m_is_escalated(cbc, two_depot_instance, two_depot_scenario):
    """A fixed M below the true dual prices binds; the audit raises it until SP and primal agree."""
    scenario = two_depot_scenario.model_copy(update={"big_m": BigMPolicy(kind="fixed", value=10.0)})
    evaluation = evaluate_defense(two_depot_instance, scenario, DefensePlan(), cbc)
    assert evaluation.escalations >= 1
    assert all(m > 10.0 for m in evaluation.big_m.values())
    assert evaluation.primal_value == pytest.approx(30 * PENALTY, rel=1e-6)
    assert evaluation.sp_value == pytest.approx(evaluation.primal_value, rel=1e-6)


@pytest.mark.slow
@pytest.mark.integration
def test_strong_duality_on_random_grids(cbc):
    checked = 0
    for seed in range(6):
        instance, scenario = random_grid_case(seed)
        for defense in enumerate_defenses(scenario):
            for attack in enumerate_attacks(scenario):
                primal = evaluate_plans(instance, scenario, defense, attack, cbc).objective
                sp = build_dual_sp(instance, scenario, defense, fixed_attack=attack)
                _, value, _ = solve_subproblem(sp, cbc)
                assert value == pytest.approx(primal, rel=1e-6, abs=1e-6), (seed, defense, attack)
                checked += 1
    assert checked >= 50


@pytest.mark.integration
def test_fully_defended_attack_is_empty(cbc, two_depot_instance, two_depot_scenario):
    """Hits on defended depots change nothing, so the reported attack drops them."""
    scenario = two_depot_scenario.with_budgets(2, 0, 1)
    evaluation = evaluate_defense(two_depot_instance, scenario, DefensePlan(defended=(D1, D2)), cbc)
    assert evaluation.attack == AttackPlan()
    assert evaluation.primal_value == pytest.approx(0.0, abs=1e-6)


@pytest.mark.integration
@pytest.mark.parametrize("seed", [0, pytest.param(1, marks=pytest.mark.slow), pytest.param(2, marks=pytest.mark.slow)])
def test_strong_duality_across_three_phases(cbc, seed):
    instance, scenario = three_phase_case(seed)
    stations = [n.id for n in instance.nodes if n.supply.get(1, 0.0) < 0]
    for defense in enumerate_defenses(scenario):
        for attack in enumerate_attacks(scenario):
            solution = evaluate_plans(instance, scenario, defense, attack, cbc)
            sp = build_dual_sp(instance, scenario, defense, fixed_attack=attack)
            _, value, duals = solve_subproblem(sp, cbc)
            assert value == pytest.approx(solution.objective, rel=1e-6, abs=1e-6), (defense, attack)
            assert duals.sign_violations(tol=1e-6) == []
            for station in stations:
                assert solution.phase_supply.get((2, station), 0.0) <= solution.phase_supply[(1, station)] + 1e-7
