import pytest
from pydantic import ValidationError

from src.models import (
    AttackPlan,
    BigMPolicy,
    DefensePlan,
    DualSolution,
    ScenarioCell,
    ScenarioConfig,
    SupplySlot,
)

pytestmark = pytest.mark.unit


def slot(node, phase=1, mode="road"):
    return SupplySlot(mode=mode, phase=phase, node=node)


def test_plans_normalize_slot_order():
    """Plans built from the same slots in any order compare and hash equal."""
    a = AttackPlan(targets=(slot("b"), slot("a"), slot("a")))
    b = AttackPlan(targets=(slot("a"), slot("b")))
    assert a == b
    assert hash(a) == hash(b)
    assert [s.node for s in a.targets] == ["a", "b"]


def test_budgets_are_checked_per_cell(two_depot_scenario):
    assert DefensePlan(defended=(slot("d1"),)).within_budgets(two_depot_scenario)
    assert not DefensePlan(defended=(slot("d1"), slot("d2"))).within_budgets(two_depot_scenario)
    assert not AttackPlan(targets=(slot("d1"), slot("d2"))).within_budgets(two_depot_scenario)


def test_attack_vector_follows_sorted_attackable_slots(two_depot_scenario):
    assert AttackPlan(targets=(slot("d2"),)).vector(two_depot_scenario) == (0, 1)
    assert AttackPlan().vector(two_depot_scenario) == (0, 0)


def test_attack_without_drops_defended_slots():
    attack = AttackPlan(targets=(slot("d1"), slot("d2")))
    assert attack.without([slot("d1")]) == AttackPlan(targets=(slot("d2"),))


def test_with_budgets_applies_to_every_cell():
    scenario = ScenarioConfig(
        cells=[
            ScenarioCell(mode="road", phase=1, attackable=["a"]),
            ScenarioCell(mode="road", phase=2, attackable=["b"]),
        ]
    )
    swept = scenario.with_budgets(2, 1, 3, name="swept")
    assert swept.name == "swept"
    assert all((c.n_defend, c.n_open, c.n_attack) == (2, 1, 3) for c in swept.cells)
    # original is untouched
    assert all(c.n_attack == 0 for c in scenario.cells)


def test_negative_budget_rejected():
    with pytest.raises(ValidationError):
        ScenarioCell(mode="road", phase=1, n_attack=-1)


def test_big_m_policy_defaults_to_chain():
    policy = BigMPolicy()
    assert policy.kind == "chain"
    assert policy.margin == pytest.approx(0.05)


def test_dual_sign_violations_only_flag_nonnegative_symbols():
    duals = DualSolution(values={"delta": {("road", 1, "d"): -1.0}, "phi": {("road", 1, "road", "d"): -5.0}})
    bad = duals.sign_violations()
    assert [b[0] for b in bad] == ["delta"]
    assert duals.get("delta", ("road", 1, "d")) == -1.0
    assert duals.get("delta", ("road", 1, "x")) == 0.0
