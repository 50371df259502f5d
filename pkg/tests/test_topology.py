import pytest

from src.models import (
    AttackPlan,
    CarrierClass,
    CarrierKind,
    DefensePlan,
    Mode,
    NetworkInstance,
    NodeRecord,
    NodeRole,
    ScenarioCell,
    ScenarioConfig,
)
from src.network.topology import (
    BULK_PHASE_FLOW_COST,
    derive_constants,
    enumerate_carriers,
    is_derived,
    validate_instance,
    validate_scenario,
)
from src.optimization.bpr import build_pieces
from src.optimization.operator import evaluate_plans
from tests.conftest import PENALTY, build_chain, build_two_depot, bulk_class, make_arc, three_phase_case


def od_class(phase=1, mode="road"):
    return CarrierClass(mode=mode, phase=phase, kind=CarrierKind.OD, vehicle_length=0.006, demand_per_vehicle=0.3)


def od_instance(sources, sinks, arcs):
    """One OD phase: `sources` supply 5 bbl/h, `sinks` demand 1 bbl/h."""
    nodes = [NodeRecord(id=t, supply={1: 5.0}, penalty={1: PENALTY}) for t in sources]
    nodes += [NodeRecord(id=s, supply={1: -1.0}, penalty={1: PENALTY}) for s in sinks]
    nodes += [NodeRecord(id="j")]
    return NetworkInstance(
        name="od",
        modes=[Mode(id="road")],
        n_phases=1,
        nodes=nodes,
        arcs=[make_arc(t, h) for t, h in arcs],
        carrier_classes=[od_class()],
    )


def replace_node(instance, node_id, **update):
    nodes = [n.model_copy(update=update) if n.id == node_id else n for n in instance.nodes]
    return instance.model_copy(update={"nodes": nodes})


def unit_chain():
    """Chain whose carriers are standard vehicles holding 1 bbl each."""
    carrier = bulk_class().model_copy(update={"vehicle_length": 0.006, "demand_per_vehicle": 1.0})
    return build_chain().model_copy(update={"carrier_classes": [carrier]})


# =============================
#       Derived constants
# =============================


@pytest.mark.unit
def test_capacity_and_breakpoint_width():
    """u = h * v / l* : two lanes at 30 mi/h with 0.006 mi vehicles carry 10000 v/h."""
    chain = build_chain()
    chain = chain.model_copy(update={"arcs": [a.model_copy(update={"lanes": 2}) for a in chain.arcs]})
    derived = derive_constants(chain)
    for arc in derived.arcs:
        assert arc.capacity == pytest.approx(10000.0)
        assert arc.breakpoint_width == pytest.approx(2 * 10000.0 / chain.n_pieces)
        assert build_pieces(arc, chain.n_pieces).width == pytest.approx(arc.breakpoint_width)


@pytest.mark.unit
def test_explicit_capacity_is_kept():
    chain = build_chain()
    arcs = [a.model_copy(update={"capacity": 500.0}) for a in chain.arcs]
    derived = derive_constants(chain.model_copy(update={"arcs": arcs}))
    assert [a.capacity for a in derived.arcs] == [500.0, 500.0]
    assert [a.breakpoint_width for a in derived.arcs] == [250.0, 250.0]


@pytest.mark.unit
def test_derive_constants_is_idempotent():
    chain = build_chain()
    assert not is_derived(chain)
    derived = derive_constants(chain)
    assert is_derived(derived)
    assert derive_constants(derived) == derived


@pytest.mark.unit
def test_conversion_factor():
    # 0.012 mi trucks holding 200 bbl against 0.006 mi standard vehicles
    (truck,) = derive_constants(build_chain()).carrier_classes
    assert truck.conversion == pytest.approx(0.01)
    unit = unit_chain()
    assert derive_constants(unit).carrier_classes[0].conversion == pytest.approx(1.0)


@pytest.mark.integration
def test_unit_conversion_leaves_flows_unchanged(cbc, chain_scenario):
    unit = unit_chain()
    solution = evaluate_plans(unit, chain_scenario, DefensePlan(), AttackPlan(), cbc)
    assert solution.flows
    for key, vehicles in solution.flows.items():
        assert vehicles == pytest.approx(solution.bbl_flows[key], abs=1e-7)
    assert all(v == pytest.approx(10.0) for v in solution.arc_flows.values())


@pytest.mark.unit
def test_default_flow_costs_per_phase():
    """Phase 1 has no per-vehicle trip cost; later phases charge q/2."""
    chain = build_chain().model_copy(update={"n_phases": 3, "modes": [Mode(id="road", max_trip_time=1.5)]})
    first, second = chain.arcs
    chain = chain.model_copy(update={"arcs": [first, second.model_copy(update={"flow_cost": {2: 3.0}})]})
    derived = derive_constants(chain)
    assert derived.arcs[0].flow_cost == {1: BULK_PHASE_FLOW_COST, 2: 0.75, 3: 0.75}
    assert BULK_PHASE_FLOW_COST == 0.0
    # explicit costs win
    assert derived.arcs[1].flow_cost == {1: 0.0, 2: 3.0, 3: 0.75}


@pytest.mark.unit
def test_member_modes_inherit_phase_supply():
    derived = derive_constants(build_chain())
    nodes = {n.id: n for n in derived.nodes}
    assert nodes["d"].mode_supply == {"road": {1: 10.0}}
    assert nodes["s"].mode_supply == {"road": {1: -10.0}}
    assert nodes["j"].mode_supply == {}


# =============================
#           Carriers
# =============================


@pytest.mark.unit
def test_bulk_phase_has_single_mode_carrier():
    assert enumerate_carriers(build_chain(), "road", 1) == ["road"]
    assert enumerate_carriers(build_chain(), "road", 1, prune=True) == ["road"]


@pytest.mark.unit
def test_od_carriers_pair_every_sink_with_every_source():
    instance = od_instance(["t1", "t2"], ["s1", "s2", "s3"], [("t1", "s1"), ("t1", "s2"), ("t1", "s3"), ("t2", "s1")])
    carriers = enumerate_carriers(instance, "road", 1)
    assert carriers == ["s1|t1", "s1|t2", "s2|t1", "s2|t2", "s3|t1", "s3|t2"]


@pytest.mark.unit
def test_pruning_drops_unreachable_pairs():
    # arcs are one-way, so t2 only reaches s1
    instance = od_instance(["t1", "t2"], ["s1", "s2", "s3"], [("t1", "s1"), ("t1", "s2"), ("t1", "s3"), ("t2", "s1")])
    assert enumerate_carriers(instance, "road", 1, prune=True) == ["s1|t1", "s1|t2", "s2|t1", "s3|t1"]


@pytest.mark.unit
def test_no_demand_nodes_means_no_carriers():
    instance = od_instance(["t1", "t2"], [], [("t1", "j"), ("t2", "j")])
    assert enumerate_carriers(instance, "road", 1) == []


# =============================
#          Validation
# =============================


@pytest.mark.unit
def test_chain_is_valid(chain_scenario):
    chain = build_chain()
    assert validate_instance(chain).ok
    assert validate_scenario(chain, chain_scenario).ok


@pytest.mark.unit
def test_empty_node_set_rejected():
    instance = NetworkInstance(modes=[Mode(id="road")], n_phases=1, carrier_classes=[bulk_class()])
    assert validate_instance(instance).rules() == ["nonempty node set"]


@pytest.mark.unit
def test_duplicate_node_ids_rejected():
    chain = build_chain()
    instance = chain.model_copy(update={"nodes": list(chain.nodes) + [NodeRecord(id="j")]})
    report = validate_instance(instance)
    assert report.rules() == ["unique ids"]
    assert report.violations[0].elements == ["j"]


@pytest.mark.unit
def test_mode_supply_sign_must_match_phase_supply():
    instance = replace_node(build_chain(), "d", mode_supply={"road": {1: -10.0}})
    report = validate_instance(instance)
    assert report.rules() == ["sign-consistency"]
    assert report.violations[0].elements == ["d"]


def two_phase_chain(station_next, junction_next=None):
    chain = build_chain().model_copy(update={"n_phases": 2, "carrier_classes": [bulk_class(), od_class(phase=2)]})
    chain = replace_node(chain, "s", supply={1: -10.0, 2: station_next}, penalty={1: PENALTY, 2: PENALTY})
    if junction_next is not None:
        chain = replace_node(chain, "j", supply={2: junction_next}, penalty={2: PENALTY})
    return chain


@pytest.mark.unit
def test_phase_chain_accepts_mirrored_supply():
    # the station re-offers what it received; the junction takes it
    assert validate_instance(two_phase_chain(10.0, junction_next=-10.0)).ok


@pytest.mark.unit
@pytest.mark.parametrize(
    "station_next,junction_next,culprit",
    [(4.0, -4.0, "s"), (10.0, 5.0, "j")],
)
def test_phase_chain_violations(station_next, junction_next, culprit):
    report = validate_instance(two_phase_chain(station_next, junction_next))
    assert report.rules() == ["phase-chain"]
    assert [v.elements for v in report.violations] == [[culprit]]


@pytest.mark.unit
def test_attackable_and_reserve_sets_must_be_disjoint():
    scenario = ScenarioConfig(
        cells=[ScenarioCell(mode="road", phase=1, attackable=["d1", "d2"], reserve=["d2"], n_attack=1)]
    )
    report = validate_scenario(build_two_depot(), scenario)
    assert report.rules() == ["attack-reserve overlap"]
    assert report.violations[0].elements == ["d2"]


@pytest.mark.unit
def test_scenario_nodes_must_supply_their_cell():
    scenario = ScenarioConfig(cells=[ScenarioCell(mode="road", phase=1, attackable=["s1"], n_attack=1)])
    assert validate_scenario(build_two_depot(), scenario).rules() == ["scenario node"]


@pytest.mark.unit
def test_generated_roles_pass_validation():
    instance, scenario = three_phase_case(0)
    assert validate_instance(instance).ok
    assert validate_scenario(instance, scenario).ok
    assert {n.role for n in instance.nodes} >= {NodeRole.DEPOT, NodeRole.STATION, NodeRole.ZONE}
