import pytest

from src.models import (
    ArcRecord,
    CarrierClass,
    CarrierKind,
    Mode,
    NetworkInstance,
    NodeRecord,
    NodeRole,
    ScenarioCell,
    ScenarioConfig,
)
from src.network import assign_roles, default_scenario, gen_grerec
from src.solvers import MipBackend

PENALTY = 1000.0


def make_arc(tail, head, mode="road", length=1.0, speed=30.0, lanes=1, time_cost=0.0):
    return ArcRecord(tail=tail, head=head, mode=mode, length=length, speed=speed, lanes=lanes, time_cost=time_cost)


def both_ways(pairs, **kwargs):
    return [make_arc(t, h, **kwargs) for a, b in pairs for t, h in ((a, b), (b, a))]


def bulk_class(mode="road", phase=1):
    return CarrierClass(mode=mode, phase=phase, kind=CarrierKind.BULK, vehicle_length=0.012, demand_per_vehicle=200)


def supply_node(node_id, role, b):
    return NodeRecord(id=node_id, role=role, supply={1: b}, penalty={1: PENALTY})


def build_chain(time_cost=1.0):
    """Depot d -> junction j -> station s, 10 bbl/h, one phase."""
    return NetworkInstance(
        name="chain",
        modes=[Mode(id="road")],
        n_phases=1,
        n_pieces=4,
        nodes=[
            supply_node("d", NodeRole.DEPOT, 10.0),
            NodeRecord(id="j"),
            supply_node("s", NodeRole.STATION, -10.0),
        ],
        arcs=[make_arc("d", "j", time_cost=time_cost), make_arc("j", "s", time_cost=time_cost)],
        carrier_classes=[bulk_class()],
    )


def build_two_depot():
    """Depots d1 (15) and d2 (5) feed stations s1, s2 (10 each) through j."""
    return NetworkInstance(
        name="two_depot",
        modes=[Mode(id="road")],
        n_phases=1,
        n_pieces=4,
        nodes=[
            supply_node("d1", NodeRole.DEPOT, 15.0),
            supply_node("d2", NodeRole.DEPOT, 5.0),
            NodeRecord(id="j"),
            supply_node("s1", NodeRole.STATION, -10.0),
            supply_node("s2", NodeRole.STATION, -10.0),
        ],
        arcs=both_ways([("d1", "j"), ("d2", "j"), ("j", "s1"), ("j", "s2")]),
        carrier_classes=[bulk_class()],
    )


def random_grid_case(seed, size=3):
    """Small one-phase GREREC instance with two depots and its default scenario."""
    skeleton = gen_grerec(size, size, p=0.8, q=0.2, seed=seed)
    instance = assign_roles(skeleton, fuel_fraction=0.5, depot_count=2, seed=seed, n_phases=1)
    return instance, default_scenario(instance, n_defend=1, n_open=1, n_attack=1, seed=seed)


def three_phase_case(seed=0):
    """3x3 GREREC with one depot: phase-1 haul, phase-2 customer trips, phase-3 returns."""
    skeleton = gen_grerec(3, 3, p=0.8, q=0.2, seed=seed)
    instance = assign_roles(skeleton, fuel_fraction=0.4, depot_count=1, seed=seed, n_phases=3)
    return instance, default_scenario(instance, n_defend=1, n_open=1, n_attack=1, seed=seed)


@pytest.fixture
def chain_instance():
    return build_chain()


@pytest.fixture
def chain_scenario():
    return ScenarioConfig(
        name="chain",
        cells=[ScenarioCell(mode="road", phase=1, attackable=["d"], n_defend=1, n_attack=1)],
    )


@pytest.fixture
def two_depot_instance():
    return build_two_depot()


@pytest.fixture
def two_depot_scenario():
    return ScenarioConfig(
        name="two_depot",
        cells=[ScenarioCell(mode="road", phase=1, attackable=["d1", "d2"], n_defend=1, n_attack=1)],
    )


@pytest.fixture(scope="session")
def cbc():
    """CBC through python-mip; tests needing a solver skip without it."""
    backend = MipBackend(solver_name="CBC", name="cbc")
    diagnostic = backend.diagnose()
    if not diagnostic.available:
        pytest.skip(f"CBC unavailable: {diagnostic.detail}")
    return backend


@pytest.fixture(scope="module")
def three_phase():
    return three_phase_case(0)
