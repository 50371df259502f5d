import pytest

from src.models import Mode, NetworkInstance, NodeRecord
from src.network import compute_stats
from src.network.stats import undirected_projection
from tests.conftest import both_ways, make_arc

pytestmark = pytest.mark.unit


def graph_instance(name, node_ids, pairs, mode="road"):
    return NetworkInstance(
        name=name,
        modes=[Mode(id=mode)],
        n_phases=1,
        nodes=[NodeRecord(id=i) for i in node_ids],
        arcs=both_ways(pairs, mode=mode),
    )


def test_complete_graph():
    ids = ["a", "b", "c", "d"]
    pairs = [(u, v) for i, u in enumerate(ids) for v in ids[i + 1:]]
    stats = compute_stats(graph_instance("k4", ids, pairs))
    assert stats.node_count == 4
    assert stats.undirected_edge_count == 6
    assert stats.edge_count == 12
    assert stats.density == pytest.approx(1.0)
    assert stats.avg_degree == pytest.approx(3.0)
    assert stats.degree_heterogeneity == pytest.approx(0.0)
    assert stats.avg_betweenness == pytest.approx(0.0)
    assert stats.connected


def test_star_graph():
    stats = compute_stats(graph_instance("star", ["c", "x", "y", "z"], [("c", "x"), ("c", "y"), ("c", "z")]))
    assert stats.max_degree == 3
    assert stats.avg_degree == pytest.approx(1.5)
    assert stats.degree_heterogeneity == pytest.approx(0.75 ** 0.5)
    # all betweenness sits on the hub
    assert stats.avg_betweenness == pytest.approx(0.25)
    assert stats.avg_betweenness_pairwise == pytest.approx(0.25)
    assert stats.density == pytest.approx(0.5)


def test_disconnected_graph():
    stats = compute_stats(graph_instance("split", ["a", "b", "c", "d"], [("a", "b"), ("c", "d")]))
    assert not stats.connected
    assert stats.avg_betweenness == 0.0


def test_projection_ignores_direction_and_self_loops():
    instance = graph_instance("loop", ["a", "b"], [("a", "b")])
    instance = instance.model_copy(update={"arcs": list(instance.arcs) + [make_arc("a", "a")]})
    graph = undirected_projection(instance)
    assert graph.number_of_edges() == 1


def test_stats_per_mode():
    base = graph_instance("two", ["a", "b", "c"], [("a", "b"), ("b", "c")])
    rail = make_arc("a", "c", mode="rail")
    instance = base.model_copy(update={"modes": [Mode(id="road"), Mode(id="rail")], "arcs": list(base.arcs) + [rail]})
    assert compute_stats(instance).undirected_edge_count == 3
    road = compute_stats(instance, mode="road")
    assert road.undirected_edge_count == 2
    assert road.name == "two[road]"
