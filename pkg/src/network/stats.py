"""
Summary statistics and network measures of an instance.
"""

from typing import Optional

import networkx as nx
import numpy as np
from pydantic import BaseModel

from ..models import NetworkInstance


class NetworkStats(BaseModel):
    name: str = ""
    node_count: int
    edge_count: int  # directed arcs, both directions counted
    undirected_edge_count: int
    density: float
    avg_degree: float
    degree_heterogeneity: float
    max_degree: int
    avg_betweenness: float  # mean of the l1-normalized betweenness vector
    avg_betweenness_pairwise: float  # mean of networkx pairwise-normalized betweenness
    connected: bool


def undirected_projection(instance: NetworkInstance, mode: Optional[str] = None) -> nx.Graph:
    graph = nx.Graph()
    graph.add_nodes_from(n.id for n in instance.nodes if mode is None or n.in_mode(mode))
    for arc in instance.arcs:
        if (mode is None or arc.mode == mode) and arc.tail != arc.head:
            graph.add_edge(arc.tail, arc.head)
    return graph


def compute_stats(instance: NetworkInstance, mode: Optional[str] = None) -> NetworkStats:
    """Exact metrics on the undirected simple projection (of one mode, or all modes)."""
    graph = undirected_projection(instance, mode)
    n = graph.number_of_nodes()
    e = graph.number_of_edges()
    degrees = np.array([d for _, d in graph.degree()], dtype=float) if n else np.zeros(0)

    raw = np.array(list(nx.betweenness_centrality(graph, normalized=False).values()), dtype=float)
    total = raw.sum()
    l1 = raw / total if total > 0 else np.zeros_like(raw)
    pairwise = list(nx.betweenness_centrality(graph, normalized=True).values())

    return NetworkStats(
        name=instance.name if mode is None else f"{instance.name}[{mode}]",
        node_count=n,
        edge_count=2 * e,
        undirected_edge_count=e,
        density=nx.density(graph) if n > 1 else 0.0,
        avg_degree=2.0 * e / n if n else 0.0,
        degree_heterogeneity=float(np.std(degrees)) if n else 0.0,
        max_degree=int(degrees.max()) if n else 0,
        avg_betweenness=float(l1.mean()) if n else 0.0,
        avg_betweenness_pairwise=float(np.mean(pairwise)) if n else 0.0,
        connected=n > 0 and nx.is_connected(graph),
    )
