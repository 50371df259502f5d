"""
Synthetic road-network skeletons: power-law and exponential degree laws via
the configuration model, and GREREC grids with random edges and diagonals.

Every generator is a pure function of its arguments and seed.
"""

import math
from typing import Dict, List, Literal, Optional, Tuple

import networkx as nx
import numpy as np
from pydantic import BaseModel, Field, model_validator

from ..exceptions import GenerationError
from ..logging_config import get_logger
from ..models import ArcRecord, Mode, NetworkInstance, NodeRecord
from .defaults import ExponentialLawDefaults, GeneratorDefaults, load_defaults

logger = get_logger(__name__, component="netgen")

Position = Tuple[float, float]


class RoleSpec(BaseModel):
    fuel_fraction: Optional[float] = Field(default=None, gt=0, lt=1)
    depot_count: Optional[int] = Field(default=None, ge=1)
    zone_count: Optional[int] = Field(default=None, ge=0)


class GeneratorSpec(BaseModel):
    family: Literal["power-law", "exponential", "grerec"]
    seed: int = 0
    name: Optional[str] = None
    mode: str = "road"
    # power-law / exponential
    n: Optional[int] = Field(default=None, ge=2)
    exponent: Optional[float] = Field(default=None, gt=2.0)
    law: Optional[ExponentialLawDefaults] = None
    # grerec
    rows: Optional[int] = Field(default=None, ge=2)
    cols: Optional[int] = Field(default=None, ge=2)
    p: Optional[float] = Field(default=None, ge=0, le=1)
    q: Optional[float] = Field(default=None, ge=0, le=1)
    # instance shape
    phases: Optional[int] = Field(default=None, ge=1)
    pieces: Optional[int] = Field(default=None, ge=1)
    roles: Optional[RoleSpec] = None

    @model_validator(mode="after")
    def check_family_fields(self):
        if self.family in ("power-law", "exponential") and self.n is None:
            raise ValueError(f"{self.family} generator needs n")
        if self.family == "grerec" and (self.rows is None or self.cols is None):
            raise ValueError("grerec generator needs rows and cols")
        return self


# =============================
#       Degree sequences
# =============================


def exponential_law_pmf(params: ExponentialLawDefaults, k_max: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
    """p(k) = a0 + A/(w*sqrt(pi/2)) * exp(-2((k - kc)/w^2)^2) on k = 1..k_max, normalized."""
    k_max = min(params.k_max, k_max) if k_max else params.k_max
    k = np.arange(1, k_max + 1, dtype=float)
    scale = params.amplitude / (params.width * math.sqrt(math.pi / 2.0))
    weights = params.a0 + scale * np.exp(-2.0 * ((k - params.center) / params.width**2) ** 2)
    total = weights.sum()
    if not np.isfinite(total) or total <= 0 or np.any(weights < 0):
        raise GenerationError("exponential degree law is not a positive normalizable distribution")
    return k.astype(int), weights / total


def exponential_law_mean(params: ExponentialLawDefaults, k_max: Optional[int] = None) -> float:
    k, probs = exponential_law_pmf(params, k_max)
    return float(np.dot(k, probs))


def power_law_pmf(n: int, exponent: float) -> Tuple[np.ndarray, np.ndarray]:
    """p(k) proportional to k^-gamma on k = 1..n-1."""
    k = np.arange(1, max(n - 1, 1) + 1, dtype=float)
    weights = k ** (-exponent)
    return k.astype(int), weights / weights.sum()


def _even_sum(degrees: np.ndarray, rng: np.random.Generator, cap: int) -> np.ndarray:
    degrees = degrees.copy()
    if degrees.sum() % 2:
        i = int(rng.integers(len(degrees)))
        degrees[i] = degrees[i] + 1 if degrees[i] < cap else degrees[i] - 1
    return degrees


def configuration_graph(degrees: np.ndarray, rng: np.random.Generator, seed: int, max_retries: int = 20) -> nx.Graph:
    """Simple projection of a configuration-model multigraph."""
    n = len(degrees)
    for _ in range(max_retries):
        sequence = _even_sum(degrees, rng, n - 1)
        multigraph = nx.configuration_model(sequence.tolist(), seed=int(rng.integers(2**31 - 1)))
        graph = nx.Graph(multigraph)
        graph.remove_edges_from(list(nx.selfloop_edges(graph)))
        if graph.number_of_edges() > 0:
            return graph
    raise GenerationError(f"degree sequence unrealizable after {max_retries} retries", seed=seed)


# =============================
#         Connectivity
# =============================


def repair_connectivity(
    graph: nx.Graph,
    rng: np.random.Generator,
    positions: Optional[Dict[str, Position]] = None,
) -> int:
    """Bridge every component to the largest one; returns the number of edges added."""
    components = sorted(
        (sorted(c) for c in nx.connected_components(graph)),
        key=lambda c: (-len(c), c[0]),
    )
    if len(components) <= 1:
        return 0
    base = list(components[0])
    added = 0
    for comp in components[1:]:
        if positions:
            u, v = min(
                ((a, b) for a in comp for b in base),
                key=lambda ab: (math.dist(positions[ab[0]], positions[ab[1]]), ab),
            )
        else:
            u = comp[int(rng.integers(len(comp)))]
            v = base[int(rng.integers(len(base)))]
        graph.add_edge(u, v)
        base.extend(comp)
        added += 1
    logger.debug(f"Connectivity repair added {added} bridging edges")
    return added


# =============================
#          Skeletons
# =============================


def skeleton_from_graph(
    graph: nx.Graph,
    name: str,
    rng: np.random.Generator,
    mode: str = "road",
    positions: Optional[Dict[str, Position]] = None,
    spacing_mi: Optional[float] = None,
    defaults: Optional[GeneratorDefaults] = None,
) -> NetworkInstance:
    """Junction-only instance with both arc directions per edge and drawn road constants."""
    defaults = defaults or load_defaults()
    road = defaults.road
    nodes = []
    for node_id in sorted(graph.nodes):
        x, y = positions[node_id] if positions else (None, None)
        nodes.append(NodeRecord(id=node_id, x=x, y=y))
    arcs: List[ArcRecord] = []
    for u, v in sorted(tuple(sorted(e)) for e in graph.edges):
        if positions and spacing_mi:
            length = spacing_mi * math.dist(positions[u], positions[v])
        else:
            length = float(rng.uniform(*road.length_mi))
        speed = float(rng.uniform(*road.speed_mph))
        lanes = int(rng.integers(road.lanes[0], road.lanes[1] + 1))
        time_cost = float(rng.uniform(*road.time_cost))
        for tail, head in ((u, v), (v, u)):
            arcs.append(
                ArcRecord(
                    tail=tail,
                    head=head,
                    mode=mode,
                    length=round(length, 6),
                    speed=round(speed, 3),
                    lanes=lanes,
                    time_cost=round(time_cost, 4),
                )
            )
    return NetworkInstance(
        name=name,
        modes=[
            Mode(
                id=mode,
                standard_vehicle_length=defaults.mode.standard_vehicle_length_mi,
                max_trip_time=defaults.mode.max_trip_time_h,
            )
        ],
        n_phases=defaults.phases,
        n_pieces=defaults.pieces,
        nodes=nodes,
        arcs=arcs,
    )


def _relabel(graph: nx.Graph, width: int) -> nx.Graph:
    return nx.relabel_nodes(graph, {i: f"v{i:0{width}d}" for i in graph.nodes})


def gen_power_law(
    n: int,
    exponent: Optional[float] = None,
    seed: int = 0,
    mode: str = "road",
    defaults: Optional[GeneratorDefaults] = None,
) -> NetworkInstance:
    defaults = defaults or load_defaults()
    exponent = exponent if exponent is not None else defaults.power_law.exponent
    if n < 2:
        raise GenerationError("power-law generator needs n >= 2", seed=seed)
    if exponent <= 2:
        raise GenerationError(f"power-law exponent must exceed 2, got {exponent}", seed=seed)
    rng = np.random.default_rng(seed)
    k, probs = power_law_pmf(n, exponent)
    degrees = rng.choice(k, size=n, p=probs)
    graph = configuration_graph(degrees, rng, seed, defaults.power_law.max_retries)
    graph.add_nodes_from(range(n))
    graph = _relabel(graph, len(str(n - 1)))
    repair_connectivity(graph, rng)
    return skeleton_from_graph(graph, f"power-law-n{n}-s{seed}", rng, mode=mode, defaults=defaults)


def gen_exponential(
    n: int,
    params: Optional[ExponentialLawDefaults] = None,
    seed: int = 0,
    mode: str = "road",
    defaults: Optional[GeneratorDefaults] = None,
) -> NetworkInstance:
    defaults = defaults or load_defaults()
    params = params or defaults.exponential_law
    if n < 2:
        raise GenerationError("exponential generator needs n >= 2", seed=seed)
    rng = np.random.default_rng(seed)
    k, probs = exponential_law_pmf(params, k_max=n - 1)
    degrees = rng.choice(k, size=n, p=probs)
    graph = configuration_graph(degrees, rng, seed, defaults.power_law.max_retries)
    graph.add_nodes_from(range(n))
    graph = _relabel(graph, len(str(n - 1)))
    repair_connectivity(graph, rng)
    return skeleton_from_graph(graph, f"exponential-n{n}-s{seed}", rng, mode=mode, defaults=defaults)


def grerec_graph(rows: int, cols: int, p: float, q: float, rng: np.random.Generator) -> Tuple[nx.Graph, Dict[str, Position]]:
    """Grid with each edge kept w.p. p and each cell diagonal added w.p. q; isolated nodes dropped."""
    def nid(r: int, c: int) -> str:
        return f"g{r:03d}_{c:03d}"

    graph = nx.Graph()
    positions: Dict[str, Position] = {}
    for r in range(rows):
        for c in range(cols):
            graph.add_node(nid(r, c))
            positions[nid(r, c)] = (float(c), float(r))
    for r in range(rows):
        for c in range(cols):
            if c + 1 < cols and rng.random() < p:
                graph.add_edge(nid(r, c), nid(r, c + 1))
            if r + 1 < rows and rng.random() < p:
                graph.add_edge(nid(r, c), nid(r + 1, c))
    for r in range(rows - 1):
        for c in range(cols - 1):
            if rng.random() < q:
                graph.add_edge(nid(r, c), nid(r + 1, c + 1))
            if rng.random() < q:
                graph.add_edge(nid(r + 1, c), nid(r, c + 1))
    isolated = [v for v in graph.nodes if graph.degree(v) == 0]
    graph.remove_nodes_from(isolated)
    for v in isolated:
        positions.pop(v)
    return graph, positions


def gen_grerec(
    rows: int,
    cols: int,
    p: Optional[float] = None,
    q: Optional[float] = None,
    seed: int = 0,
    mode: str = "road",
    defaults: Optional[GeneratorDefaults] = None,
) -> NetworkInstance:
    defaults = defaults or load_defaults()
    p = defaults.grerec.p if p is None else p
    q = defaults.grerec.q if q is None else q
    if rows < 2 or cols < 2:
        raise GenerationError(f"grid dimensions must be >= 2, got {rows}x{cols}", seed=seed)
    if not (0 <= p <= 1 and 0 <= q <= 1):
        raise GenerationError(f"probabilities must lie in [0, 1], got p={p}, q={q}", seed=seed)
    rng = np.random.default_rng(seed)
    graph, positions = grerec_graph(rows, cols, p, q, rng)
    if graph.number_of_nodes() < 2:
        raise GenerationError("grid kept fewer than two connected nodes", seed=seed)
    repair_connectivity(graph, rng, positions)
    return skeleton_from_graph(
        graph,
        f"grerec-{rows}x{cols}-s{seed}",
        rng,
        mode=mode,
        positions=positions,
        spacing_mi=defaults.grerec.spacing_mi,
        defaults=defaults,
    )


def generate(spec: GeneratorSpec, defaults: Optional[GeneratorDefaults] = None) -> NetworkInstance:
    """Builds the skeleton a GeneratorSpec describes and assigns roles when it carries a RoleSpec."""
    from .roles import assign_roles

    defaults = defaults or load_defaults()
    if spec.family == "power-law":
        instance = gen_power_law(spec.n, spec.exponent, spec.seed, spec.mode, defaults)
    elif spec.family == "exponential":
        instance = gen_exponential(spec.n, spec.law, spec.seed, spec.mode, defaults)
    else:
        instance = gen_grerec(spec.rows, spec.cols, spec.p, spec.q, spec.seed, spec.mode, defaults)
    update = {}
    if spec.name:
        update["name"] = spec.name
    if spec.phases:
        update["n_phases"] = spec.phases
    if spec.pieces:
        update["n_pieces"] = spec.pieces
    if update:
        instance = instance.model_copy(update=update)
    if spec.roles is not None:
        instance = assign_roles(
            instance,
            fuel_fraction=spec.roles.fuel_fraction,
            depot_count=spec.roles.depot_count,
            zone_count=spec.roles.zone_count,
            seed=spec.seed,
            defaults=defaults,
        )
    return instance
