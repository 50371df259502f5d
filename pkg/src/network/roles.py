"""
Role assignment (depots, stations, zones, junctions) and scenario presets on
top of generated skeletons.
"""

from typing import Dict, List, Optional, Sequence

import numpy as np

from ..exceptions import GenerationError
from ..logging_config import get_logger
from ..models import (
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
from .defaults import GeneratorDefaults, load_defaults

logger = get_logger(__name__, component="netgen")


def _carrier_classes(modes: Sequence[Mode], n_phases: int, defaults: GeneratorDefaults) -> List[CarrierClass]:
    truck, car = defaults.vehicles.truck, defaults.vehicles.car
    classes = []
    for mode in modes:
        for p in range(1, n_phases + 1):
            vehicle = truck if p == 1 else car
            classes.append(
                CarrierClass(
                    mode=mode.id,
                    phase=p,
                    kind=CarrierKind.BULK if p == 1 else CarrierKind.OD,
                    vehicle_length=vehicle.length_mi,
                    demand_per_vehicle=vehicle.bbl_per_vehicle,
                )
            )
    return classes


def assign_roles(
    skeleton: NetworkInstance,
    fuel_fraction: Optional[float] = None,
    depot_count: Optional[int] = None,
    seed: int = 0,
    zone_count: Optional[int] = None,
    n_phases: Optional[int] = None,
    defaults: Optional[GeneratorDefaults] = None,
) -> NetworkInstance:
    """
    Randomly designate depots, stations and zones and fill supplies and penalties.

    Depots ship the total station demand in phase 1, stations serve zones in
    phase 2 and zones return to stations in phase 3; every node with nonzero
    supply in a phase gets the default penalty for that phase.
    """
    defaults = defaults or load_defaults()
    roles = defaults.roles
    fuel_fraction = roles.fuel_fraction if fuel_fraction is None else fuel_fraction
    n_phases = n_phases or skeleton.n_phases
    if not 0 < fuel_fraction < 1:
        raise GenerationError(f"fuel_fraction must lie in (0, 1), got {fuel_fraction}", seed=seed)

    ids = sorted(n.id for n in skeleton.nodes)
    n = len(ids)
    depots_n = depot_count if depot_count is not None else max(1, round(n / roles.nodes_per_depot))
    if depots_n >= n:
        raise GenerationError(f"{n} nodes cannot hold {depots_n} depots and a station", seed=seed)
    stations_n = max(1, round(fuel_fraction * n) - depots_n)
    zones_n = 0
    if n_phases >= 2:
        zones_n = zone_count if zone_count is not None else stations_n
    if depots_n + stations_n + zones_n > n:
        raise GenerationError(
            f"{n} nodes cannot hold {depots_n} depots, {stations_n} stations and {zones_n} zones", seed=seed
        )

    rng = np.random.default_rng(seed)
    order = [ids[i] for i in rng.permutation(n)]
    depots = sorted(order[:depots_n])
    stations = sorted(order[depots_n:depots_n + stations_n])
    zones = sorted(order[depots_n + stations_n:depots_n + stations_n + zones_n])

    demand = {s: round(float(rng.uniform(*roles.station_demand_bbl_h)), 4) for s in stations}
    total = sum(demand.values())
    supply: Dict[str, Dict[int, float]] = {i: {} for i in ids}
    role: Dict[str, NodeRole] = {i: NodeRole.JUNCTION for i in ids}
    for d in depots:
        role[d] = NodeRole.DEPOT
        supply[d][1] = total / depots_n
    for s in stations:
        role[s] = NodeRole.STATION
        supply[s][1] = -demand[s]
        if n_phases >= 2:
            supply[s][2] = demand[s]
        if n_phases >= 3:
            supply[s][3] = -demand[s]
    for z in zones:
        role[z] = NodeRole.ZONE
        supply[z][2] = -total / zones_n
        if n_phases >= 3:
            supply[z][3] = total / zones_n

    nodes = []
    for node in sorted(skeleton.nodes, key=lambda v: v.id):
        b = {p: v for p, v in supply[node.id].items() if p <= n_phases}
        nodes.append(
            node.model_copy(
                update={
                    "role": role[node.id],
                    "supply": b,
                    "mode_supply": {},
                    "penalty": {p: roles.penalty for p, v in b.items() if v != 0},
                }
            )
        )
    logger.info(
        f"Assigned roles on {skeleton.name}: {len(depots)} depots, {len(stations)} stations, {len(zones)} zones",
        extra={"seed": seed},
    )
    return skeleton.model_copy(
        update={
            "nodes": nodes,
            "n_phases": n_phases,
            "carrier_classes": _carrier_classes(skeleton.modes, n_phases, defaults),
        }
    )


def default_scenario(
    instance: NetworkInstance,
    n_defend: int = 1,
    n_open: int = 1,
    n_attack: int = 1,
    reserve_count: Optional[int] = None,
    seed: int = 0,
    name: Optional[str] = None,
) -> ScenarioConfig:
    """
    Phase-1 cells attack depots; phase-2 cells attack stations and hold
    `reserve_count` randomly chosen stations per mode in reserve.
    """
    reserve_count = load_defaults().roles.reserve_count if reserve_count is None else reserve_count
    rng = np.random.default_rng(seed)
    stations = sorted(n.id for n in instance.nodes if n.role == NodeRole.STATION)
    # at least one station stays attackable
    keep = min(reserve_count, max(len(stations) - 1, 0))
    reserve_pool = sorted(stations[i] for i in rng.permutation(len(stations))[:keep])
    cells = []
    for mode in instance.mode_ids:
        members = {n.id for n in instance.nodes if n.in_mode(mode)}
        depots = sorted(
            n.id for n in instance.nodes if n.role == NodeRole.DEPOT and n.id in members
        )
        cells.append(ScenarioCell(mode=mode, phase=1, attackable=depots, n_defend=n_defend, n_attack=n_attack))
        if instance.n_phases >= 2:
            reserve = [s for s in reserve_pool if s in members]
            attackable = [s for s in stations if s in members and s not in reserve]
            cells.append(
                ScenarioCell(
                    mode=mode,
                    phase=2,
                    attackable=attackable,
                    reserve=reserve,
                    n_defend=n_defend,
                    n_open=n_open,
                    n_attack=n_attack,
                )
            )
    return ScenarioConfig(name=name or f"{instance.name}-d{n_defend}o{n_open}a{n_attack}", cells=cells)


def overlay_modes(
    skeletons: Sequence[NetworkInstance],
    overlap_fraction: float = 0.05,
    seed: int = 0,
    mode_ids: Optional[Sequence[str]] = None,
    name: Optional[str] = None,
) -> NetworkInstance:
    """
    Stack single-mode skeletons into one multi-mode instance.

    Nodes of the first skeleton keep their ids; every later skeleton maps
    round(overlap_fraction * N) of its nodes onto distinct nodes of the first
    one (shared nodes belong to both modes) and prefixes the rest with "<mode>.".
    """
    if not skeletons:
        raise GenerationError("overlay needs at least one skeleton", seed=seed)
    if not 0 <= overlap_fraction <= 1:
        raise GenerationError(f"overlap_fraction must lie in [0, 1], got {overlap_fraction}", seed=seed)
    mode_ids = list(mode_ids) if mode_ids else [f"mode{k + 1}" for k in range(len(skeletons))]
    if len(mode_ids) != len(skeletons) or len(set(mode_ids)) != len(mode_ids):
        raise GenerationError("overlay needs one distinct mode id per skeleton", seed=seed)

    rng = np.random.default_rng(seed)
    base = skeletons[0]
    base_ids = sorted(n.id for n in base.nodes)
    node_modes: Dict[str, List[str]] = {i: [mode_ids[0]] for i in base_ids}
    node_xy = {n.id: (n.x, n.y) for n in base.nodes}
    arcs: List[ArcRecord] = [a.model_copy(update={"mode": mode_ids[0]}) for a in base.arcs]
    modes: List[Mode] = [base.modes[0].model_copy(update={"id": mode_ids[0]})]

    for k, skeleton in enumerate(skeletons[1:], start=1):
        mode = mode_ids[k]
        ids = sorted(n.id for n in skeleton.nodes)
        shared_n = min(round(overlap_fraction * len(ids)), len(base_ids))
        own = [ids[i] for i in rng.permutation(len(ids))[:shared_n]]
        targets = [base_ids[i] for i in rng.permutation(len(base_ids))[:shared_n]]
        rename = {i: f"{mode}.{i}" for i in ids}
        rename.update(dict(zip(own, targets)))
        for node in skeleton.nodes:
            new_id = rename[node.id]
            if new_id in node_modes:
                node_modes[new_id].append(mode)
            else:
                node_modes[new_id] = [mode]
                node_xy[new_id] = (node.x, node.y)
        arcs.extend(
            a.model_copy(update={"tail": rename[a.tail], "head": rename[a.head], "mode": mode})
            for a in skeleton.arcs
        )
        modes.append(skeleton.modes[0].model_copy(update={"id": mode}))
        logger.debug(f"Overlay mode {mode}: {shared_n} shared nodes")

    all_modes = set(mode_ids)
    nodes = [
        NodeRecord(
            id=i,
            modes=[] if set(ms) == all_modes else sorted(ms),
            x=node_xy[i][0],
            y=node_xy[i][1],
        )
        for i, ms in sorted(node_modes.items())
    ]
    return NetworkInstance(
        name=name or "+".join(s.name for s in skeletons),
        modes=modes,
        n_phases=base.n_phases,
        n_pieces=base.n_pieces,
        nodes=nodes,
        arcs=arcs,
    )
