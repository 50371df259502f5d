"""
Instance validation, derived constants, carrier enumeration and the indexed
view (node sets, per-mode graphs, supply lookups) used by the model builders.
"""

from typing import Dict, List, Optional, Tuple

import networkx as nx

from ..exceptions import InstanceValidationError
from ..logging_config import get_logger
from ..models import (
    ArcRecord,
    CarrierClass,
    CarrierKind,
    Mode,
    NetworkInstance,
    NodeRecord,
    ScenarioConfig,
    ValidationReport,
)

logger = get_logger(__name__, component="network")

_TOL = 1e-9

# Bulk (phase-1) hauling is priced through the mode time cost w alone; later
# phases default to the q^m/2 trip cost per vehicle.
BULK_PHASE_FLOW_COST = 0.0


# =============================
#           Carriers
# =============================


def od_carrier(sink: str, source: str) -> str:
    """Name of the origin-destination carrier (s, t): s in V^-, t in V^+."""
    return f"{sink}|{source}"


def split_carrier(name: str) -> Optional[Tuple[str, str]]:
    if "|" not in name:
        return None
    sink, source = name.split("|", 1)
    return sink, source


def _sign(value: float) -> int:
    if value > 0:
        return 1
    if value < 0:
        return -1
    return 0


def mode_supply(node: NodeRecord, mode: str, phase: int) -> float:
    """b_i^{mp}; falls back to b_i^p for member modes."""
    per_mode = node.mode_supply.get(mode)
    if per_mode is not None and phase in per_mode:
        return per_mode[phase]
    if node.in_mode(mode):
        return node.supply.get(phase, 0.0)
    return 0.0


def carrier_supply(node: NodeRecord, mode: str, phase: int, carrier: str) -> float:
    """b_i^{cmp}: explicit override, else the bulk/OD rule."""
    override = node.carrier_supply.get(f"{mode}:{phase}:{carrier}")
    if override is not None:
        return override
    pair = split_carrier(carrier)
    if pair is not None and node.id not in pair:
        return 0.0
    return mode_supply(node, mode, phase)


# =============================
#          Validation
# =============================


def validate_instance(instance: NetworkInstance) -> ValidationReport:
    """Check the relational invariants; never raises."""
    report = ValidationReport()
    if not instance.nodes:
        report.add("nonempty node set", [], "instance has no nodes")
    if instance.n_phases < 1:
        report.add("phase count", [], f"n_phases={instance.n_phases}")
    if instance.n_pieces < 1:
        report.add("piece count", [], f"n_pieces={instance.n_pieces}")

    mode_ids = [m.id for m in instance.modes]
    if not mode_ids:
        report.add("nonempty mode set", [], "instance declares no modes")
    for dup in sorted({m for m in mode_ids if mode_ids.count(m) > 1}):
        report.add("unique ids", [dup], "duplicate mode id")
    for mode in instance.modes:
        if mode.standard_vehicle_length <= 0:
            report.add("positive geometry", [mode.id], "standard vehicle length must be > 0")

    node_ids = [n.id for n in instance.nodes]
    for dup in sorted({n for n in node_ids if node_ids.count(n) > 1}):
        report.add("unique ids", [dup], "duplicate node id")
    nodes = {n.id: n for n in instance.nodes}
    phases = set(instance.phases)

    for node in instance.nodes:
        for m in node.modes:
            if m not in mode_ids:
                report.add("mode membership", [node.id, m], "node lists an undeclared mode")
        bad_phases = (set(node.supply) | set(node.penalty) | set(node.pumps) | set(node.pump_rate)) - phases
        if bad_phases:
            report.add("phase range", [node.id], f"phases {sorted(bad_phases)} outside 1..{instance.n_phases}")
        for p, value in node.penalty.items():
            if value < 0:
                report.add("nonnegative cost", [node.id], f"penalty {value} in phase {p}")
        for p, b in node.supply.items():
            if b != 0 and p not in node.penalty:
                report.add("penalty", [node.id], f"no penalty for phase {p} with b={b}")
        for m in mode_ids:
            for p in instance.phases:
                b_mp = mode_supply(node, m, p)
                b_p = node.supply.get(p, 0.0)
                if _sign(b_mp) * _sign(b_p) < 0:
                    report.add("sign-consistency", [node.id], f"b^{{mp}}={b_mp} vs b^p={b_p} ({m}, {p})")
        for key, b_c in node.carrier_supply.items():
            parts = key.split(":", 2)
            if len(parts) != 3 or not parts[1].isdigit():
                report.add("carrier key", [node.id, key], "expected mode:phase:carrier")
                continue
            b_mp = mode_supply(node, parts[0], int(parts[1]))
            if _sign(b_c) * _sign(b_mp) < 0:
                report.add("sign-consistency", [node.id, key], f"b^{{cmp}}={b_c} vs b^{{mp}}={b_mp}")

    seen_arcs = set()
    for arc in instance.arcs:
        ids = [arc.tail, arc.head, arc.mode]
        if arc.mode not in mode_ids:
            report.add("arc endpoints", ids, "arc uses an undeclared mode")
        for end in (arc.tail, arc.head):
            if end not in nodes:
                report.add("arc endpoints", ids, f"unknown node {end!r}")
            elif not nodes[end].in_mode(arc.mode):
                report.add("mode membership", ids, f"node {end!r} is not in mode {arc.mode!r}")
        if arc.tail == arc.head:
            report.add("self-loop", ids, "tail equals head")
        if arc.key in seen_arcs:
            report.add("duplicate arc", ids, "parallel arc in the same mode")
        seen_arcs.add(arc.key)
        if arc.length <= 0 or arc.speed <= 0:
            report.add("positive geometry", ids, f"length={arc.length}, speed={arc.speed}")
        if arc.lanes < 1:
            report.add("positive geometry", ids, f"lanes={arc.lanes}")
        if arc.capacity is not None and arc.capacity <= 0:
            report.add("capacity", ids, f"capacity={arc.capacity}")
        if arc.time_cost < 0 or any(c < 0 for c in arc.flow_cost.values()):
            report.add("nonnegative cost", ids, "negative flow or time cost")

    for m in mode_ids:
        for p in instance.phases:
            cc = instance.carrier_class(m, p)
            if cc is None:
                report.add("carrier class", [m, str(p)], "no carrier class for (mode, phase)")
            elif cc.demand_per_vehicle <= 0 or cc.vehicle_length <= 0:
                report.add("positive geometry", [m, str(p)], "vehicle length and demand per vehicle must be > 0")

    # V_{p+1}^+ = V_p^- with b^{p+1} = -b^p
    for p in instance.phases[:-1]:
        for node in instance.nodes:
            b_now = node.supply.get(p, 0.0)
            b_next = node.supply.get(p + 1, 0.0)
            if b_now < 0 and abs(b_next + b_now) > _TOL:
                report.add("phase-chain", [node.id], f"b^{p + 1}={b_next} should be {-b_now}")
            elif b_now >= 0 and b_next > 0:
                report.add("phase-chain", [node.id], f"phase-{p + 1} supplier is not a phase-{p} demand node")

    return report


def validate_scenario(instance: NetworkInstance, scenario: ScenarioConfig) -> ValidationReport:
    report = ValidationReport()
    nodes = {n.id: n for n in instance.nodes}
    seen = set()
    for cell in scenario.cells:
        tag = [cell.mode, str(cell.phase)]
        if (cell.mode, cell.phase) in seen:
            report.add("scenario cell", tag, "duplicate (mode, phase) cell")
        seen.add((cell.mode, cell.phase))
        if cell.mode not in instance.mode_ids or cell.phase not in instance.phases:
            report.add("scenario cell", tag, "cell refers to an unknown mode or phase")
            continue
        for role, ids in (("attackable", cell.attackable), ("reserve", cell.reserve)):
            for i in ids:
                if i not in nodes:
                    report.add("scenario node", [i], f"unknown {role} node")
                elif mode_supply(nodes[i], cell.mode, cell.phase) <= 0:
                    report.add("scenario node", [i], f"{role} node is not a supply node of ({cell.mode}, {cell.phase})")
        overlap = set(cell.attackable) & set(cell.reserve)
        if overlap:
            report.add("attack-reserve overlap", sorted(overlap), "S_mp and R_mp must be disjoint")
    for node_id in scenario.penalty_overrides:
        if node_id not in nodes:
            report.add("scenario node", [node_id], "penalty override for unknown node")
    return report


def require_valid(instance: NetworkInstance, scenario: Optional[ScenarioConfig] = None) -> None:
    report = validate_instance(instance)
    if scenario is not None:
        report.violations.extend(validate_scenario(instance, scenario).violations)
    if not report.ok:
        raise InstanceValidationError(f"invalid instance {instance.name!r}: {report.summary()}", report)


# =============================
#       Derived constants
# =============================


def default_flow_cost(mode: Mode, phase: int) -> float:
    """c_ij^{cmp} when the arc gives none: BULK_PHASE_FLOW_COST in phase 1, q^m/2 after."""
    return BULK_PHASE_FLOW_COST if phase == 1 else mode.max_trip_time / 2.0


def derive_constants(instance: NetworkInstance) -> NetworkInstance:
    """Fill gamma, u, eps, default phase costs and per-mode supplies; idempotent."""
    modes = {m.id: m for m in instance.modes}
    report = ValidationReport()
    for m in instance.modes:
        if m.standard_vehicle_length <= 0:
            report.add("positive geometry", [m.id], "standard vehicle length must be > 0")
    for cc in instance.carrier_classes:
        if cc.demand_per_vehicle <= 0:
            report.add("positive geometry", [cc.mode, str(cc.phase)], "demand per vehicle must be > 0")
    if instance.n_pieces < 1:
        report.add("piece count", [], f"n_pieces={instance.n_pieces}")
    if not report.ok:
        raise InstanceValidationError(f"cannot derive constants: {report.summary()}", report)

    classes = []
    for cc in instance.carrier_classes:
        mode = modes.get(cc.mode)
        if mode is None:
            classes.append(cc)
            continue
        gamma = cc.vehicle_length / (mode.standard_vehicle_length * cc.demand_per_vehicle)
        classes.append(cc.model_copy(update={"conversion": gamma}))

    arcs = []
    for arc in instance.arcs:
        mode = modes.get(arc.mode)
        if mode is None:
            arcs.append(arc)
            continue
        capacity = arc.capacity
        if capacity is None:
            capacity = arc.lanes * arc.speed / mode.standard_vehicle_length
        costs = dict(arc.flow_cost)
        for p in instance.phases:
            costs.setdefault(p, default_flow_cost(mode, p))
        arcs.append(
            arc.model_copy(
                update={
                    "capacity": capacity,
                    "breakpoint_width": 2.0 * capacity / instance.n_pieces,
                    "flow_cost": costs,
                }
            )
        )

    nodes = []
    for node in instance.nodes:
        per_mode = {m: dict(v) for m, v in node.mode_supply.items()}
        for m in modes:
            if not node.in_mode(m):
                continue
            for p, b in node.supply.items():
                if b != 0:
                    per_mode.setdefault(m, {}).setdefault(p, b)
        nodes.append(node.model_copy(update={"mode_supply": per_mode}))

    return instance.model_copy(update={"carrier_classes": classes, "arcs": arcs, "nodes": nodes})


def is_derived(instance: NetworkInstance) -> bool:
    return all(a.capacity is not None and a.breakpoint_width is not None for a in instance.arcs) and all(
        cc.conversion is not None for cc in instance.carrier_classes
    )


# =============================
#         Indexed view
# =============================


class NetworkView:
    """
    Read-only index over a derived instance.

    Node, arc and carrier orderings are lexicographic so model builds are
    deterministic.
    """

    def __init__(self, instance: NetworkInstance):
        if not is_derived(instance):
            instance = derive_constants(instance)
        self.instance = instance
        self.modes: List[str] = sorted(instance.mode_ids)
        self.phases: List[int] = instance.phases
        self.nodes: Dict[str, NodeRecord] = {n.id: n for n in sorted(instance.nodes, key=lambda n: n.id)}
        self.node_ids: List[str] = list(self.nodes)

        self.mode_nodes: Dict[str, List[str]] = {
            m: [i for i, n in self.nodes.items() if n.in_mode(m)] for m in self.modes
        }
        self.mode_arcs: Dict[str, List[ArcRecord]] = {m: [] for m in self.modes}
        for arc in sorted(instance.arcs, key=lambda a: (a.mode, a.tail, a.head)):
            self.mode_arcs.setdefault(arc.mode, []).append(arc)

        self.graphs: Dict[str, nx.DiGraph] = {}
        for m in self.modes:
            g = nx.DiGraph()
            g.add_nodes_from(self.mode_nodes[m])
            g.add_edges_from((a.tail, a.head) for a in self.mode_arcs[m])
            self.graphs[m] = g

        self.out_arcs: Dict[Tuple[str, str], List[ArcRecord]] = {}
        self.in_arcs: Dict[Tuple[str, str], List[ArcRecord]] = {}
        for m in self.modes:
            for arc in self.mode_arcs[m]:
                self.out_arcs.setdefault((m, arc.tail), []).append(arc)
                self.in_arcs.setdefault((m, arc.head), []).append(arc)

        self._classes: Dict[Tuple[str, int], CarrierClass] = {
            (cc.mode, cc.phase): cc for cc in instance.carrier_classes
        }
        self._carriers: Dict[Tuple[str, int, bool], List[str]] = {}

    # ---- supplies ----

    def b_p(self, node: str, phase: int) -> float:
        return self.nodes[node].supply.get(phase, 0.0)

    def b_mp(self, node: str, mode: str, phase: int) -> float:
        return mode_supply(self.nodes[node], mode, phase)

    def b_cmp(self, node: str, mode: str, phase: int, carrier: str) -> float:
        return carrier_supply(self.nodes[node], mode, phase, carrier)

    def supply_nodes(self, mode: str, phase: int) -> List[str]:
        """V_mp^+"""
        return [i for i in self.mode_nodes[mode] if self.b_mp(i, mode, phase) > 0]

    def demand_nodes(self, mode: str, phase: int) -> List[str]:
        """V_mp^-"""
        return [i for i in self.mode_nodes[mode] if self.b_mp(i, mode, phase) < 0]

    def phase_demand_nodes(self, phase: int) -> List[str]:
        """V_p^-"""
        return [i for i in self.node_ids if self.b_p(i, phase) < 0]

    def penalty(self, node: str, phase: int, scenario: Optional[ScenarioConfig] = None) -> float:
        if scenario is not None:
            override = scenario.penalty_overrides.get(node, {}).get(phase)
            if override is not None:
                return override
        return self.nodes[node].penalty.get(phase, 0.0)

    def max_penalty(self, phase: int, scenario: Optional[ScenarioConfig] = None) -> float:
        values = [self.penalty(i, phase, scenario) for i in self.node_ids if self.b_p(i, phase) != 0]
        return max(values, default=0.0)

    # ---- carriers ----

    def carrier_class(self, mode: str, phase: int) -> CarrierClass:
        return self._classes[(mode, phase)]

    def gamma(self, mode: str, phase: int) -> float:
        return self.carrier_class(mode, phase).conversion

    def carriers(self, mode: str, phase: int, prune: bool = True) -> List[str]:
        key = (mode, phase, prune)
        if key not in self._carriers:
            self._carriers[key] = enumerate_carriers(self.instance, mode, phase, prune=prune, view=self)
        return self._carriers[key]

    def has_path(self, mode: str, source: str, sink: str) -> bool:
        g = self.graphs[mode]
        return source in g and sink in g and nx.has_path(g, source, sink)


def enumerate_carriers(
    instance: NetworkInstance,
    mode: str,
    phase: int,
    prune: bool = False,
    view: Optional[NetworkView] = None,
) -> List[str]:
    """
    C_mp: {m} for bulk phases; (s, t) pairs over V_mp^- x V_mp^+ otherwise.

    With `prune`, OD pairs without a t -> s path in the mode graph are dropped.
    """
    view = view or NetworkView(instance)
    cc = view.carrier_class(mode, phase)
    if cc.kind == CarrierKind.BULK:
        return [mode]
    pairs = [od_carrier(s, t) for s in view.demand_nodes(mode, phase) for t in view.supply_nodes(mode, phase)]
    if not prune:
        return pairs
    kept = [c for c in pairs if view.has_path(mode, split_carrier(c)[1], split_carrier(c)[0])]
    if len(kept) < len(pairs):
        logger.debug(f"Pruned {len(pairs) - len(kept)} unreachable OD carriers for ({mode}, {phase})")
    return kept


def round_trip_partner(carrier: str) -> Optional[str]:
    """(s, t) -> (t, s)"""
    pair = split_carrier(carrier)
    return od_carrier(pair[1], pair[0]) if pair else None
