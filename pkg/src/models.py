"""
Domain types: network instances, scenarios, plans and solutions.

Units follow the operator model: supply rates in bbl/h, vehicle flows in v/h,
lengths in mi, speeds in mi/h, money in $.
"""

from enum import Enum
from typing import Dict, Iterable, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator

# =============================
#        Instance data
# =============================


class NodeRole(str, Enum):
    DEPOT = "depot"
    STATION = "station"
    ZONE = "zone"
    JUNCTION = "junction"


class CarrierKind(str, Enum):
    BULK = "bulk"  # one carrier per (mode, phase), C_m1 = {m}
    OD = "od"      # origin-destination carriers, C_mp = V_mp^- x V_mp^+


class Mode(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: str
    standard_vehicle_length: float = Field(default=0.006, ge=0)  # l*m, mi/v
    max_trip_time: float = Field(default=1.0, ge=0)  # q^m, h


class NodeRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: str
    role: NodeRole = NodeRole.JUNCTION
    # empty means the node belongs to every mode
    modes: List[str] = Field(default_factory=list)
    supply: Dict[int, float] = Field(default_factory=dict)  # b_i^p, bbl/h
    mode_supply: Dict[str, Dict[int, float]] = Field(default_factory=dict)  # b_i^{mp}
    # b_i^{cmp} overrides keyed "mode:phase:carrier"
    carrier_supply: Dict[str, float] = Field(default_factory=dict)
    penalty: Dict[int, float] = Field(default_factory=dict)  # p_i^p, $/(bbl/h)
    pumps: Dict[int, int] = Field(default_factory=dict)  # nu_i^p
    pump_rate: Dict[int, float] = Field(default_factory=dict)  # psi_i^p, bbl/h
    x: Optional[float] = None
    y: Optional[float] = None

    def in_mode(self, mode: str) -> bool:
        return not self.modes or mode in self.modes

    @property
    def has_coordinates(self) -> bool:
        return self.x is not None and self.y is not None


class ArcRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    tail: str
    head: str
    mode: str
    length: float  # l_ij^m, mi
    speed: float  # v_ij^m, mi/h
    lanes: int  # h_ij^m
    time_cost: float = 0.0  # w_ij^m, $/((v/h)-h)
    flow_cost: Dict[int, float] = Field(default_factory=dict)  # c_ij^{cmp} per phase, $/(v/h)
    capacity: Optional[float] = None  # u_ij^m, v/h
    breakpoint_width: Optional[float] = None  # eps_ij^m, v/h

    @property
    def key(self) -> Tuple[str, str, str]:
        return (self.mode, self.tail, self.head)


class CarrierClass(BaseModel):
    """Vehicle parameters shared by every carrier of one (mode, phase)."""

    model_config = ConfigDict(frozen=True)

    mode: str
    phase: int
    kind: CarrierKind
    vehicle_length: float = Field(ge=0)  # l^{cmp}, mi/u
    demand_per_vehicle: float = Field(ge=0)  # rho^{cmp}, bbl/u
    conversion: Optional[float] = None  # gamma^{cmp}, v/bbl


class NetworkInstance(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str = "instance"
    modes: List[Mode]
    n_phases: int = 3
    n_pieces: int = 4
    nodes: List[NodeRecord] = Field(default_factory=list)
    arcs: List[ArcRecord] = Field(default_factory=list)
    carrier_classes: List[CarrierClass] = Field(default_factory=list)

    @property
    def mode_ids(self) -> List[str]:
        return [m.id for m in self.modes]

    @property
    def phases(self) -> List[int]:
        return list(range(1, self.n_phases + 1))

    def mode(self, mode_id: str) -> Mode:
        for mode in self.modes:
            if mode.id == mode_id:
                return mode
        raise KeyError(mode_id)

    def carrier_class(self, mode: str, phase: int) -> Optional[CarrierClass]:
        for cc in self.carrier_classes:
            if cc.mode == mode and cc.phase == phase:
                return cc
        return None


# =============================
#        Scenario data
# =============================


class SupplySlot(BaseModel):
    """One (mode, phase, node) position of a defense/attack/reserve vector."""

    model_config = ConfigDict(frozen=True)

    mode: str
    phase: int
    node: str

    @property
    def sort_key(self) -> Tuple[str, int, str]:
        return (self.mode, self.phase, self.node)

    def __str__(self) -> str:
        return f"{self.node}@{self.mode}/{self.phase}"


class ScenarioCell(BaseModel):
    """Attackable set, reserve set and budgets of one (mode, phase)."""

    model_config = ConfigDict(frozen=True)

    mode: str
    phase: int
    attackable: List[str] = Field(default_factory=list)  # S_mp
    reserve: List[str] = Field(default_factory=list)  # R_mp
    n_defend: int = Field(default=0, ge=0)  # n_D^{mp}
    n_open: int = Field(default=0, ge=0)  # n_O^{mp}
    n_attack: int = Field(default=0, ge=0)  # n_A^{mp}

    def attack_slots(self) -> List[SupplySlot]:
        return [SupplySlot(mode=self.mode, phase=self.phase, node=i) for i in sorted(self.attackable)]

    def reserve_slots(self) -> List[SupplySlot]:
        return [SupplySlot(mode=self.mode, phase=self.phase, node=i) for i in sorted(self.reserve)]


class BigMPolicy(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["penalty", "chain", "fixed"] = "chain"
    margin: float = Field(default=0.05, ge=0)
    value: Optional[float] = Field(default=None, gt=0)


class ScenarioConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str = "scenario"
    cells: List[ScenarioCell] = Field(default_factory=list)
    big_m: BigMPolicy = Field(default_factory=BigMPolicy)
    gap: Optional[float] = Field(default=None, gt=0)
    time_limit_s: Optional[float] = Field(default=None, gt=0)
    max_iterations: Optional[int] = Field(default=None, ge=1)
    penalty_overrides: Dict[str, Dict[int, float]] = Field(default_factory=dict)
    pump_cap: bool = False
    prune_carriers: bool = True

    def cell(self, mode: str, phase: int) -> Optional[ScenarioCell]:
        for cell in self.cells:
            if cell.mode == mode and cell.phase == phase:
                return cell
        return None

    def attack_slots(self) -> List[SupplySlot]:
        return sorted((s for c in self.cells for s in c.attack_slots()), key=lambda s: s.sort_key)

    def reserve_slots(self) -> List[SupplySlot]:
        return sorted((s for c in self.cells for s in c.reserve_slots()), key=lambda s: s.sort_key)

    def with_budgets(self, n_defend: int, n_open: int, n_attack: int, name: Optional[str] = None) -> "ScenarioConfig":
        """Copy with the same budgets applied to every cell."""
        cells = [
            c.model_copy(update={"n_defend": n_defend, "n_open": n_open, "n_attack": n_attack})
            for c in self.cells
        ]
        return self.model_copy(update={"cells": cells, "name": name or self.name})


# =============================
#             Plans
# =============================


def _normalize_slots(v: Iterable[SupplySlot]) -> Tuple[SupplySlot, ...]:
    return tuple(sorted(set(v), key=lambda s: s.sort_key))


class DefensePlan(BaseModel):
    """Defender decisions: d = 1 on `defended`, o = 1 on `opened`."""

    model_config = ConfigDict(frozen=True)

    defended: Tuple[SupplySlot, ...] = ()
    opened: Tuple[SupplySlot, ...] = ()

    @field_validator("defended", "opened")
    @classmethod
    def sort_slots(cls, v):
        return _normalize_slots(v)

    def is_defended(self, slot: SupplySlot) -> bool:
        return slot in self.defended

    def is_open(self, slot: SupplySlot) -> bool:
        return slot in self.opened

    def within_budgets(self, scenario: ScenarioConfig) -> bool:
        for cell in scenario.cells:
            d = sum(1 for s in self.defended if (s.mode, s.phase) == (cell.mode, cell.phase))
            o = sum(1 for s in self.opened if (s.mode, s.phase) == (cell.mode, cell.phase))
            if d > cell.n_defend or o > cell.n_open:
                return False
        return True


class AttackPlan(BaseModel):
    """Attacker decisions: a = 1 on `targets`."""

    model_config = ConfigDict(frozen=True)

    targets: Tuple[SupplySlot, ...] = ()

    @field_validator("targets")
    @classmethod
    def sort_slots(cls, v):
        return _normalize_slots(v)

    def is_attacked(self, slot: SupplySlot) -> bool:
        return slot in self.targets

    def within_budgets(self, scenario: ScenarioConfig) -> bool:
        for cell in scenario.cells:
            a = sum(1 for s in self.targets if (s.mode, s.phase) == (cell.mode, cell.phase))
            if a > cell.n_attack:
                return False
        return True

    def vector(self, scenario: ScenarioConfig) -> Tuple[int, ...]:
        """Binary vector over the scenario's attackable slots (sorted)."""
        return tuple(int(s in self.targets) for s in scenario.attack_slots())

    def without(self, slots: Iterable[SupplySlot]) -> "AttackPlan":
        drop = set(slots)
        return AttackPlan(targets=tuple(s for s in self.targets if s not in drop))


# =============================
#           Solutions
# =============================

ArcKey = Tuple[str, str, str]  # (mode, tail, head)
CarrierArcKey = Tuple[str, int, str, str, str]  # (mode, phase, carrier, tail, head)


class OperatorSolution(BaseModel):
    status: str
    objective: float
    flows: Dict[CarrierArcKey, float] = Field(default_factory=dict)  # f^{cmp}, v/h
    bbl_flows: Dict[CarrierArcKey, float] = Field(default_factory=dict)  # f-hat^{cmp}, bbl/h
    arc_flows: Dict[ArcKey, float] = Field(default_factory=dict)  # f^m, v/h
    carrier_supply: Dict[Tuple[str, int, str, str], float] = Field(default_factory=dict)  # x^{cmp}
    mode_supply: Dict[Tuple[str, int, str], float] = Field(default_factory=dict)  # x^{mp}
    phase_supply: Dict[Tuple[int, str], float] = Field(default_factory=dict)  # x^p
    slack: Dict[Tuple[str, int, str], float] = Field(default_factory=dict)  # s^{mp}
    congestion: Dict[ArcKey, float] = Field(default_factory=dict)  # g^m, (v/h)-h
    wall_time: float = 0.0


# Dual symbols and their sign domains
DUAL_DOMAINS: Dict[str, str] = {
    "phi": "free",
    "kappa": "free",
    "beta_c": "nonneg",
    "mu_c": "nonneg",
    "sigma_mp": "free",
    "delta": "nonneg",
    "delta_bar": "nonneg",
    "omega": "free",
    "beta_mp": "free",
    "sigma_p": "free",
    "beta_p": "nonneg",
    "kappa_m": "free",
    "mu_m": "nonneg",
    "tau": "nonneg",
    "upsilon": "nonneg",
    "theta": "free",
    "pump": "nonneg",
}


class DualSolution(BaseModel):
    values: Dict[str, Dict[tuple, float]] = Field(default_factory=dict)

    def get(self, symbol: str, key: tuple, default: float = 0.0) -> float:
        return self.values.get(symbol, {}).get(key, default)

    def sign_violations(self, tol: float = 1e-7) -> List[Tuple[str, tuple, float]]:
        bad = []
        for symbol, entries in self.values.items():
            if DUAL_DOMAINS.get(symbol) != "nonneg":
                continue
            bad.extend((symbol, k, v) for k, v in entries.items() if v < -tol)
        return bad


class BoundsRecord(BaseModel):
    iteration: int
    lower_bound: float
    sp_value: float
    upper_bound: float
    best_upper_bound: float
    gap: float
    defense: DefensePlan
    attack: AttackPlan
    big_m_escalations: int = 0
    elapsed: float = 0.0


class DADSolution(BaseModel):
    status: Literal["optimal", "gap_open"]
    objective: float
    lower_bound: float
    gap: float
    defense: DefensePlan
    worst_attack: AttackPlan
    attacks: List[AttackPlan] = Field(default_factory=list)
    trace: List[BoundsRecord] = Field(default_factory=list)
    iterations: int = 0
    wall_time: float = 0.0
    backend: str = ""

    @property
    def converged(self) -> bool:
        return self.status == "optimal"


class Violation(BaseModel):
    rule: str
    elements: List[str] = Field(default_factory=list)
    message: str = ""


class ValidationReport(BaseModel):
    violations: List[Violation] = Field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, rule: str, elements: Iterable[str], message: str = "") -> None:
        self.violations.append(Violation(rule=rule, elements=list(elements), message=message))

    def rules(self) -> List[str]:
        return sorted({v.rule for v in self.violations})

    def summary(self) -> str:
        return "; ".join(f"{v.rule}: {v.message or ', '.join(v.elements)}" for v in self.violations)
