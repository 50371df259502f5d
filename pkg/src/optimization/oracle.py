"""
Brute-force minimax over every budget-feasible (defense, reserve, attack)
triple, solving one operator LP per distinct effective pair.
"""

import itertools
import time
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from pydantic import BaseModel

from ..config import get_settings
from ..di import get_solver
from ..exceptions import OracleLimitError
from ..logging_config import get_logger
from ..models import AttackPlan, DefensePlan, NetworkInstance, ScenarioConfig, SupplySlot
from ..network.topology import NetworkView, require_valid
from ..solvers import SolverBackend
from .operator import evaluate_plans

logger = get_logger(__name__, component="oracle")

# values closer than this are treated as ties (first in enumeration order wins)
_TIE = 1e-9


class OracleResult(BaseModel):
    value: float
    defense: DefensePlan
    attack: AttackPlan
    defenses: int
    attacks: int
    lp_solves: int
    wall_time: float = 0.0


def _subsets(items: Sequence[SupplySlot], budget: int) -> List[Tuple[SupplySlot, ...]]:
    out: List[Tuple[SupplySlot, ...]] = []
    for r in range(min(budget, len(items)) + 1):
        out.extend(itertools.combinations(items, r))
    return out


def enumerate_defenses(scenario: ScenarioConfig) -> Iterator[DefensePlan]:
    per_cell = []
    for cell in scenario.cells:
        choices = [
            (d, o)
            for d in _subsets(cell.attack_slots(), cell.n_defend)
            for o in _subsets(cell.reserve_slots(), cell.n_open)
        ]
        per_cell.append(choices)
    for combo in itertools.product(*per_cell):
        yield DefensePlan(
            defended=tuple(s for d, _ in combo for s in d),
            opened=tuple(s for _, o in combo for s in o),
        )


def enumerate_attacks(scenario: ScenarioConfig) -> Iterator[AttackPlan]:
    per_cell = [_subsets(cell.attack_slots(), cell.n_attack) for cell in scenario.cells]
    for combo in itertools.product(*per_cell):
        yield AttackPlan(targets=tuple(s for a in combo for s in a))


def count_attacks(scenario: ScenarioConfig) -> int:
    return sum(1 for _ in enumerate_attacks(scenario))


def oracle_solve(
    instance: NetworkInstance,
    scenario: ScenarioConfig,
    backend: Optional[SolverBackend] = None,
    cap: Optional[int] = None,
) -> OracleResult:
    """Exact game value by enumeration; refuses grids larger than `cap` cells."""
    require_valid(instance, scenario)
    cap = cap or get_settings().oracle_cap
    defenses = list(enumerate_defenses(scenario))
    attacks = list(enumerate_attacks(scenario))
    if len(defenses) * len(attacks) > cap:
        raise OracleLimitError(
            f"{len(defenses)} defenses x {len(attacks)} attacks exceeds the oracle cap of {cap}"
        )
    backend = backend or get_solver()
    view = NetworkView(instance)
    start = time.perf_counter()

    # attacks on defended slots are nullified, so the LP depends only on the effective attack
    cache: Dict[Tuple[DefensePlan, AttackPlan], float] = {}
    best: Optional[Tuple[float, DefensePlan, AttackPlan]] = None
    for defense in defenses:
        worst: Optional[Tuple[float, AttackPlan]] = None
        for attack in attacks:
            effective = attack.without(defense.defended)
            key = (defense, effective)
            if key not in cache:
                cache[key] = evaluate_plans(view, scenario, defense, effective, backend).objective
            value = cache[key]
            if worst is None or value > worst[0] + _TIE:
                worst = (value, attack)
        if best is None or worst[0] < best[0] - _TIE:
            best = (worst[0], defense, worst[1])

    wall = time.perf_counter() - start
    logger.info(
        f"Oracle evaluated {len(defenses)}x{len(attacks)} cells with {len(cache)} LPs: value={best[0]:.6f}",
        extra={"duration": wall},
    )
    return OracleResult(
        value=best[0],
        defense=best[1],
        attack=best[2],
        defenses=len(defenses),
        attacks=len(attacks),
        lp_solves=len(cache),
        wall_time=wall,
    )
