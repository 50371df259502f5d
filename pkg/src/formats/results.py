"""
Results file (scenario echo, plans, objective, solver metadata) and the
JSON Lines bounds trace.
"""

import hashlib
import json
from typing import Dict, List, Optional

from pydantic import BaseModel, Field, ValidationError

from ..config import get_settings
from ..exceptions import FileFormatError
from ..models import AttackPlan, BoundsRecord, DADSolution, DefensePlan, NetworkInstance, ScenarioConfig
from ..optimization.ccg import selection_overlap
from .common import PathLike, atomic_write_text, dump_document, read_document, validation_message
from .instance import instance_to_text

RESULTS_FORMAT = "dadres-results"
RESULTS_VERSION = 1


class SolverMetadata(BaseModel):
    backend: str
    wall_time: float
    iterations: int
    tolerances: Dict[str, float] = Field(default_factory=dict)


class ResultsDocument(BaseModel):
    instance_name: str
    instance_sha256: str
    scenario: ScenarioConfig
    status: str
    objective: float
    lower_bound: float
    gap: float
    defense: DefensePlan
    worst_attack: AttackPlan
    overlap: Dict[str, bool] = Field(default_factory=dict)
    solver: SolverMetadata
    trace: List[BoundsRecord] = Field(default_factory=list)


def instance_digest(instance: NetworkInstance) -> str:
    return hashlib.sha256(instance_to_text(instance).encode("utf-8")).hexdigest()


def build_results(
    instance: NetworkInstance,
    scenario: ScenarioConfig,
    solution: DADSolution,
    tolerances: Optional[Dict[str, float]] = None,
) -> ResultsDocument:
    s = get_settings()
    tolerances = tolerances or {
        "ccg_gap": scenario.gap if scenario.gap is not None else s.ccg_gap,
        "feasibility_tol": s.feasibility_tol,
        "integrality_tol": s.integrality_tol,
        "optimality_tol": s.optimality_tol,
        "mip_gap": s.mip_gap,
    }
    return ResultsDocument(
        instance_name=instance.name,
        instance_sha256=instance_digest(instance),
        scenario=scenario,
        status=solution.status,
        objective=solution.objective,
        lower_bound=solution.lower_bound,
        gap=solution.gap,
        defense=solution.defense,
        worst_attack=solution.worst_attack,
        overlap=selection_overlap(solution),
        solver=SolverMetadata(
            backend=solution.backend,
            wall_time=solution.wall_time,
            iterations=solution.iterations,
            tolerances=tolerances,
        ),
        trace=solution.trace,
    )


def save_results(results: ResultsDocument, path: PathLike) -> None:
    atomic_write_text(path, dump_document(RESULTS_FORMAT, RESULTS_VERSION, results.model_dump(mode="json")))


def load_results(path: PathLike) -> ResultsDocument:
    doc = read_document(path, RESULTS_FORMAT, RESULTS_VERSION)
    body = {k: v for k, v in doc.items() if k not in ("format", "version", "units")}
    try:
        return ResultsDocument.model_validate(body)
    except ValidationError as e:
        raise FileFormatError(validation_message(e), path=str(path)) from e


def write_bounds_trace(trace: List[BoundsRecord], path: PathLike) -> None:
    """One JSON object per CCG iteration."""
    lines = [json.dumps(r.model_dump(mode="json"), sort_keys=True) for r in trace]
    atomic_write_text(path, "".join(line + "\n" for line in lines))


def read_bounds_trace(path: PathLike) -> List[BoundsRecord]:
    records = []
    try:
        with open(path, encoding="utf-8") as f:
            for lineno, line in enumerate(f, start=1):
                if not line.strip():
                    continue
                try:
                    records.append(BoundsRecord.model_validate_json(line))
                except ValidationError as e:
                    raise FileFormatError(validation_message(e), path=str(path), line=lineno) from e
    except OSError as e:
        raise FileFormatError(f"cannot read trace: {e}", path=str(path)) from e
    return records
