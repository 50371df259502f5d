"""
Runtime scaling sweeps: generate instances of growing size, solve each with
the decomposition and fit t ~ N^k on the median wall times.
"""

import math
from typing import List, Literal, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field

from ..logging_config import get_logger
from ..models import NetworkInstance, ScenarioConfig
from ..network.generators import gen_exponential, gen_grerec, gen_power_law
from ..network.roles import assign_roles, default_scenario, overlay_modes
from ..solvers import SolverBackend
from .ccg import ccg_solve

logger = get_logger(__name__, component="bench")

Family = Literal["power-law", "exponential", "grerec"]
Preset = Literal["single-mode", "two-mode"]


class BenchRow(BaseModel):
    size: int
    nodes: int
    arcs: int
    runs: List[float] = Field(default_factory=list)
    median_s: float
    iterations: int
    status: str
    objective: float


class BenchReport(BaseModel):
    family: str
    preset: str
    seed: int
    rows: List[BenchRow] = Field(default_factory=list)
    exponent: Optional[float] = None
    intercept: Optional[float] = None


def fit_exponent(sizes: Sequence[float], times: Sequence[float]) -> Optional[Tuple[float, float]]:
    """Least-squares slope and intercept of log t against log N; None below two distinct sizes."""
    pairs = [(n, t) for n, t in zip(sizes, times) if n > 0 and t > 0]
    if len({n for n, _ in pairs}) < 2:
        return None
    x = np.log([n for n, _ in pairs])
    y = np.log([t for _, t in pairs])
    slope, intercept = np.polyfit(x, y, 1)
    return float(slope), float(intercept)


def bench_instance(
    family: Family,
    size: int,
    seed: int = 0,
    preset: Preset = "single-mode",
    n_phases: int = 1,
    overlap_fraction: float = 0.05,
) -> NetworkInstance:
    """Instance of roughly `size` nodes with roles assigned; grids use side round(sqrt(size))."""
    def skeleton(s: int):
        if family == "grerec":
            side = max(2, round(math.sqrt(size)))
            return gen_grerec(side, side, seed=s)
        if family == "power-law":
            return gen_power_law(size, seed=s)
        return gen_exponential(size, seed=s)

    if preset == "two-mode":
        base = overlay_modes([skeleton(seed), skeleton(seed + 1)], overlap_fraction=overlap_fraction, seed=seed)
    else:
        base = skeleton(seed)
    return assign_roles(base, seed=seed, n_phases=n_phases)


def bench_scenario(instance: NetworkInstance, seed: int = 0) -> ScenarioConfig:
    return default_scenario(instance, n_defend=1, n_open=1, n_attack=1, seed=seed, name=f"bench-{instance.name}")


def run_bench(
    family: Family,
    sizes: Sequence[int],
    seed: int = 0,
    repeats: int = 1,
    preset: Preset = "single-mode",
    n_phases: int = 1,
    backend: Optional[SolverBackend] = None,
) -> BenchReport:
    sizes = list(sizes)
    if sizes != sorted(sizes):
        raise ValueError(f"bench sizes must be ascending, got {sizes}")
    report = BenchReport(family=family, preset=preset, seed=seed)
    for size in sizes:
        instance = bench_instance(family, size, seed, preset, n_phases)
        scenario = bench_scenario(instance, seed)
        runs = []
        solution = None
        for _ in range(max(1, repeats)):
            solution = ccg_solve(instance, scenario, backend)
            runs.append(solution.wall_time)
        row = BenchRow(
            size=size,
            nodes=len(instance.nodes),
            arcs=len(instance.arcs),
            runs=runs,
            median_s=float(np.median(runs)),
            iterations=solution.iterations,
            status=solution.status,
            objective=solution.objective,
        )
        report.rows.append(row)
        logger.info(
            f"Bench {family} N={size}: {row.nodes} nodes, median {row.median_s:.3f}s, {row.iterations} iterations",
            extra={"duration": row.median_s},
        )
    fit = fit_exponent([r.nodes for r in report.rows], [r.median_s for r in report.rows])
    if fit is not None:
        report.exponent, report.intercept = fit
        logger.info(f"Fitted runtime exponent {report.exponent:.3f}")
    return report
