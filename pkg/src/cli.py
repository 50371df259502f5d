"""
Command-line surface: solve, generate, stats, oracle, bench, backends.

Exit codes: 0 success, 2 invalid input, 3 solver failure, 4 gap not closed
within limits (results are still written).
"""

import argparse
import itertools
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from pydantic import ValidationError

from .config import SUPPORTED_BACKENDS, get_settings
from .di import check_license_or_availability, get_solver
from .exceptions import (
    ConfigurationError,
    DadError,
    FileFormatError,
    GenerationError,
    InstanceValidationError,
    ModelBuildError,
    OracleLimitError,
    SolverError,
)
from .formats import (
    build_results,
    export_plot,
    load_generator_spec,
    load_instance,
    load_scenario,
    load_tntp,
    save_instance,
    save_results,
    save_scenario,
    write_bounds_trace,
    write_plot,
)
from .logging_config import get_logger, setup_logging
from .metrics import init_metrics, record_error
from .models import NetworkInstance, ScenarioConfig
from .network import GeneratorSpec, RoleSpec, assign_roles, compute_stats, default_scenario, generate
from .network.topology import require_valid
from .optimization import ccg_solve, oracle_solve, run_bench

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_SOLVER = 3
EXIT_GAP_OPEN = 4

logger = get_logger(__name__, component="cli")


def _int_list(text: Optional[str]) -> Optional[List[int]]:
    if not text:
        return None
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _print_json(payload) -> None:
    sys.stdout.write(json.dumps(payload, indent=2, default=str) + "\n")


def apply_overrides(scenario: ScenarioConfig, time_limit: Optional[float], gap: Optional[float]) -> ScenarioConfig:
    update = {}
    if time_limit is not None:
        update["time_limit_s"] = time_limit
    if gap is not None:
        update["gap"] = gap
    return scenario.model_copy(update=update) if update else scenario


def sweep_scenarios(
    scenario: ScenarioConfig,
    defend: Optional[Sequence[int]] = None,
    open_: Optional[Sequence[int]] = None,
    attack: Optional[Sequence[int]] = None,
) -> List[ScenarioConfig]:
    """One scenario per budget triple; dimensions without a sweep keep the first cell's budget."""
    if not (defend or open_ or attack):
        return [scenario]
    first = scenario.cells[0] if scenario.cells else None
    defend = defend or [first.n_defend if first else 0]
    open_ = open_ or [first.n_open if first else 0]
    attack = attack or [first.n_attack if first else 0]
    return [
        scenario.with_budgets(d, o, a, name=f"{scenario.name}-d{d}o{o}a{a}")
        for d, o, a in itertools.product(defend, open_, attack)
    ]


def solve_one(
    instance: NetworkInstance,
    scenario: ScenarioConfig,
    out_dir: str,
    backend: Optional[str] = None,
    anonymize: bool = False,
) -> Dict[str, str]:
    """Run the decomposition for one scenario and write results, trace and plots."""
    solution = ccg_solve(instance, scenario, get_solver(backend))
    stem = Path(out_dir) / scenario.name
    results_path = f"{stem}.results.json"
    trace_path = f"{stem}.trace.jsonl"
    save_results(build_results(instance, scenario, solution), results_path)
    write_bounds_trace(solution.trace, trace_path)
    plots = write_plot(export_plot(instance, solution.defense, solution.worst_attack, anonymize), stem)
    return {
        "scenario": scenario.name,
        "status": solution.status,
        "objective": f"{solution.objective:.9g}",
        "gap": f"{solution.gap:.3g}",
        "results": results_path,
        "trace": trace_path,
        "plots": ",".join(plots),
    }


def _worker_solve(instance_json: str, scenario_json: str, out_dir: str, backend: Optional[str], anonymize: bool):
    instance = NetworkInstance.model_validate_json(instance_json)
    scenario = ScenarioConfig.model_validate_json(scenario_json)
    return solve_one(instance, scenario, out_dir, backend, anonymize)


# =============================
#          Commands
# =============================


def resolve_instance(
    instance_path: Optional[str],
    scenario_path: str,
    seed: Optional[int] = None,
) -> NetworkInstance:
    """
    Instance file when given, else the scenario file's generator section
    rebuilt with `seed` (the section's own seed when None).
    """
    if instance_path:
        if seed is not None:
            logger.warning("--seed only applies to generator-backed scenarios; using the instance file as is")
        return load_instance(instance_path)
    spec = load_generator_spec(scenario_path)
    if seed is not None:
        spec = spec.model_copy(update={"seed": seed})
    instance = generate(spec)
    require_valid(instance)
    return instance


def cmd_solve(args: argparse.Namespace) -> int:
    instance = resolve_instance(args.instance, args.scenario, args.seed)
    scenario = apply_overrides(load_scenario(args.scenario), args.time_limit, args.gap)
    scenarios = sweep_scenarios(scenario, args.sweep_defend, args.sweep_open, args.sweep_attack)
    jobs = args.jobs or get_settings().default_jobs
    Path(args.out).mkdir(parents=True, exist_ok=True)

    if jobs <= 1 or len(scenarios) == 1:
        rows = [solve_one(instance, s, args.out, args.backend, args.anonymize) for s in scenarios]
    else:
        instance_json = instance.model_dump_json()
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [
                pool.submit(_worker_solve, instance_json, s.model_dump_json(), args.out, args.backend, args.anonymize)
                for s in scenarios
            ]
            rows = [f.result() for f in futures]

    _print_json(rows)
    if any(r["status"] != "optimal" for r in rows):
        logger.warning("Gap not closed within limits for at least one scenario")
        return EXIT_GAP_OPEN
    return EXIT_OK


def cmd_generate(args: argparse.Namespace) -> int:
    if args.tntp:
        instance = load_tntp(
            args.tntp,
            args.tntp_nodes,
            length_factor=args.length_factor,
            time_factor=args.time_factor,
        )
        if args.roles:
            instance = assign_roles(instance, args.fuel_fraction, args.depots, seed=args.seed)
    else:
        if args.spec:
            spec = load_generator_spec(args.spec)
        else:
            spec = GeneratorSpec(
                family=args.family,
                seed=args.seed,
                n=args.n,
                exponent=args.exponent,
                rows=args.rows,
                cols=args.cols,
                p=args.p,
                q=args.q,
                phases=args.phases,
                roles=RoleSpec(fuel_fraction=args.fuel_fraction, depot_count=args.depots) if args.roles else None,
            )
        instance = generate(spec)
    save_instance(instance, args.out)
    if args.scenario_out:
        save_scenario(default_scenario(instance, seed=args.seed), args.scenario_out)
    _print_json({"instance": args.out, "nodes": len(instance.nodes), "arcs": len(instance.arcs)})
    return EXIT_OK


def cmd_stats(args: argparse.Namespace) -> int:
    instance = load_instance(args.instance, validate=False)
    _print_json(compute_stats(instance, args.mode).model_dump())
    return EXIT_OK


def cmd_oracle(args: argparse.Namespace) -> int:
    instance = load_instance(args.instance)
    scenario = load_scenario(args.scenario)
    result = oracle_solve(instance, scenario, get_solver(args.backend), cap=args.cap)
    _print_json(result.model_dump(mode="json"))
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    sizes = args.sizes or get_settings().bench_size_list
    if sizes != sorted(sizes):
        logger.error(f"bench sizes must be ascending, got {sizes}")
        return EXIT_INVALID
    family = "exponential" if args.preset == "two-mode" else args.family
    report = run_bench(
        family,
        sizes,
        seed=args.seed,
        repeats=args.repeats,
        preset=args.preset,
        n_phases=args.phases,
        backend=get_solver(args.backend),
    )
    if args.out:
        Path(args.out).write_text(report.model_dump_json(indent=2) + "\n", encoding="utf-8")
    _print_json(report.model_dump())
    return EXIT_OK


def cmd_backends(args: argparse.Namespace) -> int:
    diagnostics = check_license_or_availability(args.backend)
    _print_json({name: d.model_dump() for name, d in diagnostics.items()})
    return EXIT_OK if any(d.available for d in diagnostics.values()) else EXIT_SOLVER


# =============================
#           Parser
# =============================


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dadres", description="Fuel supply-chain resilience under attack")
    parser.add_argument("--backend", choices=SUPPORTED_BACKENDS, default=None, help="Solver backend override")
    parser.add_argument("--log-level", default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="Defender-attacker-defender solve of one scenario or a budget sweep")
    p.add_argument("--instance", default=None, help="Instance file; defaults to the scenario's generator section")
    p.add_argument("--scenario", required=True)
    p.add_argument("--seed", type=int, default=None, help="Generator seed for generator-backed scenarios")
    p.add_argument("--out", default="results")
    p.add_argument("--time-limit", type=float, default=None)
    p.add_argument("--gap", type=float, default=None)
    p.add_argument("--jobs", type=int, default=None)
    p.add_argument("--sweep-defend", type=_int_list, default=None, help="e.g. 1,2")
    p.add_argument("--sweep-open", type=_int_list, default=None)
    p.add_argument("--sweep-attack", type=_int_list, default=None)
    p.add_argument("--anonymize", action="store_true", help="Suppress node ids in plot exports")
    p.set_defaults(handler=cmd_solve)

    p = sub.add_parser("generate", help="Generate a synthetic instance or read a TNTP network")
    p.add_argument("--out", required=True)
    p.add_argument("--spec", default=None, help="Scenario file with a generator section")
    p.add_argument("--family", choices=("power-law", "exponential", "grerec"), default="grerec")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--exponent", type=float, default=None)
    p.add_argument("--rows", type=int, default=None)
    p.add_argument("--cols", type=int, default=None)
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--q", type=float, default=None)
    p.add_argument("--phases", type=int, default=None)
    p.add_argument("--roles", action="store_true", help="Assign depots, stations and zones")
    p.add_argument("--fuel-fraction", type=float, default=None)
    p.add_argument("--depots", type=int, default=None)
    p.add_argument("--scenario-out", default=None, help="Also write a default scenario")
    p.add_argument("--tntp", default=None, help="TNTP link table instead of a generator")
    p.add_argument("--tntp-nodes", default=None)
    p.add_argument("--length-factor", type=float, default=1.0)
    p.add_argument("--time-factor", type=float, default=1.0 / 60.0)
    p.set_defaults(handler=cmd_generate)

    p = sub.add_parser("stats", help="Summary statistics and network measures")
    p.add_argument("--instance", required=True)
    p.add_argument("--mode", default=None)
    p.set_defaults(handler=cmd_stats)

    p = sub.add_parser("oracle", help="Brute-force minimax on a small instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--scenario", required=True)
    p.add_argument("--cap", type=int, default=None)
    p.set_defaults(handler=cmd_oracle)

    p = sub.add_parser("bench", help="Runtime scaling sweep with a fitted exponent")
    p.add_argument("--family", choices=("power-law", "exponential", "grerec"), default="grerec")
    p.add_argument("--sizes", type=_int_list, default=None, help="Ascending node counts, e.g. 49,100,169,225")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repeats", type=int, default=1)
    p.add_argument("--preset", choices=("single-mode", "two-mode"), default="single-mode")
    p.add_argument("--phases", type=int, default=1)
    p.add_argument("--out", default=None)
    p.set_defaults(handler=cmd_bench)

    p = sub.add_parser("backends", help="Report solver backend availability")
    p.set_defaults(handler=cmd_backends)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    s = get_settings()
    setup_logging(
        level=args.log_level or s.log_level,
        json_format=s.log_json_format,
        log_file=s.log_file,
        component=s.log_component,
    )
    init_metrics(s.metrics_port)
    try:
        return args.handler(args)
    except (
        InstanceValidationError,
        FileFormatError,
        GenerationError,
        ModelBuildError,
        OracleLimitError,
        ConfigurationError,
        ValidationError,
    ) as e:
        record_error(type(e).__name__, "cli")
        logger.error(str(e))
        return EXIT_INVALID
    except SolverError as e:
        record_error(type(e).__name__, "cli")
        logger.error(str(e))
        return EXIT_SOLVER
    except DadError as e:
        record_error(type(e).__name__, "cli")
        logger.error(str(e))
        return 1
