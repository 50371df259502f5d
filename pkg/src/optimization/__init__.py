from .bpr import BprPieces, arc_time, bpr_time, build_pieces
from .operator import (
    DefenseVars,
    OperatorModel,
    add_operator_block,
    build_operator_lp,
    evaluate_plans,
    operator_objective,
    solve_operator,
)
from .dual import (
    AttackEvaluation,
    SubproblemModel,
    bilinear_rows,
    build_dual_sp,
    dualize,
    evaluate_defense,
    linearize_bilinear,
    resolve_big_m,
    solve_subproblem,
)
from .ccg import MasterModel, build_master, ccg_solve, selection_overlap, solve_master
from .oracle import OracleResult, enumerate_attacks, enumerate_defenses, oracle_solve
from .bench import BenchReport, BenchRow, fit_exponent, run_bench


__all__ = [
    # Travel time
    'BprPieces',
    'bpr_time',
    'arc_time',
    'build_pieces',

    # Operator LP
    'DefenseVars',
    'OperatorModel',
    'add_operator_block',
    'build_operator_lp',
    'solve_operator',
    'operator_objective',
    'evaluate_plans',

    # Attacker subproblem
    'SubproblemModel',
    'AttackEvaluation',
    'dualize',
    'resolve_big_m',
    'bilinear_rows',
    'linearize_bilinear',
    'build_dual_sp',
    'solve_subproblem',
    'evaluate_defense',

    # Decomposition
    'MasterModel',
    'build_master',
    'solve_master',
    'ccg_solve',
    'selection_overlap',
    'oracle_solve',
    'OracleResult',
    'enumerate_defenses',
    'enumerate_attacks',

    # Scaling
    'run_bench',
    'fit_exponent',
    'BenchReport',
    'BenchRow',
]
