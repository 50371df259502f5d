from .interfaces import (
    BackendDiagnostic,
    SolveLimits,
    SolveOutcome,
    SolverBackend,
    SolveStatus,
)
from .model import (
    INF,
    AbstractModel,
    Constraint,
    ObjectiveSense,
    Sense,
    Variable,
    VarKind,
)
from .base import BaseBackend, default_limits
from .mip_backend import MipBackend
from .gurobi_backend import GurobiBackend


__all__ = [
    # Interfaces
    'SolverBackend',
    'SolveLimits',
    'SolveOutcome',
    'SolveStatus',
    'BackendDiagnostic',

    # Model layer
    'AbstractModel',
    'Variable',
    'Constraint',
    'VarKind',
    'Sense',
    'ObjectiveSense',
    'INF',

    # Backends
    'BaseBackend',
    'MipBackend',
    'GurobiBackend',
    'default_limits',
]
