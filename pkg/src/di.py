"""Dependency injection container for solver backends"""

from typing import Dict, Optional

from dependency_injector import containers, providers

from .config import SUPPORTED_BACKENDS, get_settings
from .exceptions import ConfigurationError, SolverUnavailableError
from .solvers import BackendDiagnostic, GurobiBackend, MipBackend, SolverBackend


class Container(containers.DeclarativeContainer):
    """Main application container"""

    config = providers.Configuration()

    solver_backend = providers.Selector(
        config.backend,
        cbc=providers.Singleton(MipBackend, solver_name="CBC", name="cbc"),
        **{"mip-gurobi": providers.Singleton(MipBackend, solver_name="GRB", name="mip-gurobi")},
        gurobi=providers.Singleton(GurobiBackend),
    )


# Global container instance
container = Container()
container.config.backend.from_value(get_settings().solver_backend)


def get_solver(backend: Optional[str] = None) -> SolverBackend:
    """Return the backend by name, or the configured default"""
    name = (backend or get_settings().solver_backend).strip().lower()
    if name not in SUPPORTED_BACKENDS:
        raise ConfigurationError(f"unknown solver backend {name!r}; expected one of {SUPPORTED_BACKENDS}")
    return container.solver_backend.providers[name]()


def check_license_or_availability(backend: Optional[str] = None) -> Dict[str, BackendDiagnostic]:
    """Check one backend (or all) and report availability"""
    names = [backend] if backend else list(SUPPORTED_BACKENDS)
    return {name: get_solver(name).diagnose() for name in names}


def require_solver(backend: Optional[str] = None) -> SolverBackend:
    """Like get_solver, but fail early when the backend cannot run"""
    solver = get_solver(backend)
    diagnostic = solver.diagnose()
    if not diagnostic.available:
        raise SolverUnavailableError(f"backend {solver.name!r} unavailable: {diagnostic.detail}")
    return solver
