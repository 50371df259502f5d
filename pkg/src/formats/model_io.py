"""
Model export through the backend writers, plus the canonical fingerprint.
"""

from pathlib import Path
from typing import Optional

from ..di import get_solver
from ..logging_config import get_logger
from ..solvers import AbstractModel, SolverBackend
from .common import PathLike, atomic_write_text

logger = get_logger(__name__, component="formats")

BACKEND_SUFFIXES = (".lp", ".mps")


def model_fingerprint(model: AbstractModel) -> str:
    return model.fingerprint()


def export_model(model: AbstractModel, path: PathLike, backend: Optional[SolverBackend] = None) -> str:
    """`.lp`/`.mps` go through the backend writer; any other suffix gets the canonical text."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    if target.suffix.lower() in BACKEND_SUFFIXES:
        (backend or get_solver()).write(model, str(target))
    else:
        atomic_write_text(target, model.canonical_text())
    logger.info(f"Exported model {model.name!r} to {target} (sha256 {model_fingerprint(model)[:12]})")
    return str(target)
