"""
Instance file: versioned JSON with a unit block, node table, arc table,
modes, carrier classes and the phase/piece constants.
"""

from pydantic import ValidationError

from ..exceptions import FileFormatError
from ..logging_config import get_logger
from ..models import NetworkInstance
from ..network.topology import require_valid
from .common import PathLike, atomic_write_text, dump_document, read_document, validation_message

logger = get_logger(__name__, component="formats")

INSTANCE_FORMAT = "dadres-instance"
INSTANCE_VERSION = 1


def instance_to_text(instance: NetworkInstance) -> str:
    """Canonical text form; nodes and arcs are written in their stored order."""
    body = instance.model_dump(mode="json")
    constants = {
        "n_phases": body.pop("n_phases"),
        "n_pieces": body.pop("n_pieces"),
    }
    return dump_document(
        INSTANCE_FORMAT,
        INSTANCE_VERSION,
        {
            "name": body.pop("name"),
            "constants": constants,
            "modes": body.pop("modes"),
            "carrier_classes": body.pop("carrier_classes"),
            "nodes": body.pop("nodes"),
            "arcs": body.pop("arcs"),
        },
    )


def save_instance(instance: NetworkInstance, path: PathLike) -> None:
    atomic_write_text(path, instance_to_text(instance))
    logger.info(f"Wrote instance {instance.name!r} to {path}")


def load_instance(path: PathLike, validate: bool = True) -> NetworkInstance:
    """
    Read an instance file.

    With `validate` the relational rules run as well and violations raise
    InstanceValidationError; skeletons without roles need validate=False.
    """
    doc = read_document(path, INSTANCE_FORMAT, INSTANCE_VERSION)
    constants = doc.get("constants") or {}
    raw = {
        "name": doc.get("name", "instance"),
        "modes": doc.get("modes", []),
        "carrier_classes": doc.get("carrier_classes", []),
        "nodes": doc.get("nodes", []),
        "arcs": doc.get("arcs", []),
        **{k: v for k, v in constants.items() if k in ("n_phases", "n_pieces")},
    }
    try:
        instance = NetworkInstance.model_validate(raw)
    except ValidationError as e:
        raise FileFormatError(validation_message(e), path=str(path)) from e
    if validate:
        require_valid(instance)
    logger.debug(f"Loaded instance {instance.name!r}: {len(instance.nodes)} nodes, {len(instance.arcs)} arcs")
    return instance
