"""
Shared plumbing for the JSON document formats: headers, unit blocks and
atomic writes.
"""

import json
import os
import tempfile
from pathlib import Path
from typing import Any, Dict, Union

from pydantic import ValidationError

from ..exceptions import FileFormatError

PathLike = Union[str, Path]

# Unit annotations written into every document
UNITS: Dict[str, str] = {
    "supply": "bbl/h",
    "penalty": "$/(bbl/h)",
    "flow": "v/h",
    "length": "mi",
    "speed": "mi/h",
    "time": "h",
    "vehicle_length": "mi/u",
    "demand_per_vehicle": "bbl/u",
    "time_cost": "$/((v/h)-h)",
    "flow_cost": "$/(v/h)",
    "objective": "$",
}


def atomic_write_text(path: PathLike, text: str) -> Path:
    """Write through a temporary file in the target directory, then replace."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{target.name}.", dir=str(target.parent))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return target


def dump_document(kind: str, version: int, body: Dict[str, Any]) -> str:
    doc = {"format": kind, "version": version, "units": UNITS}
    doc.update(body)
    return json.dumps(doc, indent=2, sort_keys=False, ensure_ascii=False) + "\n"


def read_document(path: PathLike, kind: str, max_version: int) -> Dict[str, Any]:
    """Parse a JSON document and check its format header."""
    file = Path(path)
    try:
        text = file.read_text(encoding="utf-8")
    except OSError as e:
        raise FileFormatError(f"cannot read file: {e}", path=str(file)) from e
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise FileFormatError(f"invalid JSON: {e.msg}", path=str(file), line=e.lineno) from e
    if not isinstance(doc, dict):
        raise FileFormatError("top-level value must be an object", path=str(file), line=1)
    if doc.get("format") != kind:
        raise FileFormatError(f"expected format {kind!r}, got {doc.get('format')!r}", path=str(file))
    version = doc.get("version")
    if not isinstance(version, int) or not 1 <= version <= max_version:
        raise FileFormatError(f"unsupported {kind} version {version!r}", path=str(file))
    return doc


def validation_message(error: ValidationError) -> str:
    """First few pydantic errors as 'field.path: message'."""
    parts = []
    for item in error.errors()[:5]:
        field = ".".join(str(x) for x in item.get("loc", ()))
        parts.append(f"{field}: {item.get('msg')}")
    more = error.error_count() - len(parts)
    if more > 0:
        parts.append(f"... and {more} more")
    return "; ".join(parts)
