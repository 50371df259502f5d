"""
Reader for the Transportation Networks for Research text format
(`*_net.tntp` link tables, optional `*_node.tntp` coordinates).
"""

from pathlib import Path
from typing import Dict, List, Optional, TextIO, Tuple

from ..exceptions import FileFormatError
from ..logging_config import get_logger
from ..models import ArcRecord, Mode, NetworkInstance, NodeRecord
from ..network.defaults import load_defaults
from .common import PathLike

logger = get_logger(__name__, component="formats")

REQUIRED_COLUMNS = ("init_node", "term_node", "capacity", "length", "free_flow_time")

# defaults match the common TNTP convention of free-flow time in minutes
MINUTES = 1.0 / 60.0


def read_metadata(f: TextIO, path: str) -> Tuple[Dict[str, str], int]:
    meta: Dict[str, str] = {}
    lineno = 0
    for line in f:
        lineno += 1
        stripped = line.strip()
        if stripped == "<END OF METADATA>":
            return meta, lineno
        if not stripped or stripped.startswith("~"):
            continue
        if not stripped.startswith("<") or ">" not in stripped:
            raise FileFormatError(f"malformed metadata line {stripped!r}", path=path, line=lineno)
        key, value = stripped.split(">", 1)
        meta[key[1:].strip()] = value.strip()
    raise FileFormatError("missing <END OF METADATA>", path=path, line=lineno)


def _number(value: str, column: str, path: str, lineno: int) -> float:
    try:
        return float(value)
    except ValueError:
        raise FileFormatError(f"column {column!r} is not numeric: {value!r}", path=path, line=lineno) from None


def read_links(path: PathLike) -> Tuple[Dict[str, str], List[Dict[str, float]], List[int]]:
    """Metadata, link rows keyed by column name and their source line numbers."""
    file = str(path)
    rows: List[Dict[str, float]] = []
    lines: List[int] = []
    try:
        with open(path, encoding="utf-8") as f:
            meta, lineno = read_metadata(f, file)
            columns: Optional[List[str]] = None
            for line in f:
                lineno += 1
                stripped = line.strip()
                if not stripped:
                    continue
                if stripped.startswith("~"):
                    if columns is None and "init_node" in stripped.lower():
                        columns = [c.strip().lower() for c in stripped[1:].replace(";", " ").split()]
                        missing = [c for c in REQUIRED_COLUMNS if c not in columns]
                        if missing:
                            raise FileFormatError(f"missing columns {missing}", path=file, line=lineno)
                    continue
                if columns is None:
                    raise FileFormatError("link row before the column header", path=file, line=lineno)
                values = stripped.rstrip(";").split()
                if len(values) < len(columns):
                    raise FileFormatError(f"expected {len(columns)} fields, got {len(values)}", path=file, line=lineno)
                rows.append({c: _number(v, c, file, lineno) for c, v in zip(columns, values)})
                lines.append(lineno)
    except OSError as e:
        raise FileFormatError(f"cannot read network file: {e}", path=file) from e
    return meta, rows, lines


def read_nodes(path: PathLike) -> Dict[str, Tuple[float, float]]:
    """Node coordinates; the first non-comment line is the header."""
    file = str(path)
    coords: Dict[str, Tuple[float, float]] = {}
    try:
        with open(path, encoding="utf-8") as f:
            header_seen = False
            for lineno, line in enumerate(f, start=1):
                stripped = line.strip().rstrip(";").strip()
                if not stripped or stripped.startswith("~"):
                    continue
                if not header_seen:
                    header_seen = True
                    if not stripped.split()[0].lstrip("-").isdigit():
                        continue
                parts = stripped.split()
                if len(parts) < 3:
                    raise FileFormatError("node row needs id, x and y", path=file, line=lineno)
                coords[parts[0]] = (_number(parts[1], "x", file, lineno), _number(parts[2], "y", file, lineno))
    except OSError as e:
        raise FileFormatError(f"cannot read node file: {e}", path=file) from e
    return coords


def load_tntp(
    net_path: PathLike,
    node_path: Optional[PathLike] = None,
    mode: str = "road",
    length_factor: float = 1.0,
    time_factor: float = MINUTES,
    name: Optional[str] = None,
) -> NetworkInstance:
    """
    Junction-only skeleton from a TNTP link table.

    `length_factor` converts the length column to miles and `time_factor`
    converts free-flow time to hours; speed comes from the speed column when
    positive, otherwise from length / free-flow time. Links are directed as
    listed; zero or negative capacity is rejected. The congestion price is the
    midpoint of the default road range.
    """
    file = str(net_path)
    defaults = load_defaults()
    meta, rows, lines = read_links(net_path)
    coords = read_nodes(node_path) if node_path else {}
    time_cost = sum(defaults.road.time_cost) / 2.0

    arcs: List[ArcRecord] = []
    seen = set()
    node_ids = set(coords)
    for row, lineno in zip(rows, lines):
        tail, head = str(int(row["init_node"])), str(int(row["term_node"]))
        if row["capacity"] <= 0:
            raise FileFormatError(f"link {tail}->{head} has capacity {row['capacity']}", path=file, line=lineno)
        length = row["length"] * length_factor
        speed = row.get("speed", 0.0)
        if speed <= 0:
            hours = row["free_flow_time"] * time_factor
            if hours <= 0 or length <= 0:
                raise FileFormatError(f"link {tail}->{head} has no usable speed", path=file, line=lineno)
            speed = length / hours
        if (tail, head) in seen:
            logger.warning(f"Duplicate link {tail}->{head} at line {lineno} skipped")
            continue
        seen.add((tail, head))
        node_ids.update((tail, head))
        arcs.append(
            ArcRecord(
                tail=tail,
                head=head,
                mode=mode,
                length=length,
                speed=speed,
                lanes=1,
                capacity=row["capacity"],
                time_cost=time_cost,
            )
        )

    declared = meta.get("NUMBER OF LINKS")
    if declared is not None and declared.isdigit() and int(declared) != len(rows):
        logger.warning(f"{file}: metadata declares {declared} links, read {len(rows)}")

    def order(i: str):
        return (0, int(i), i) if i.lstrip("-").isdigit() else (1, 0, i)

    nodes = [
        NodeRecord(id=i, x=coords.get(i, (None, None))[0], y=coords.get(i, (None, None))[1])
        for i in sorted(node_ids, key=order)
    ]
    logger.info(f"Read TNTP network {file}: {len(nodes)} nodes, {len(arcs)} links")
    return NetworkInstance(
        name=name or Path(file).name.split("_net")[0],
        modes=[
            Mode(
                id=mode,
                standard_vehicle_length=defaults.mode.standard_vehicle_length_mi,
                max_trip_time=defaults.mode.max_trip_time_h,
            )
        ],
        n_phases=defaults.phases,
        n_pieces=defaults.pieces,
        nodes=nodes,
        arcs=arcs,
    )
