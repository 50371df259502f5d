"""
Static plot exports: a DOT graph and, when coordinates exist, a GeoJSON
feature collection, with defense/reserve/attack nodes tagged blue/green/red.
"""

import json
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

from ..models import AttackPlan, DefensePlan, NetworkInstance
from .common import PathLike, atomic_write_text

TAG_COLORS = {"defense": "blue", "reserve": "green", "attack": "red"}
# drawing precedence when a node carries several tags
_PRECEDENCE = ("attack", "defense", "reserve")


class PlotExport(BaseModel):
    dot: str
    geojson: Optional[Dict[str, Any]] = None
    tags: Dict[str, List[str]] = Field(default_factory=dict)


def node_tags(defense: Optional[DefensePlan] = None, attack: Optional[AttackPlan] = None) -> Dict[str, List[str]]:
    """node id -> sorted tag list from the plan vectors."""
    tags: Dict[str, set] = {}
    if defense is not None:
        for slot in defense.defended:
            tags.setdefault(slot.node, set()).add("defense")
        for slot in defense.opened:
            tags.setdefault(slot.node, set()).add("reserve")
    if attack is not None:
        for slot in attack.targets:
            tags.setdefault(slot.node, set()).add("attack")
    return {node: sorted(t) for node, t in tags.items()}


def _color(tags: List[str]) -> Optional[str]:
    for tag in _PRECEDENCE:
        if tag in tags:
            return TAG_COLORS[tag]
    return None


def _labels(instance: NetworkInstance, anonymize: bool) -> Dict[str, str]:
    ids = [n.id for n in instance.nodes]
    if not anonymize:
        return {i: i for i in ids}
    return {i: f"v{k}" for k, i in enumerate(sorted(ids), start=1)}


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(
    instance: NetworkInstance,
    defense: Optional[DefensePlan] = None,
    attack: Optional[AttackPlan] = None,
    anonymize: bool = False,
) -> str:
    labels = _labels(instance, anonymize)
    tags = node_tags(defense, attack)
    out = [f"digraph {_quote(instance.name)} {{"]
    for node in instance.nodes:
        attrs = [f"role={_quote(node.role.value)}"]
        node_tag = tags.get(node.id, [])
        if node_tag:
            attrs.append(f"tags={_quote(','.join(node_tag))}")
            attrs.append(f"color={_color(node_tag)}")
            attrs.append("style=filled")
            attrs.append(f"fillcolor={_color(node_tag)}")
        if node.has_coordinates:
            attrs.append(f'pos="{node.x:g},{node.y:g}!"')
        out.append(f"  {_quote(labels[node.id])} [{', '.join(attrs)}];")
    for arc in instance.arcs:
        out.append(f"  {_quote(labels[arc.tail])} -> {_quote(labels[arc.head])} [mode={_quote(arc.mode)}];")
    out.append("}")
    return "\n".join(out) + "\n"


def export_geojson(
    instance: NetworkInstance,
    defense: Optional[DefensePlan] = None,
    attack: Optional[AttackPlan] = None,
    anonymize: bool = False,
) -> Optional[Dict[str, Any]]:
    """None when any node lacks coordinates."""
    if not instance.nodes or not all(n.has_coordinates for n in instance.nodes):
        return None
    labels = _labels(instance, anonymize)
    tags = node_tags(defense, attack)
    xy = {n.id: [n.x, n.y] for n in instance.nodes}
    features = []
    for node in instance.nodes:
        node_tag = tags.get(node.id, [])
        features.append(
            {
                "type": "Feature",
                "geometry": {"type": "Point", "coordinates": xy[node.id]},
                "properties": {
                    "id": labels[node.id],
                    "role": node.role.value,
                    "tags": node_tag,
                    "color": _color(node_tag),
                },
            }
        )
    for arc in instance.arcs:
        features.append(
            {
                "type": "Feature",
                "geometry": {"type": "LineString", "coordinates": [xy[arc.tail], xy[arc.head]]},
                "properties": {"tail": labels[arc.tail], "head": labels[arc.head], "mode": arc.mode},
            }
        )
    return {"type": "FeatureCollection", "features": features}


def export_plot(
    instance: NetworkInstance,
    defense: Optional[DefensePlan] = None,
    attack: Optional[AttackPlan] = None,
    anonymize: bool = False,
) -> PlotExport:
    tags = node_tags(defense, attack)
    if anonymize:
        labels = _labels(instance, True)
        tags = {labels[i]: t for i, t in tags.items() if i in labels}
    return PlotExport(
        dot=export_dot(instance, defense, attack, anonymize),
        geojson=export_geojson(instance, defense, attack, anonymize),
        tags=tags,
    )


def write_plot(export: PlotExport, stem: PathLike) -> List[str]:
    """Write `<stem>.dot` and, if present, `<stem>.geojson`; returns the written paths."""
    written = [str(atomic_write_text(f"{stem}.dot", export.dot))]
    if export.geojson is not None:
        written.append(str(atomic_write_text(f"{stem}.geojson", json.dumps(export.geojson, indent=2) + "\n")))
    return written
