"""Static visualization emission: GeoJSON for geo-referenced networks, DOT otherwise.

Output is byte-deterministic for a given network and partition, so emitted
files can be diffed across runs.
"""

from __future__ import annotations

import colorsys
import json
from pathlib import Path
from typing import Mapping, Union

from .errors import IoError, MissingCoordinates
from .network import Network
from .partition import PartitionResult

GOLDEN_ANGLE_DEG = 137.508


def cluster_color(cluster_id: int) -> str:
    """Deterministic hex color: hue walks the golden angle per cluster id."""
    hue = (cluster_id * GOLDEN_ANGLE_DEG) % 360.0
    r, g, b = colorsys.hls_to_rgb(hue / 360.0, 0.5, 0.75)
    return "#{:02x}{:02x}{:02x}".format(round(r * 255), round(g * 255), round(b * 255))


def _assignment(p: Union[PartitionResult, Mapping[str, int], None]) -> dict[str, int] | None:
    if p is None:
        return None
    if isinstance(p, PartitionResult):
        return p.assignment
    return dict(p)


def export_geojson(net: Network, p=None, path=None) -> None:
    """Write one FeatureCollection: nodes as Points, edges as LineStrings.

    Node features carry id, voltage_level when present, and cluster id plus
    a deterministic color when a partition is given. Edge features carry
    id, kind, and member_count when aggregated. Feature order is network
    order.
    """
    assignment = _assignment(p)
    features = []
    for node in net.nodes:
        if node.coords is None:
            raise MissingCoordinates(f"node '{node.id}' has no coordinates")
        properties: dict = {"id": node.id}
        if assignment is not None:
            cluster = assignment[node.id]
            properties["cluster"] = cluster
            properties["color"] = cluster_color(cluster)
        if node.voltage_level is not None:
            properties["voltage_level"] = node.voltage_level
        features.append(
            {
                "type": "Feature",
                "geometry": {"type": "Point", "coordinates": [node.lon, node.lat]},
                "properties": properties,
            }
        )
    for edge in net.edges:
        source, target = net.node(edge.u), net.node(edge.v)
        properties = {"id": edge.id, "kind": edge.kind.value}
        member_count = edge.properties.get("member_count")
        if member_count is not None:
            properties["member_count"] = member_count
        features.append(
            {
                "type": "Feature",
                "geometry": {
                    "type": "LineString",
                    "coordinates": [[source.lon, source.lat], [target.lon, target.lat]],
                },
                "properties": properties,
            }
        )
    payload = {"type": "FeatureCollection", "features": features}
    _write_text(path, json.dumps(payload, indent=2) + "\n")


def export_dot(net: Network, p=None, path=None) -> None:
    """Write an undirected DOT document; cluster ids become node attributes."""
    assignment = _assignment(p)
    lines = ["graph network {"]
    for node in net.nodes:
        attrs = []
        if assignment is not None:
            cluster = assignment[node.id]
            attrs.append(f'cluster={cluster}')
            attrs.append(f'color="{cluster_color(cluster)}"')
        suffix = f" [{', '.join(attrs)}]" if attrs else ""
        lines.append(f'  "{node.id}"{suffix};')
    for edge in net.edges:
        lines.append(f'  "{edge.u}" -- "{edge.v}" [id="{edge.id}", kind="{edge.kind.value}"];')
    lines.append("}")
    _write_text(path, "\n".join(lines) + "\n")


def _write_text(path, text: str) -> None:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc
