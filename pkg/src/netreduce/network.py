"""Attributed multigraph model: nodes, typed edges, and structural queries.

Networks are immutable after construction and iterate in insertion order,
so every downstream algorithm is reproducible. Parallel edges between the
same node pair are allowed; self-loops are not.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Union

from .errors import (
    DuplicateEdgeId,
    DuplicateNodeId,
    EdgeEndpointMissing,
    InvalidCoordinate,
    InvalidProperty,
    NonPositiveReactance,
    SelfLoop,
    UnknownEdgeId,
    UnknownNodeId,
)

PropertyValue = Union[float, str, bool]

ELECTRICAL_FIELDS = ("r", "x", "s_nom", "p_nom")


class EdgeKind(str, Enum):
    """Edge types. AC lines and transformers carry AC connectivity."""

    AC_LINE = "ac_line"
    TRANSFORMER = "transformer"
    CONVERTER = "converter"
    DC_LINK = "dc_link"
    GENERIC = "generic"


AC_KINDS = frozenset({EdgeKind.AC_LINE, EdgeKind.TRANSFORMER})


def check_property_value(name: str, value: object) -> PropertyValue:
    """Validate and normalize a property value (number, text, or flag)."""
    if isinstance(value, bool):
        return value
    if isinstance(value, (int, float)):
        value = float(value)
        if not math.isfinite(value):
            raise InvalidProperty(f"property '{name}' must be finite, got {value!r}")
        return value
    if isinstance(value, str):
        return value
    raise InvalidProperty(
        f"property '{name}' must be a number, string, or bool, got {type(value).__name__}"
    )


def _checked_properties(properties: Mapping[str, object] | None) -> dict[str, PropertyValue]:
    if not properties:
        return {}
    return {name: check_property_value(name, value) for name, value in properties.items()}


@dataclass(frozen=True)
class Node:
    id: str
    lon: float | None = None
    lat: float | None = None
    voltage_level: float | None = None
    properties: dict[str, PropertyValue] = field(default_factory=dict)

    def __post_init__(self):
        if not self.id or not isinstance(self.id, str):
            raise InvalidProperty(f"node id must be a nonempty string, got {self.id!r}")
        if (self.lon is None) != (self.lat is None):
            raise InvalidCoordinate(f"node '{self.id}': lon and lat must both be set or both absent")
        if self.lon is not None:
            lon, lat = float(self.lon), float(self.lat)
            if not (math.isfinite(lon) and -180.0 <= lon <= 180.0):
                raise InvalidCoordinate(f"node '{self.id}': lon {self.lon!r} outside [-180, 180]")
            if not (math.isfinite(lat) and -90.0 <= lat <= 90.0):
                raise InvalidCoordinate(f"node '{self.id}': lat {self.lat!r} outside [-90, 90]")
            object.__setattr__(self, "lon", lon)
            object.__setattr__(self, "lat", lat)
        if self.voltage_level is not None:
            v = float(self.voltage_level)
            if not (math.isfinite(v) and v > 0):
                raise InvalidProperty(f"node '{self.id}': voltage_level must be > 0, got {v!r}")
            object.__setattr__(self, "voltage_level", v)
        object.__setattr__(self, "properties", _checked_properties(self.properties))

    @property
    def coords(self) -> tuple[float, float] | None:
        if self.lon is None:
            return None
        return (self.lon, self.lat)


@dataclass(frozen=True)
class Edge:
    id: str
    u: str
    v: str
    kind: EdgeKind = EdgeKind.GENERIC
    r: float | None = None
    x: float | None = None
    s_nom: float | None = None
    p_nom: float | None = None
    properties: dict[str, PropertyValue] = field(default_factory=dict)

    def __post_init__(self):
        if not self.id or not isinstance(self.id, str):
            raise InvalidProperty(f"edge id must be a nonempty string, got {self.id!r}")
        if self.u == self.v:
            raise SelfLoop(f"edge '{self.id}': self-loop on node '{self.u}'")
        for name in ("r", "x", "s_nom", "p_nom"):
            value = getattr(self, name)
            if value is not None:
                value = float(value)
                if not math.isfinite(value):
                    raise InvalidProperty(f"edge '{self.id}': {name} must be finite")
                object.__setattr__(self, name, value)
        if self.kind in AC_KINDS:
            if self.x is None or self.x <= 0:
                raise NonPositiveReactance(
                    f"edge '{self.id}': {self.kind.value} requires reactance x > 0, got {self.x!r}"
                )
        if self.s_nom is not None and self.s_nom < 0:
            raise InvalidProperty(f"edge '{self.id}': s_nom must be >= 0")
        if self.p_nom is not None and self.p_nom < 0:
            raise InvalidProperty(f"edge '{self.id}': p_nom must be >= 0")
        object.__setattr__(self, "properties", _checked_properties(self.properties))

    @property
    def pair(self) -> tuple[str, str]:
        """Endpoints as an unordered (sorted) pair."""
        return (self.u, self.v) if self.u <= self.v else (self.v, self.u)


class Network:
    """Immutable attributed multigraph with insertion-ordered collections."""

    __slots__ = ("_nodes", "_edges", "metadata")

    def __init__(
        self,
        nodes: Iterable[Node],
        edges: Iterable[Edge],
        metadata: Mapping[str, str] | None = None,
        *,
        _trusted: bool = False,
    ):
        node_map: dict[str, Node] = {}
        for node in nodes:
            if node.id in node_map:
                raise DuplicateNodeId(f"duplicate node id '{node.id}'")
            node_map[node.id] = node
        edge_map: dict[str, Edge] = {}
        for edge in edges:
            if edge.id in edge_map:
                raise DuplicateEdgeId(f"duplicate edge id '{edge.id}'")
            if not _trusted:
                for endpoint in (edge.u, edge.v):
                    if endpoint not in node_map:
                        raise EdgeEndpointMissing(edge.id, endpoint)
            edge_map[edge.id] = edge
        self._nodes = node_map
        self._edges = edge_map
        self.metadata: dict[str, str] = dict(metadata or {})

    @property
    def nodes(self) -> tuple[Node, ...]:
        return tuple(self._nodes.values())

    @property
    def edges(self) -> tuple[Edge, ...]:
        return tuple(self._edges.values())

    @property
    def node_ids(self) -> tuple[str, ...]:
        return tuple(self._nodes.keys())

    @property
    def edge_ids(self) -> tuple[str, ...]:
        return tuple(self._edges.keys())

    @property
    def node_count(self) -> int:
        return len(self._nodes)

    @property
    def edge_count(self) -> int:
        return len(self._edges)

    def node(self, node_id: str) -> Node:
        try:
            return self._nodes[node_id]
        except KeyError:
            raise UnknownNodeId(f"unknown node id '{node_id}'") from None

    def edge(self, edge_id: str) -> Edge:
        try:
            return self._edges[edge_id]
        except KeyError:
            raise UnknownEdgeId(f"unknown edge id '{edge_id}'") from None

    def has_node(self, node_id: str) -> bool:
        return node_id in self._nodes

    def has_edge(self, edge_id: str) -> bool:
        return edge_id in self._edges

    def is_power_grid(self) -> bool:
        """True when any edge carries a power-grid kind (non-generic)."""
        return any(e.kind is not EdgeKind.GENERIC for e in self._edges.values())

    def adjacency(self, kinds: frozenset[EdgeKind] | set[EdgeKind] | None = None) -> dict[str, list[str]]:
        """Neighbor lists over edges whose kind is in ``kinds`` (all if None)."""
        adj: dict[str, list[str]] = {node_id: [] for node_id in self._nodes}
        for edge in self._edges.values():
            if kinds is not None and edge.kind not in kinds:
                continue
            adj[edge.u].append(edge.v)
            adj[edge.v].append(edge.u)
        return adj

    def __eq__(self, other: object) -> bool:
        # structural equality: node order is significant (one file preserves
        # it); edges compare by id because the power-grid schema splits them
        # across per-kind files and cannot keep an interleaved order
        if not isinstance(other, Network):
            return NotImplemented
        return (
            self.nodes == other.nodes
            and self._edges == other._edges
            and self.metadata == other.metadata
        )

    def __hash__(self):  # identity hashing; structural equality is for tests
        return id(self)

    def __repr__(self) -> str:
        return f"Network(nodes={self.node_count}, edges={self.edge_count})"


def build_network(
    nodes: Iterable[Node],
    edges: Iterable[Edge],
    metadata: Mapping[str, str] | None = None,
) -> Network:
    """Construct and validate a Network, preserving input order."""
    return Network(nodes, edges, metadata)


def connected_components(net: Network, kinds: set[EdgeKind] | frozenset[EdgeKind]) -> list[set[str]]:
    """Maximal components over edges of the given kinds, sorted by smallest member id.

    Isolated nodes are singleton components.
    """
    adj = net.adjacency(frozenset(kinds))
    seen: set[str] = set()
    components: list[set[str]] = []
    for node_id in net.node_ids:
        if node_id in seen:
            continue
        component = {node_id}
        seen.add(node_id)
        queue = deque([node_id])
        while queue:
            current = queue.popleft()
            for neighbor in adj[current]:
                if neighbor not in seen:
                    seen.add(neighbor)
                    component.add(neighbor)
                    queue.append(neighbor)
        components.append(component)
    components.sort(key=min)
    return components


def induced_subnetwork(net: Network, keep: Iterable[str]) -> Network:
    """Subnetwork on ``keep`` nodes with all edges internal to it, order preserved."""
    keep_set = set(keep)
    for node_id in keep_set:
        if not net.has_node(node_id):
            raise UnknownNodeId(f"unknown node id '{node_id}'")
    nodes = [n for n in net.nodes if n.id in keep_set]
    edges = [e for e in net.edges if e.u in keep_set and e.v in keep_set]
    return Network(nodes, edges, net.metadata, _trusted=True)


def _provisional_edge(
    edge_id: str,
    u: str,
    v: str,
    kind: EdgeKind,
    properties: dict[str, PropertyValue] | None = None,
    **electrical: float | None,
) -> Edge:
    # Skeleton edge whose electrical fields are filled by a later stage;
    # bypasses the AC x > 0 check that a finished network must satisfy.
    edge = object.__new__(Edge)
    object.__setattr__(edge, "id", edge_id)
    object.__setattr__(edge, "u", u)
    object.__setattr__(edge, "v", v)
    object.__setattr__(edge, "kind", kind)
    for name in ELECTRICAL_FIELDS:
        object.__setattr__(edge, name, electrical.get(name))
    object.__setattr__(edge, "properties", dict(properties or {}))
    return edge
