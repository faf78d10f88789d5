"""Optional pre-processing: parallel-edge consolidation and node groupings.

Groupings (by voltage level, by AC island, or both combined) are what the
partitioning stage turns into infinity masks or independent sub-problems.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import DomainMismatch
from .network import AC_KINDS, Edge, EdgeKind, Network, connected_components


class GroupKind(str, Enum):
    VOLTAGE_LEVEL = "voltage_level"
    AC_ISLAND = "ac_island"
    COMBINED = "combined"


@dataclass(frozen=True)
class GroupLabeling:
    """Total mapping node id -> dense group id (0..G-1)."""

    labels: dict[str, int]
    kind: GroupKind

    def __post_init__(self):
        if self.labels:
            groups = set(self.labels.values())
            if groups != set(range(len(groups))):
                raise ValueError(f"group ids must be contiguous from 0, got {sorted(groups)}")

    @property
    def group_count(self) -> int:
        return len(set(self.labels.values())) if self.labels else 0

    def members(self) -> list[list[str]]:
        """Member ids per group, in labeling insertion order."""
        out: list[list[str]] = [[] for _ in range(self.group_count)]
        for node_id, group in self.labels.items():
            out[group].append(node_id)
        return out


def _parallel_sum(values: list[float | None]) -> float | None:
    """1 / sum(1/v) over present values; zero members short-circuit to 0."""
    present = [v for v in values if v is not None]
    if not present:
        return None
    if any(v == 0 for v in present):
        return 0.0
    return 1.0 / sum(1.0 / v for v in present)


def consolidate_parallel_edges(net: Network) -> Network:
    """Collapse parallel edges of the same kind between the same node pair.

    Equivalent reactance/resistance is 1/sum(1/x_i); s_nom, p_nom, and
    num_parallel are summed; remaining properties come from the lowest-id
    member. Edges of different kinds between the same pair are kept apart.
    Identity on networks without parallels.
    """
    buckets: dict[tuple[str, str, EdgeKind], list[Edge]] = {}
    order: list[tuple[str, str, EdgeKind]] = []
    for edge in net.edges:
        key = (*edge.pair, edge.kind)
        if key not in buckets:
            buckets[key] = []
            order.append(key)
        buckets[key].append(edge)

    new_edges: list[Edge] = []
    for key in order:
        members = buckets[key]
        if len(members) == 1:
            new_edges.append(members[0])
            continue
        members_by_id = sorted(members, key=lambda e: e.id)
        base = members_by_id[0]
        s_nom_present = [e.s_nom for e in members if e.s_nom is not None]
        p_nom_present = [e.p_nom for e in members if e.p_nom is not None]
        num_parallel = sum(float(e.properties.get("num_parallel", 1.0)) for e in members)
        properties = dict(base.properties)
        properties["num_parallel"] = num_parallel
        properties["member_ids"] = ",".join(e.id for e in members_by_id)
        new_edges.append(
            Edge(
                id=base.id,
                u=base.u,
                v=base.v,
                kind=base.kind,
                r=_parallel_sum([e.r for e in members]),
                x=_parallel_sum([e.x for e in members]),
                s_nom=sum(s_nom_present) if s_nom_present else None,
                p_nom=sum(p_nom_present) if p_nom_present else None,
                properties=properties,
            )
        )
    return Network(net.nodes, new_edges, net.metadata, _trusted=True)


def group_by_voltage(net: Network) -> GroupLabeling:
    """Group nodes by identical voltage level, ascending; no-voltage nodes share a trailing group."""
    levels = sorted({n.voltage_level for n in net.nodes if n.voltage_level is not None})
    index = {level: i for i, level in enumerate(levels)}
    absent_group = len(levels)
    labels = {
        n.id: index[n.voltage_level] if n.voltage_level is not None else absent_group
        for n in net.nodes
    }
    return GroupLabeling(labels, GroupKind.VOLTAGE_LEVEL)


def detect_ac_islands(net: Network) -> GroupLabeling:
    """Group nodes by AC island (connectivity over AC lines and transformers).

    Islands coupled only through converters or DC links are distinct; group
    ids are ordered by smallest member node id.
    """
    components = connected_components(net, AC_KINDS)
    labels: dict[str, int] = {}
    for group, component in enumerate(components):
        for node_id in component:
            labels[node_id] = group
    return GroupLabeling({n: labels[n] for n in net.node_ids}, GroupKind.AC_ISLAND)


def combine_labelings(a: GroupLabeling, b: GroupLabeling) -> GroupLabeling:
    """Intersection refinement: together in the result iff together in both inputs."""
    if set(a.labels) != set(b.labels):
        raise DomainMismatch("labelings cover different node sets")
    pair_members: dict[tuple[int, int], list[str]] = {}
    for node_id in a.labels:
        pair = (a.labels[node_id], b.labels[node_id])
        pair_members.setdefault(pair, []).append(node_id)
    ordered = sorted(pair_members.values(), key=min)
    labels: dict[str, int] = {}
    for group, members in enumerate(ordered):
        for node_id in members:
            labels[node_id] = group
    return GroupLabeling({n: labels[n] for n in a.labels}, GroupKind.COMBINED)


def trivial_labeling(net: Network) -> GroupLabeling:
    """Single group containing every node (no awareness constraints)."""
    return GroupLabeling({n: 0 for n in net.node_ids}, GroupKind.COMBINED)
