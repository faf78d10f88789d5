"""Three-tier aggregation: topology, optional domain transforms, property rules.

Tier 1 creates one representative node per cluster and one edge per
inter-cluster (pair, kind) combination. Tier 2 applies user transforms to
the skeleton. Tier 3 reduces member properties onto the skeleton under a
declarative profile; the result is a fully validated network.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Mapping, Union

from .errors import (
    ConfigError,
    NonPositiveForParallel,
    PartitionDomainMismatch,
    ReducerTypeMismatch,
    UnknownEdgeId,
    UnknownNodeId,
    UnknownProperty,
    UnknownStrategy,
    UnknownTransform,
)
from .network import (
    ELECTRICAL_FIELDS,
    Edge,
    EdgeKind,
    Network,
    Node,
    PropertyValue,
    _provisional_edge,
    check_property_value,
)
from .partition import PartitionResult
from .registry import Registry

DEFAULT_PREFIX = "agg_"


@dataclass
class Membership:
    """Bookkeeping between tiers: which originals stand behind each aggregate."""

    node_members: dict[int, list[str]]
    edge_members: dict[str, list[str]]
    dropped_edges: list[str]

    def to_dict(self) -> dict:
        return {
            "clusters": {str(cid): ids for cid, ids in self.node_members.items()},
            "aggregated_edges": dict(self.edge_members),
            "dropped_edges": list(self.dropped_edges),
        }


def save_membership(membership: Membership, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(membership.to_dict(), indent=2) + "\n", encoding="utf-8")


# --- reducers ----------------------------------------------------------------

@dataclass(frozen=True)
class Reducer:
    """Named reduction over member property values; weighted_mean carries its weight."""

    name: str
    weight: str | None = None


SUM = Reducer("sum")
MEAN = Reducer("mean")
MIN = Reducer("min")
MAX = Reducer("max")
FIRST = Reducer("first")
COUNT = Reducer("count")
CONCAT_UNIQUE = Reducer("concat_unique")
PARALLEL_EQUIVALENT = Reducer("parallel_equivalent")

BUILTIN_REDUCERS = frozenset(
    {"sum", "mean", "weighted_mean", "min", "max", "first", "count",
     "concat_unique", "parallel_equivalent"}
)

_REDUCERS: Registry[Callable[[list], PropertyValue]] = Registry("reducer")


def register_reducer(name: str, fn: Callable[[list], PropertyValue]) -> None:
    """Make a custom reducer available to profiles by name."""
    if name in BUILTIN_REDUCERS:
        raise UnknownStrategy(f"'{name}' is a built-in reducer name")
    _REDUCERS.register(name, fn)


def weighted_mean(weight: str) -> Reducer:
    return Reducer("weighted_mean", weight)


def _numbers(name: str, reducer: Reducer, values: list) -> list[float]:
    out = []
    for value in values:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ReducerTypeMismatch(
                f"reducer '{reducer.name}' on '{name}' requires numbers, got {value!r}"
            )
        out.append(float(value))
    return out


def apply_reducer(
    reducer: Reducer,
    name: str,
    values: list,
    weights: list | None = None,
) -> PropertyValue | None:
    """Reduce the present values of one property; None means \"leave absent\"."""
    if reducer.name == "sum":
        return sum(_numbers(name, reducer, values))
    if reducer.name == "mean":
        numbers = _numbers(name, reducer, values)
        return sum(numbers) / len(numbers)
    if reducer.name == "weighted_mean":
        numbers = _numbers(name, reducer, values)
        pairs = [
            (v, float(w))
            for v, w in zip(numbers, weights or [])
            if w is not None and not isinstance(w, (str, bool))
        ]
        total = sum(w for _, w in pairs)
        if not pairs or total == 0:
            return None
        return sum(v * w for v, w in pairs) / total
    if reducer.name == "min":
        return min(_numbers(name, reducer, values))
    if reducer.name == "max":
        return max(_numbers(name, reducer, values))
    if reducer.name == "first":
        return values[0]
    if reducer.name == "count":
        return float(len(values))
    if reducer.name == "concat_unique":
        texts = []
        for value in values:
            if not isinstance(value, str):
                raise ReducerTypeMismatch(
                    f"reducer 'concat_unique' on '{name}' requires text, got {value!r}"
                )
            if value not in texts:
                texts.append(value)
        return ",".join(texts)
    if reducer.name == "parallel_equivalent":
        numbers = _numbers(name, reducer, values)
        if any(v <= 0 for v in numbers):
            raise NonPositiveForParallel(
                f"parallel_equivalent on '{name}' requires strictly positive values"
            )
        return 1.0 / sum(1.0 / v for v in numbers)
    return _REDUCERS.get(reducer.name)(values)


# --- profiles -----------------------------------------------------------------

@dataclass
class AggregationProfile:
    """Declarative property -> reducer map for the third tier."""

    name: str
    node_rules: dict[str, Reducer] = field(default_factory=dict)
    edge_rules: dict[tuple[EdgeKind, str], Reducer] = field(default_factory=dict)
    default_numeric: Reducer = SUM
    default_text: Reducer = FIRST


def validate_profile(profile: AggregationProfile) -> None:
    reducers = [
        *profile.node_rules.values(),
        *profile.edge_rules.values(),
        profile.default_numeric,
        profile.default_text,
    ]
    for reducer in reducers:
        if reducer.name not in BUILTIN_REDUCERS and reducer.name not in _REDUCERS:
            raise UnknownStrategy(f"unknown reducer '{reducer.name}' in profile '{profile.name}'")
        if reducer.name == "weighted_mean" and not reducer.weight:
            raise ConfigError(f"weighted_mean in profile '{profile.name}' needs a weight property")


def builtin_profiles() -> list[AggregationProfile]:
    """The two pre-defined profiles: "generic" and "power-grid".

    Representative-node coordinates are averaged by the topology tier in
    both. The power-grid profile combines AC branches as parallel circuits
    (equivalent reactance/resistance, summed ratings) and sums DC ratings.
    """
    generic = AggregationProfile(name="generic")
    edge_rules: dict[tuple[EdgeKind, str], Reducer] = {}
    for kind in (EdgeKind.AC_LINE, EdgeKind.TRANSFORMER):
        edge_rules[(kind, "x")] = PARALLEL_EQUIVALENT
        edge_rules[(kind, "r")] = PARALLEL_EQUIVALENT
        edge_rules[(kind, "s_nom")] = SUM
        edge_rules[(kind, "length")] = weighted_mean("s_nom")
    for kind in (EdgeKind.CONVERTER, EdgeKind.DC_LINK):
        edge_rules[(kind, "p_nom")] = SUM
    power_grid = AggregationProfile(name="power-grid", edge_rules=edge_rules)
    return [generic, power_grid]


_PROFILES: Registry[AggregationProfile] = Registry("aggregation profile")
for _profile in builtin_profiles():
    _PROFILES.register(_profile.name, _profile)


def register_profile(profile: AggregationProfile) -> None:
    validate_profile(profile)
    _PROFILES.register(profile.name, profile)


def get_profile(name: str) -> AggregationProfile:
    return _PROFILES.get(name)


# --- tier 1: topology ----------------------------------------------------------

def aggregate_topology(
    net: Network,
    partition: Union[PartitionResult, Mapping[str, int]],
    prefix: str = DEFAULT_PREFIX,
) -> tuple[Network, Membership]:
    """Build the skeleton: one node per cluster, one edge per (pair, kind).

    Node coordinates become the member centroid (absent if any member lacks
    coordinates); voltage level is kept only when unique among members.
    Edge properties stay unset for tier 3; intra-cluster edges are dropped.
    """
    assignment = partition.assignment if isinstance(partition, PartitionResult) else dict(partition)
    if set(assignment) != set(net.node_ids):
        missing = set(net.node_ids) - set(assignment)
        extra = set(assignment) - set(net.node_ids)
        raise PartitionDomainMismatch(
            f"busmap does not match the network ({len(missing)} missing, {len(extra)} unknown ids)"
        )

    node_members: dict[int, list[str]] = {}
    for node_id in net.node_ids:
        node_members.setdefault(int(assignment[node_id]), []).append(node_id)
    node_members = dict(sorted(node_members.items()))

    nodes: list[Node] = []
    for cid, members in node_members.items():
        member_nodes = [net.node(i) for i in members]
        coords = [n.coords for n in member_nodes]
        lon = lat = None
        if all(c is not None for c in coords):
            lon = sum(c[0] for c in coords) / len(coords)
            lat = sum(c[1] for c in coords) / len(coords)
        voltages = {n.voltage_level for n in member_nodes}
        voltage = voltages.pop() if len(voltages) == 1 else None
        nodes.append(Node(id=f"{prefix}{cid}", lon=lon, lat=lat, voltage_level=voltage))

    crossing: dict[tuple[int, int, EdgeKind], list[str]] = {}
    dropped: list[str] = []
    for edge in net.edges:
        cu, cv = int(assignment[edge.u]), int(assignment[edge.v])
        if cu == cv:
            dropped.append(edge.id)
            continue
        a, b = (cu, cv) if cu < cv else (cv, cu)
        crossing.setdefault((a, b, edge.kind), []).append(edge.id)

    edges: list[Edge] = []
    edge_members: dict[str, list[str]] = {}
    for (a, b, kind) in sorted(crossing, key=lambda key: (key[0], key[1], key[2].value)):
        members = crossing[(a, b, kind)]
        agg_id = f"{prefix}{a}_{b}_{kind.value}"
        edges.append(
            _provisional_edge(
                agg_id, f"{prefix}{a}", f"{prefix}{b}", kind,
                properties={"member_count": float(len(members))},
            )
        )
        edge_members[agg_id] = members

    skeleton = Network(nodes, edges, net.metadata, _trusted=True)
    return skeleton, Membership(node_members, edge_members, dropped)


# --- tier 2: domain transforms ---------------------------------------------------

@dataclass(frozen=True)
class DomainTransform:
    name: str
    params: dict[str, PropertyValue] = field(default_factory=dict)


TransformFn = Callable[[Network, Mapping[str, PropertyValue]], Network]

_TRANSFORMS: Registry[TransformFn] = Registry("domain transform")


def register_transform(name: str, fn: TransformFn) -> None:
    _TRANSFORMS.register(name, fn)


def _find_target(net: Network, target: str) -> tuple[str, Union[Node, Edge]]:
    if net.has_node(target):
        return "node", net.node(target)
    if net.has_edge(target):
        return "edge", net.edge(target)
    raise UnknownEdgeId(f"no node or edge with id '{target}'")


def _param(params: Mapping[str, PropertyValue], name: str) -> PropertyValue:
    if name not in params:
        raise ConfigError(f"transform parameter '{name}' is required")
    return params[name]


def _with_edge_field(edge: Edge, name: str, value) -> Edge:
    fields = {f: getattr(edge, f) for f in ELECTRICAL_FIELDS}
    if name in ELECTRICAL_FIELDS:
        if isinstance(value, (str, bool)):
            raise ConfigError(f"edge field '{name}' must be a number, got {value!r}")
        fields[name] = float(value)
        properties = edge.properties
    else:
        properties = dict(edge.properties)
        properties[name] = check_property_value(name, value)
    return _provisional_edge(edge.id, edge.u, edge.v, edge.kind, properties, **fields)


def _with_node_field(node: Node, name: str, value) -> Node:
    if name == "v_nom":
        return replace(node, voltage_level=float(value))
    properties = dict(node.properties)
    properties[name] = check_property_value(name, value)
    return replace(node, properties=properties)


def _transform_add_edge(net: Network, params: Mapping[str, PropertyValue]) -> Network:
    params = dict(params)
    u = str(_param(params, "u"))
    v = str(_param(params, "v"))
    del params["u"], params["v"]
    kind_raw = str(params.pop("kind", EdgeKind.GENERIC.value))
    try:
        kind = EdgeKind(kind_raw)
    except ValueError:
        raise ConfigError(f"unknown edge kind '{kind_raw}'") from None
    for endpoint in (u, v):
        if not net.has_node(endpoint):
            raise UnknownNodeId(f"add_edge endpoint '{endpoint}' does not exist")
    edge_id = str(params.pop("id", "")) or f"added_{u}_{v}_{kind.value}"
    electrical = {f: float(params.pop(f)) for f in ELECTRICAL_FIELDS if f in params}
    edge = Edge(id=edge_id, u=u, v=v, kind=kind, properties=params, **electrical)
    return Network(net.nodes, [*net.edges, edge], net.metadata)


def _transform_set_property(net: Network, params: Mapping[str, PropertyValue]) -> Network:
    target = str(_param(params, "target"))
    name = str(_param(params, "name"))
    value = _param(params, "value")
    role, item = _find_target(net, target)
    if role == "node":
        nodes = [_with_node_field(n, name, value) if n.id == target else n for n in net.nodes]
        return Network(nodes, net.edges, net.metadata, _trusted=True)
    edges = [_with_edge_field(e, name, value) if e.id == target else e for e in net.edges]
    return Network(net.nodes, edges, net.metadata, _trusted=True)


def _scale_value(item: Union[Node, Edge], name: str, target: str):
    if isinstance(item, Edge) and name in ELECTRICAL_FIELDS:
        current = getattr(item, name)
    elif isinstance(item, Node) and name == "v_nom":
        current = item.voltage_level
    else:
        current = item.properties.get(name)
    if current is None or isinstance(current, (str, bool)):
        raise UnknownProperty(f"'{target}' has no numeric property '{name}' to scale")
    return current


def _transform_scale_property(net: Network, params: Mapping[str, PropertyValue]) -> Network:
    target = str(_param(params, "target"))
    name = str(_param(params, "name"))
    factor = _param(params, "factor")
    if isinstance(factor, (str, bool)):
        raise ConfigError(f"scale factor must be a number, got {factor!r}")
    _, item = _find_target(net, target)
    scaled = _scale_value(item, name, target) * float(factor)
    return _transform_set_property(net, {"target": target, "name": name, "value": scaled})


_TRANSFORMS.register("add_edge", _transform_add_edge)
_TRANSFORMS.register("set_property", _transform_set_property)
_TRANSFORMS.register("scale_property", _transform_scale_property)


def apply_domain_transforms(net: Network, transforms: list[DomainTransform]) -> Network:
    """Apply transforms in list order; empty list is the identity."""
    for transform in transforms:
        if transform.name not in _TRANSFORMS:
            raise UnknownTransform(f"unknown domain transform '{transform.name}'")
        net = _TRANSFORMS.get(transform.name)(net, transform.params)
    return net


# --- tier 3: property aggregation ------------------------------------------------

def _rule_for(value, explicit: Reducer | None, profile: AggregationProfile) -> Reducer:
    if explicit is not None:
        return explicit
    if isinstance(value, bool) or isinstance(value, str):
        return profile.default_text
    return profile.default_numeric


def _edge_value(edge: Edge, name: str):
    if name in ELECTRICAL_FIELDS:
        return getattr(edge, name)
    return edge.properties.get(name)


def _property_union(items: list[Mapping[str, PropertyValue]]) -> list[str]:
    seen: list[str] = []
    for props in items:
        for name in props:
            if name not in seen:
                seen.append(name)
    return seen


def aggregate_properties(
    skeleton: Network,
    membership: Membership,
    source: Network,
    profile: AggregationProfile,
    prefix: str = DEFAULT_PREFIX,
) -> Network:
    """Reduce member properties onto the skeleton; returns a validated network.

    Electrical fields are addressed through the reserved names "r", "x",
    "s_nom", and "p_nom"; reducers skip members where a value is absent.
    """
    validate_profile(profile)

    nodes: list[Node] = []
    reduced_nodes: dict[str, Node] = {}
    for cid, member_ids in membership.node_members.items():
        agg_id = f"{prefix}{cid}"
        members = [source.node(i) for i in member_ids]
        properties = dict(skeleton.node(agg_id).properties)
        for name in _property_union([m.properties for m in members]):
            values = [m.properties[name] for m in members if name in m.properties]
            rule = _rule_for(values[0], profile.node_rules.get(name), profile)
            weights = None
            if rule.name == "weighted_mean":
                weights = [
                    m.properties.get(rule.weight)
                    for m in members
                    if name in m.properties
                ]
            result = apply_reducer(rule, name, values, weights)
            if result is not None:
                properties[name] = result
        reduced_nodes[agg_id] = replace(skeleton.node(agg_id), properties=properties)
    for node in skeleton.nodes:
        nodes.append(reduced_nodes.get(node.id, node))

    edges: list[Edge] = []
    for edge in skeleton.edges:
        member_ids = membership.edge_members.get(edge.id)
        if not member_ids:
            edges.append(edge)
            continue
        members = [source.edge(i) for i in member_ids]
        electrical: dict[str, float | None] = {}
        for name in ELECTRICAL_FIELDS:
            values = [getattr(m, name) for m in members if getattr(m, name) is not None]
            if not values:
                electrical[name] = None
                continue
            rule = _rule_for(values[0], profile.edge_rules.get((edge.kind, name)), profile)
            weights = None
            if rule.name == "weighted_mean":
                weights = [
                    _edge_value(m, rule.weight)
                    for m in members
                    if getattr(m, name) is not None
                ]
            electrical[name] = apply_reducer(rule, name, values, weights)
        properties = dict(edge.properties)
        for name in _property_union([m.properties for m in members]):
            values = [m.properties[name] for m in members if name in m.properties]
            rule = _rule_for(values[0], profile.edge_rules.get((edge.kind, name)), profile)
            weights = None
            if rule.name == "weighted_mean":
                weights = [
                    _edge_value(m, rule.weight)
                    for m in members
                    if name in m.properties
                ]
            result = apply_reducer(rule, name, values, weights)
            if result is not None:
                properties[name] = result
        edges.append(
            Edge(id=edge.id, u=edge.u, v=edge.v, kind=edge.kind, properties=properties, **electrical)
        )

    return Network(nodes, edges, source.metadata)


def aggregate(
    net: Network,
    partition: Union[PartitionResult, Mapping[str, int]],
    profile: Union[AggregationProfile, str] = "generic",
    transforms: list[DomainTransform] | None = None,
    prefix: str = DEFAULT_PREFIX,
) -> tuple[Network, Membership]:
    """Run all three aggregation tiers and return the reduced network."""
    if isinstance(profile, str):
        profile = get_profile(profile)
    skeleton, membership = aggregate_topology(net, partition, prefix)
    skeleton = apply_domain_transforms(skeleton, list(transforms or []))
    reduced = aggregate_properties(skeleton, membership, net, profile, prefix)
    return reduced, membership
