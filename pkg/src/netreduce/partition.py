"""Partitioning stage: strategy registry, awareness orchestration, results.

The orchestrator never mutates the input network. Awareness (voltage
levels, AC islands) is applied either by infinity-masking the distance
matrix (matrix-based algorithms) or by running independently per group
with a proportional cluster budget (coordinate-based algorithms such as
k-means, where masking does not literally apply).
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Mapping, Union

from . import clustering
from .distance import (
    DistanceFamily,
    DistanceMatrix,
    FeatureMatrix,
    apply_infinity_mask,
    electrical_distance_matrix,
    feature_matrix,
    geo_distance_matrix,
)
from .errors import (
    ConfigError,
    FileNotFound,
    InvalidK,
    IoError,
    MissingColumn,
    StrategyContractViolation,
)
from .network import AC_KINDS, Network
from .preprocess import (
    GroupLabeling,
    combine_labelings,
    detect_ac_islands,
    group_by_voltage,
    trivial_labeling,
)
from .registry import Registry

BUILTIN_ALGORITHMS = (
    "kmeans",
    "kmedoids",
    "dbscan",
    "agglomerative-single",
    "agglomerative-complete",
    "agglomerative-average",
    "agglomerative-ward",
)

_K_REQUIRED = frozenset(a for a in BUILTIN_ALGORITHMS if a != "dbscan")


@dataclass(frozen=True)
class StrategySpec:
    """Declarative description of one partitioning run."""

    algorithm: str
    family: DistanceFamily = DistanceFamily.GEOGRAPHICAL
    voltage_aware: bool = False
    island_aware: bool | None = None  # None resolves to True for power grids
    k: int | None = None
    eps: float | None = None
    min_pts: int | None = None
    seed: int = 0
    max_iter: int = 300


@dataclass(frozen=True)
class GroupStat:
    group: int
    node_count: int
    cluster_count: int


@dataclass
class PartitionResult:
    """Total node-to-cluster mapping plus strategy metadata (the busmap)."""

    assignment: dict[str, int]
    strategy: StrategySpec | None
    cluster_count: int
    noise_singletons: list[str] = field(default_factory=list)
    group_breakdown: list[GroupStat] = field(default_factory=list)
    wall_time: float = 0.0

    def clusters(self) -> dict[int, list[str]]:
        """Member ids per cluster, members in assignment order."""
        out: dict[int, list[str]] = {}
        for node_id, cluster in self.assignment.items():
            out.setdefault(cluster, []).append(node_id)
        return out


# assignment values may be any hashable label; the orchestrator re-indexes
RawAssignment = Union[dict, tuple]
PartitionerFn = Callable[[Union[DistanceMatrix, FeatureMatrix], StrategySpec], RawAssignment]


@dataclass(frozen=True)
class _Partitioner:
    fn: PartitionerFn
    input_form: str  # "matrix" | "features"


_PARTITIONERS: Registry[_Partitioner] = Registry("partitioning strategy")


def register_partitioner(name: str, fn: PartitionerFn, input_form: str = "matrix") -> None:
    """Register a custom strategy; ``input_form`` declares what it consumes."""
    if input_form not in ("matrix", "features"):
        raise ConfigError(f"input_form must be 'matrix' or 'features', got '{input_form}'")
    _PARTITIONERS.register(name, _Partitioner(fn, input_form))


def _kmeans_adapter(fm: FeatureMatrix, spec: StrategySpec) -> dict[str, int]:
    labels = clustering.kmeans(fm.rows, spec.k, spec.seed, spec.max_iter)
    return {node_id: int(label) for node_id, label in zip(fm.order, labels)}


def _kmedoids_adapter(dm: DistanceMatrix, spec: StrategySpec) -> dict[str, int]:
    labels = clustering.kmedoids(dm.d, spec.k, spec.seed, spec.max_iter)
    return {node_id: int(label) for node_id, label in zip(dm.order, labels)}


def _dbscan_adapter(dm: DistanceMatrix, spec: StrategySpec):
    labels, noise = clustering.dbscan(dm.d, spec.eps, spec.min_pts)
    assignment = {node_id: int(label) for node_id, label in zip(dm.order, labels)}
    return assignment, [dm.order[i] for i in noise]


def _make_agglomerative_adapter(linkage: str):
    def adapter(dm: DistanceMatrix, spec: StrategySpec) -> dict[str, int]:
        labels = clustering.agglomerative(dm.d, spec.k, linkage)
        return {node_id: int(label) for node_id, label in zip(dm.order, labels)}

    return adapter


register_partitioner("kmeans", _kmeans_adapter, "features")
register_partitioner("kmedoids", _kmedoids_adapter, "matrix")
register_partitioner("dbscan", _dbscan_adapter, "matrix")
for _linkage in ("single", "complete", "average", "ward"):
    register_partitioner(f"agglomerative-{_linkage}", _make_agglomerative_adapter(_linkage), "matrix")


def resolve_island_aware(spec: StrategySpec, net: Network) -> bool:
    if spec.island_aware is not None:
        return spec.island_aware
    return net.is_power_grid()


def _validate_spec(net: Network, spec: StrategySpec) -> None:
    if spec.algorithm not in _PARTITIONERS:
        _PARTITIONERS.get(spec.algorithm)  # raises UnknownStrategy with the known list
    if spec.algorithm in _K_REQUIRED or (
        spec.algorithm not in BUILTIN_ALGORITHMS and spec.k is not None
    ):
        if spec.k is None:
            raise InvalidK(f"algorithm '{spec.algorithm}' requires k")
        if not 1 <= spec.k <= net.node_count:
            raise InvalidK(f"k={spec.k} outside valid range [1, {net.node_count}]")
    if spec.algorithm == "dbscan":
        if spec.eps is None or spec.min_pts is None:
            raise ConfigError("dbscan requires both eps and min_pts")
        if spec.eps <= 0:
            raise ConfigError(f"eps must be > 0, got {spec.eps}")
        if spec.min_pts < 1:
            raise ConfigError(f"min_pts must be >= 1, got {spec.min_pts}")
    if spec.family is DistanceFamily.ELECTRICAL and not any(
        e.kind in AC_KINDS for e in net.edges
    ):
        if net.node_count > 1:
            raise ConfigError("electrical family requires a network with AC branches")


def _grouping(net: Network, spec: StrategySpec, island_aware: bool) -> GroupLabeling:
    labelings = []
    if spec.voltage_aware:
        labelings.append(group_by_voltage(net))
    if island_aware:
        labelings.append(detect_ac_islands(net))
    if not labelings:
        return trivial_labeling(net)
    combined = labelings[0]
    for other in labelings[1:]:
        combined = combine_labelings(combined, other)
    return combined


def _normalize(raw: RawAssignment, expected: tuple[str, ...], name: str):
    if isinstance(raw, tuple):
        assignment, noise = raw
    else:
        assignment, noise = raw, []
    if set(assignment) != set(expected):
        raise StrategyContractViolation(
            f"strategy '{name}' returned a non-total assignment "
            f"({len(assignment)} of {len(expected)} nodes)"
        )
    return assignment, list(noise)


def _reindex(assignment: Mapping[str, object]) -> tuple[dict[str, int], int]:
    """Dense cluster ids 0..C-1, clusters ordered by smallest member node id."""
    members: dict[object, list[str]] = {}
    for node_id, label in assignment.items():
        members.setdefault(label, []).append(node_id)
    ordered = sorted(members.values(), key=min)
    mapping: dict[str, int] = {}
    for cluster, ids in enumerate(ordered):
        for node_id in ids:
            mapping[node_id] = cluster
    return mapping, len(ordered)


def partition(net: Network, spec: StrategySpec) -> PartitionResult:
    """Run one partitioning strategy with awareness orchestration.

    Matrix-based algorithms see the family distance matrix with cross-group
    entries masked to +inf; feature-based algorithms run once per group
    with a proportional share of k. Cluster ids are re-indexed densely,
    ordered by smallest member node id.
    """
    started = time.perf_counter()
    _validate_spec(net, spec)
    entry = _PARTITIONERS.get(spec.algorithm)
    island_aware = resolve_island_aware(spec, net)
    grouping = _grouping(net, spec, island_aware)

    raw_assignment: dict[str, object] = {}
    noise: list[str] = []

    if entry.input_form == "matrix":
        if spec.family is DistanceFamily.GEOGRAPHICAL:
            matrix = geo_distance_matrix(net)
        else:
            matrix = electrical_distance_matrix(net)
        masked = apply_infinity_mask(matrix, grouping)
        assignment, noise = _normalize(entry.fn(masked, spec), masked.order, spec.algorithm)
        raw_assignment = dict(assignment)
    else:
        fm = feature_matrix(net, spec.family)
        group_members = grouping.members()
        if grouping.group_count <= 1:
            assignment, noise = _normalize(entry.fn(fm, spec), fm.order, spec.algorithm)
            raw_assignment = dict(assignment)
        else:
            position = {node_id: i for i, node_id in enumerate(fm.order)}
            budgets = (
                clustering.allocate_cluster_budget([len(m) for m in group_members], spec.k)
                if spec.k is not None
                else [None] * len(group_members)
            )
            for group, members in enumerate(group_members):
                rows = fm.rows[[position[n] for n in members]]
                sub_fm = FeatureMatrix(tuple(members), rows)
                sub_spec = replace(spec, k=budgets[group]) if spec.k is not None else spec
                assignment, sub_noise = _normalize(
                    entry.fn(sub_fm, sub_spec), sub_fm.order, spec.algorithm
                )
                for node_id, label in assignment.items():
                    raw_assignment[node_id] = (group, label)
                noise.extend(sub_noise)

    final, cluster_count = _reindex(raw_assignment)
    final = {node_id: final[node_id] for node_id in net.node_ids}

    _check_awareness(final, grouping, spec.algorithm)

    breakdown = []
    for group, members in enumerate(grouping.members()):
        clusters_in_group = {final[node_id] for node_id in members}
        breakdown.append(GroupStat(group, len(members), len(clusters_in_group)))

    return PartitionResult(
        assignment=final,
        strategy=replace(spec, island_aware=island_aware),
        cluster_count=cluster_count,
        noise_singletons=sorted(noise),
        group_breakdown=breakdown,
        wall_time=time.perf_counter() - started,
    )


def _check_awareness(final: dict[str, int], grouping: GroupLabeling, name: str) -> None:
    cluster_group: dict[int, int] = {}
    for node_id, cluster in final.items():
        group = grouping.labels[node_id]
        if cluster_group.setdefault(cluster, group) != group:
            raise StrategyContractViolation(
                f"strategy '{name}' produced a cluster crossing awareness groups"
            )


# --- busmap persistence ------------------------------------------------------

def save_busmap(result: PartitionResult, path) -> None:
    """Write the busmap CSV plus a JSON metadata sidecar next to it."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["node_id", "cluster_id"])
        for node_id, cluster in result.assignment.items():
            writer.writerow([node_id, cluster])
    metadata = {
        "strategy": _spec_to_dict(result.strategy),
        "node_count": len(result.assignment),
        "cluster_count": result.cluster_count,
        "noise_singletons": result.noise_singletons,
        "group_breakdown": [
            {"group": s.group, "nodes": s.node_count, "clusters": s.cluster_count}
            for s in result.group_breakdown
        ],
        "wall_time": result.wall_time,
    }
    sidecar = path.with_suffix(".meta.json")
    sidecar.write_text(json.dumps(metadata, indent=2) + "\n", encoding="utf-8")


def _spec_to_dict(spec: StrategySpec | None) -> dict | None:
    if spec is None:
        return None
    return {
        "algorithm": spec.algorithm,
        "family": spec.family.value,
        "voltage_aware": spec.voltage_aware,
        "island_aware": spec.island_aware,
        "k": spec.k,
        "eps": spec.eps,
        "min_pts": spec.min_pts,
        "seed": spec.seed,
        "max_iter": spec.max_iter,
    }


def load_busmap(path) -> dict[str, int]:
    path = Path(path)
    if not path.is_file():
        raise FileNotFound(f"busmap file not found: {path}")
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        header = reader.fieldnames or []
        for column in ("node_id", "cluster_id"):
            if column not in header:
                raise MissingColumn(f"busmap is missing column '{column}'")
        assignment: dict[str, int] = {}
        for row in reader:
            try:
                assignment[row["node_id"]] = int(row["cluster_id"])
            except (TypeError, ValueError):
                raise IoError(
                    f"busmap row for '{row['node_id']}' has non-integer cluster_id "
                    f"{row['cluster_id']!r}"
                ) from None
    return assignment
