"""Distance structures consumed by partitioning.

Two families: geographical (haversine great-circle, km) and electrical
(Euclidean distance between PTDF branch-flow signatures from a DC power
flow). Cross-group separation is encoded as +inf matrix entries, which is
what makes voltage- and island-awareness algorithm-agnostic for any
distance-based method.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import (
    DomainMismatch,
    MissingCoordinates,
    NotAnIsland,
    SingularSystem,
    UnknownNodeId,
)
from .network import AC_KINDS, Network, connected_components
from .preprocess import GroupLabeling, detect_ac_islands

EARTH_RADIUS_KM = 6371.0088


class DistanceFamily(str, Enum):
    GEOGRAPHICAL = "geographical"
    ELECTRICAL = "electrical"


@dataclass(frozen=True)
class DistanceMatrix:
    """Symmetric nonnegative matrix over ``order``; +inf marks separated groups."""

    order: tuple[str, ...]
    d: np.ndarray
    family: DistanceFamily

    def __post_init__(self):
        n = len(self.order)
        if self.d.shape != (n, n):
            raise ValueError(f"distance matrix shape {self.d.shape} does not match {n} ids")
        if np.isnan(self.d).any():
            raise ValueError("distance matrix contains NaN")
        finite = self.d[np.isfinite(self.d)]
        if finite.size and finite.min() < 0:
            raise ValueError("distance matrix contains negative entries")
        if np.diagonal(self.d).any():
            raise ValueError("distance matrix diagonal must be zero")
        if not np.array_equal(self.d, self.d.T):
            raise ValueError("distance matrix must be symmetric")


@dataclass(frozen=True)
class PtdfMatrix:
    """Branch x node DC sensitivity matrix for one AC island.

    Entry (e, i) is the MW flow on branch e per MW injected at node i and
    withdrawn at the slack node; the slack column is all zeros.
    """

    branch_order: tuple[str, ...]
    node_order: tuple[str, ...]
    slack: str
    m: np.ndarray


@dataclass(frozen=True)
class FeatureMatrix:
    """Per-node coordinate rows used by centroid-based algorithms."""

    order: tuple[str, ...]
    rows: np.ndarray
    group: GroupLabeling | None = None


def _require_coords(net: Network) -> tuple[np.ndarray, np.ndarray]:
    lons, lats = [], []
    for node in net.nodes:
        if node.lon is None:
            raise MissingCoordinates(f"node '{node.id}' has no coordinates")
        lons.append(node.lon)
        lats.append(node.lat)
    return np.asarray(lons, dtype=float), np.asarray(lats, dtype=float)


def geo_distance_matrix(net: Network) -> DistanceMatrix:
    """Pairwise haversine great-circle distances in km."""
    lons, lats = _require_coords(net)
    lon = np.radians(lons)
    lat = np.radians(lats)
    dlat = lat[:, None] - lat[None, :]
    dlon = lon[:, None] - lon[None, :]
    h = np.sin(dlat / 2.0) ** 2 + np.cos(lat)[:, None] * np.cos(lat)[None, :] * np.sin(dlon / 2.0) ** 2
    d = 2.0 * EARTH_RADIUS_KM * np.arcsin(np.sqrt(np.clip(h, 0.0, 1.0)))
    d = (d + d.T) / 2.0
    np.fill_diagonal(d, 0.0)
    return DistanceMatrix(net.node_ids, d, DistanceFamily.GEOGRAPHICAL)


def compute_ptdf(net: Network, island: set[str], slack: str) -> PtdfMatrix:
    """DC power-flow PTDF for one AC island.

    Builds the nodal susceptance matrix B = A^T diag(1/x) A over the
    island's AC branches, removes the slack row/column, and solves densely.
    Branches are oriented from the lower- to the higher-positioned endpoint
    in the island node order.
    """
    for node_id in island:
        if not net.has_node(node_id):
            raise UnknownNodeId(f"unknown node id '{node_id}'")
    if slack not in island:
        raise NotAnIsland(f"slack '{slack}' is not part of the island")
    node_order = tuple(n for n in net.node_ids if n in island)
    position = {node_id: i for i, node_id in enumerate(node_order)}
    branches = [
        e for e in net.edges
        if e.kind in AC_KINDS and e.u in island and e.v in island
    ]

    n = len(node_order)
    if n > 1:
        sub_components = connected_components_over(branches, node_order)
        if len(sub_components) > 1:
            raise NotAnIsland(f"node set splits into {len(sub_components)} AC components")

    m = np.zeros((len(branches), n))
    if not branches:
        return PtdfMatrix((), node_order, slack, m)

    incidence = np.zeros((len(branches), n))
    susceptance = np.empty(len(branches))
    for row, edge in enumerate(branches):
        iu, iv = position[edge.u], position[edge.v]
        lo, hi = (iu, iv) if iu < iv else (iv, iu)
        incidence[row, lo] = 1.0
        incidence[row, hi] = -1.0
        susceptance[row] = 1.0 / edge.x

    b_nodal = (incidence.T * susceptance) @ incidence
    slack_pos = position[slack]
    keep = [i for i in range(n) if i != slack_pos]
    b_red = b_nodal[np.ix_(keep, keep)]
    weighted = susceptance[:, None] * incidence[:, keep]
    try:
        ptdf_red = np.linalg.solve(b_red, weighted.T).T
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(f"singular susceptance system for island around '{slack}'") from exc
    m[:, keep] = ptdf_red
    return PtdfMatrix(tuple(e.id for e in branches), node_order, slack, m)


def connected_components_over(branches, node_order: tuple[str, ...]) -> list[set[str]]:
    """Components of the given branch list over the given nodes."""
    adj: dict[str, list[str]] = {n: [] for n in node_order}
    for edge in branches:
        adj[edge.u].append(edge.v)
        adj[edge.v].append(edge.u)
    seen: set[str] = set()
    components = []
    for start in node_order:
        if start in seen:
            continue
        stack = [start]
        seen.add(start)
        component = {start}
        while stack:
            for neighbor in adj[stack.pop()]:
                if neighbor not in seen:
                    seen.add(neighbor)
                    component.add(neighbor)
                    stack.append(neighbor)
        components.append(component)
    return components


def default_slack(net: Network, island: set[str]) -> str:
    """Highest AC-branch degree in the island, ties to the smallest node id."""
    degree = {node_id: 0 for node_id in island}
    for edge in net.edges:
        if edge.kind in AC_KINDS and edge.u in island and edge.v in island:
            degree[edge.u] += 1
            degree[edge.v] += 1
    return min(degree, key=lambda node_id: (-degree[node_id], node_id))


def electrical_distance_matrix(net: Network) -> DistanceMatrix:
    """Euclidean distance between PTDF columns; +inf across AC islands."""
    order = net.node_ids
    position = {node_id: i for i, node_id in enumerate(order)}
    n = len(order)
    d = np.full((n, n), np.inf)
    np.fill_diagonal(d, 0.0)
    islands = detect_ac_islands(net)
    for members in islands.members():
        if len(members) < 2:
            continue
        island = set(members)
        ptdf = compute_ptdf(net, island, default_slack(net, island))
        cols = ptdf.m.T  # node rows
        sq = np.sum(cols**2, axis=1)
        block = sq[:, None] + sq[None, :] - 2.0 * (cols @ cols.T)
        block = np.sqrt(np.clip(block, 0.0, None))
        block = (block + block.T) / 2.0
        np.fill_diagonal(block, 0.0)
        idx = [position[node_id] for node_id in ptdf.node_order]
        d[np.ix_(idx, idx)] = block
    return DistanceMatrix(order, d, DistanceFamily.ELECTRICAL)


def apply_infinity_mask(m: DistanceMatrix, g: GroupLabeling) -> DistanceMatrix:
    """Set entries between nodes of different groups to +inf; idempotent."""
    if set(m.order) != set(g.labels):
        raise DomainMismatch("distance matrix and labeling cover different node sets")
    labels = np.asarray([g.labels[node_id] for node_id in m.order])
    different = labels[:, None] != labels[None, :]
    d = np.where(different, np.inf, m.d)
    return DistanceMatrix(m.order, d, m.family)


def feature_matrix(net: Network, family: DistanceFamily) -> FeatureMatrix:
    """Coordinate rows for centroid-based algorithms.

    Geographical: equirectangular projection to km (the centroid of raw
    lon/lat degrees would be distorted away from the equator). Electrical:
    PTDF columns stacked on a per-island block axis, zero elsewhere.
    """
    if family is DistanceFamily.GEOGRAPHICAL:
        lons, lats = _require_coords(net)
        mean_lat = math.radians(float(np.mean(lats))) if len(lats) else 0.0
        scale = math.pi / 180.0 * EARTH_RADIUS_KM
        rows = np.column_stack((lons * math.cos(mean_lat) * scale, lats * scale))
        return FeatureMatrix(net.node_ids, rows)

    order = net.node_ids
    position = {node_id: i for i, node_id in enumerate(order)}
    islands = detect_ac_islands(net)
    ptdfs = []
    total_branches = 0
    for members in islands.members():
        if len(members) < 2:
            continue
        island = set(members)
        ptdf = compute_ptdf(net, island, default_slack(net, island))
        ptdfs.append((total_branches, ptdf))
        total_branches += len(ptdf.branch_order)
    rows = np.zeros((len(order), total_branches))
    for offset, ptdf in ptdfs:
        width = len(ptdf.branch_order)
        for col, node_id in enumerate(ptdf.node_order):
            rows[position[node_id], offset:offset + width] = ptdf.m[:, col]
    return FeatureMatrix(order, rows, islands)


def _format_cell(value: float) -> str:
    if math.isinf(value):
        return "inf"
    return repr(float(value))


def dump_distance_csv(m: DistanceMatrix, path) -> None:
    """Debug dump: header row/column of node ids, +inf written as "inf"."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["id", *m.order])
        for node_id, row in zip(m.order, m.d):
            writer.writerow([node_id, *(_format_cell(v) for v in row)])


def dump_ptdf_csv(p: PtdfMatrix, path) -> None:
    """Debug dump: branch rows by node columns."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["branch", *p.node_order])
        for branch_id, row in zip(p.branch_order, p.m):
            writer.writerow([branch_id, *(_format_cell(v) for v in row)])
