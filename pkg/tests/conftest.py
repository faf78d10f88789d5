"""Shared generators and helpers for the test suite.

All randomness is seeded through numpy Generators so every test is
reproducible; node/edge ids are zero-padded so lexicographic order equals
creation order.
"""

from __future__ import annotations

import string

import numpy as np
import pytest

from netreduce import Edge, EdgeKind, Network, Node, build_network

VOLTAGES = (220.0, 380.0)


def rand_text(rng: np.random.Generator, length: int = 5) -> str:
    letters = rng.choice(list(string.ascii_lowercase), size=length)
    return "t_" + "".join(letters)


def rand_properties(rng: np.random.Generator, numeric=("load",), texts=("zone",)) -> dict:
    props = {}
    for name in numeric:
        if rng.random() < 0.8:
            props[name] = float(np.round(rng.uniform(1.0, 100.0), 6))
    for name in texts:
        if rng.random() < 0.5:
            props[name] = rand_text(rng)
    if rng.random() < 0.3:
        props["active"] = bool(rng.random() < 0.5)
    return props


def random_generic_network(rng: np.random.Generator, n: int = 12, extra_edges: int | None = None,
                           with_coords: bool = True) -> Network:
    nodes = []
    for i in range(n):
        lon = float(np.round(rng.uniform(-10, 20), 6)) if with_coords else None
        lat = float(np.round(rng.uniform(35, 60), 6)) if with_coords else None
        nodes.append(Node(f"n{i:03d}", lon=lon, lat=lat, properties=rand_properties(rng)))
    edges = []
    if extra_edges is None:
        extra_edges = n
    eid = 0
    for _ in range(extra_edges):
        i, j = rng.choice(n, size=2, replace=False)
        edges.append(Edge(f"e{eid:03d}", f"n{i:03d}", f"n{j:03d}",
                          properties=rand_properties(rng, numeric=("weight",), texts=())))
        eid += 1
    return build_network(nodes, edges)


def random_power_grid(
    rng: np.random.Generator,
    n: int = 20,
    islands: int = 2,
    voltages: tuple[float, ...] = VOLTAGES,
    parallel_prob: float = 0.15,
    extra_edge_factor: float = 0.6,
) -> Network:
    """Multi-island grid: AC-connected islands coupled only by DC links.

    Every island is a random spanning tree plus extra chords; edges between
    equal voltage levels are AC lines, between different levels transformers.
    """
    islands = max(1, min(islands, n // 2))
    sizes = [n // islands] * islands
    for i in range(n % islands):
        sizes[i] += 1

    nodes = []
    node_island = []
    idx = 0
    for island, size in enumerate(sizes):
        for _ in range(size):
            nodes.append(
                Node(
                    f"b{idx:03d}",
                    lon=float(np.round(rng.uniform(-10, 20), 6)),
                    lat=float(np.round(rng.uniform(35, 60), 6)),
                    voltage_level=float(voltages[int(rng.integers(len(voltages)))]),
                    properties=rand_properties(rng),
                )
            )
            node_island.append(island)
            idx += 1

    edges = []
    eid = 0

    def ac_edge(i: int, j: int):
        nonlocal eid
        same_voltage = nodes[i].voltage_level == nodes[j].voltage_level
        kind = EdgeKind.AC_LINE if same_voltage else EdgeKind.TRANSFORMER
        edges.append(
            Edge(
                f"e{eid:03d}",
                f"b{i:03d}",
                f"b{j:03d}",
                kind,
                r=float(np.round(rng.uniform(0.001, 0.05), 8)),
                x=float(np.round(rng.uniform(0.01, 0.5), 8)),
                s_nom=float(np.round(rng.uniform(50, 500), 6)),
            )
        )
        eid += 1

    start = 0
    anchors = []
    for island, size in enumerate(sizes):
        members = list(range(start, start + size))
        for offset in range(1, size):
            partner = members[int(rng.integers(offset))]
            ac_edge(members[offset], partner)
        chords = int(size * extra_edge_factor)
        for _ in range(chords):
            i, j = rng.choice(members, size=2, replace=False)
            ac_edge(int(i), int(j))
            if rng.random() < parallel_prob:
                ac_edge(int(i), int(j))  # parallel circuit, same pair and voltage rule
        anchors.append(members[0])
        start += size

    for island in range(1, islands):
        kind = EdgeKind.DC_LINK if rng.random() < 0.5 else EdgeKind.CONVERTER
        edges.append(
            Edge(
                f"e{eid:03d}",
                f"b{anchors[island - 1]:03d}",
                f"b{anchors[island]:03d}",
                kind,
                p_nom=float(np.round(rng.uniform(100, 1000), 6)),
            )
        )
        eid += 1

    return build_network(nodes, edges)


def random_masked_matrix(rng: np.random.Generator, n: int, groups: int):
    """Random finite symmetric matrix plus a random total group labeling."""
    points = rng.uniform(0, 100, size=(n, 2))
    diff = points[:, None, :] - points[None, :, :]
    d = np.sqrt((diff**2).sum(axis=2))
    labels = rng.integers(groups, size=n)
    labels[rng.choice(n, size=groups, replace=False)] = np.arange(groups)  # every group nonempty
    return d, labels


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)


def triangle_grid(voltage: float = 380.0) -> Network:
    """Three buses in an equal-reactance AC triangle (the hand-checkable fixture)."""
    nodes = [
        Node("b1", lon=0.0, lat=0.0, voltage_level=voltage),
        Node("b2", lon=1.0, lat=0.0, voltage_level=voltage),
        Node("b3", lon=0.5, lat=1.0, voltage_level=voltage),
    ]
    edges = [
        Edge("l12", "b1", "b2", EdgeKind.AC_LINE, x=0.1, s_nom=100.0),
        Edge("l13", "b1", "b3", EdgeKind.AC_LINE, x=0.1, s_nom=100.0),
        Edge("l23", "b2", "b3", EdgeKind.AC_LINE, x=0.1, s_nom=100.0),
    ]
    return build_network(nodes, edges)
