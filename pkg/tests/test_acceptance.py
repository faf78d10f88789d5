"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Tolerances are fixed here, not calibrated: PTDF flow conservation 1e-8,
triangle flows 1e-9, conservation of ratings/loads 1e-9 relative,
equivalent reactance 1e-12, awareness violations zero, decoupled runs
byte-identical, the 6800-node scale case under 60 s.
"""

from __future__ import annotations

import shutil
import time

import numpy as np
import pytest

from netreduce import (
    Edge,
    EdgeKind,
    DistanceFamily,
    DistanceMatrix,
    Node,
    StrategySpec,
    aggregate,
    apply_infinity_mask,
    build_network,
    compute_ptdf,
    detect_ac_islands,
    export_csv,
    group_by_voltage,
    load_config,
    load_csv,
    partition,
)
from netreduce.clustering import agglomerative, dbscan, kmeans, kmedoids
from netreduce.distance import default_slack
from netreduce.pipeline import (
    aggregate_from_busmap,
    load_input,
    run_partition,
    run_pipeline,
    write_busmap,
)
from netreduce.preprocess import GroupKind, GroupLabeling, combine_labelings

from conftest import random_generic_network, random_masked_matrix, random_power_grid, triangle_grid
from oracles import (
    brute_force_kmedoids_cost,
    dc_injection_flows,
    mst_single_linkage,
    naive_dbscan,
)

ALL_ALGORITHMS = (
    "kmeans",
    "kmedoids",
    "dbscan",
    "agglomerative-single",
    "agglomerative-complete",
    "agglomerative-average",
    "agglomerative-ward",
)


def report(criterion: str, failures: list):
    status = "PASS" if not failures else "FAIL"
    print(f"[{status}] {criterion}")
    assert not failures, f"{criterion}: first failures: {failures[:5]}"


# --- criterion: PTDF oracle ---------------------------------------------------

def test_acceptance_ptdf_oracle():
    failures = []
    rng = np.random.default_rng(101)
    for case in range(50):
        net = random_power_grid(rng, n=int(rng.integers(2, 51)), islands=1)
        island = set(net.node_ids)
        ptdf = compute_ptdf(net, island, default_slack(net, island))
        pos = {n: i for i, n in enumerate(ptdf.node_order)}
        incidence = np.zeros((len(ptdf.branch_order), len(ptdf.node_order)))
        for row, branch_id in enumerate(ptdf.branch_order):
            edge = net.edge(branch_id)
            iu, iv = pos[edge.u], pos[edge.v]
            lo, hi = (iu, iv) if iu < iv else (iv, iu)
            incidence[row, lo] = 1.0
            incidence[row, hi] = -1.0
        for i, node_id in enumerate(ptdf.node_order):
            expected = np.zeros(len(ptdf.node_order))
            if node_id != ptdf.slack:
                expected[i] = 1.0
                expected[pos[ptdf.slack]] = -1.0
            residual = np.abs(incidence.T @ ptdf.m[:, i] - expected).max()
            if residual > 1e-8:
                failures.append(f"case {case} node {node_id}: residual {residual:.2e}")

    net = triangle_grid()
    ptdf = compute_ptdf(net, {"b1", "b2", "b3"}, "b3")
    flows = dict(zip(ptdf.branch_order, ptdf.m[:, 0]))
    oracle = dc_injection_flows(net, ["b1", "b2", "b3"], "b3", "b1")
    for branch, expected in (("l12", 1 / 3), ("l13", 2 / 3), ("l23", 1 / 3)):
        if abs(flows[branch] - expected) > 1e-9:
            failures.append(f"triangle {branch}: {flows[branch]} != {expected}")
        if abs(flows[branch] - oracle[branch]) > 1e-9:
            failures.append(f"triangle {branch} vs dense solve: {flows[branch]} != {oracle[branch]}")
    report("PTDF oracle (A^T f = e_i - e_slack @1e-8; triangle flows @1e-9)", failures)


# --- criterion: clustering oracles ---------------------------------------------

def test_acceptance_kmedoids_brute_force():
    failures = []
    rng = np.random.default_rng(202)
    for case in range(60):
        n = int(rng.integers(3, 9))
        pts = rng.uniform(0, 10, size=(n, 2))
        d = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2))
        for k in range(1, min(3, n) + 1):
            labels = kmedoids(d, k)
            cost = 0.0
            for cluster in set(labels.tolist()):
                members = np.nonzero(labels == cluster)[0]
                cost += float(d[np.ix_(members, members)].sum(axis=0).min())
            best = brute_force_kmedoids_cost(d, k)
            if abs(cost - best) > 1e-9:
                failures.append(f"case {case} n={n} k={k}: {cost} != optimum {best}")
    report("k-medoids equals brute-force optimum (n<=8, k<=3)", failures)


def test_acceptance_dbscan_naive():
    failures = []
    rng = np.random.default_rng(303)
    for case in range(100):
        n = int(rng.integers(2, 101))
        pts = rng.uniform(0, 50, size=(n, 2))
        d = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2))
        eps = float(rng.uniform(1.0, 12.0))
        min_pts = int(rng.integers(1, 6))
        labels, _ = dbscan(d, eps, min_pts)
        if not np.array_equal(labels, naive_dbscan(d, eps, min_pts)):
            failures.append(f"case {case} n={n} eps={eps:.2f} min_pts={min_pts}")
    report("DBSCAN equals naive reimplementation (100 instances, n<=100)", failures)


def test_acceptance_single_linkage_mst():
    failures = []
    rng = np.random.default_rng(404)
    for case in range(50):
        n = int(rng.integers(2, 51))
        pts = rng.uniform(0, 100, size=(n, 2))
        d = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2))
        k = int(rng.integers(1, n + 1))
        if not np.array_equal(agglomerative(d, k, "single"), mst_single_linkage(d, k)):
            failures.append(f"case {case} n={n} k={k}")
    report("single linkage equals MST cut (50 instances, n<=50)", failures)


def test_acceptance_kmeans_wcss_monotone():
    failures = []
    rng = np.random.default_rng(505)
    for case in range(50):
        n = int(rng.integers(2, 120))
        pts = rng.uniform(0, 100, size=(n, 2))
        k = int(rng.integers(1, n + 1))
        trace: list[float] = []
        kmeans(pts, k, seed=int(rng.integers(10_000)), wcss_trace=trace)
        for i, (a, b) in enumerate(zip(trace, trace[1:])):
            if b > a + 1e-9 * max(1.0, a):
                failures.append(f"case {case}: iteration {i + 1} rose {a} -> {b}")
    report("k-means WCSS non-increasing every Lloyd iteration", failures)


# --- criterion: awareness invariants ----------------------------------------------

def test_acceptance_awareness_invariants():
    failures = []
    rng = np.random.default_rng(606)
    for case in range(100):
        net = random_power_grid(
            rng,
            n=int(rng.integers(10, 37)),
            islands=int(rng.integers(2, 4)),
            voltages=(110.0, 220.0, 380.0),
        )
        voltage = group_by_voltage(net)
        islands = detect_ac_islands(net)
        combined = combine_labelings(voltage, islands)
        family = DistanceFamily.ELECTRICAL if case % 3 == 0 else DistanceFamily.GEOGRAPHICAL
        k = min(net.node_count, combined.group_count + int(rng.integers(0, 5)))
        eps = float(rng.uniform(0.2, 2.0)) if family is DistanceFamily.ELECTRICAL else float(
            rng.uniform(100.0, 900.0)
        )
        for algorithm in ALL_ALGORITHMS:
            spec = StrategySpec(
                algorithm,
                family=family,
                voltage_aware=True,
                island_aware=True,
                k=k,
                eps=eps,
                min_pts=2,
                seed=case,
            )
            result = partition(net, spec)
            clusters: dict[int, list[str]] = {}
            for node_id, cluster in result.assignment.items():
                clusters.setdefault(cluster, []).append(node_id)
            for cluster, members in clusters.items():
                if len({voltage.labels[m] for m in members}) > 1:
                    failures.append(f"case {case} {algorithm}: cluster {cluster} mixes voltages")
                if len({islands.labels[m] for m in members}) > 1:
                    failures.append(f"case {case} {algorithm}: cluster {cluster} spans islands")
    report("awareness invariants (100 networks x 7 algorithms, zero violations)", failures)


# --- criterion: masking equivalence -------------------------------------------------

def _cluster_sets(labels: np.ndarray) -> set[frozenset]:
    return {
        frozenset(int(i) for i in np.nonzero(labels == cluster)[0])
        for cluster in set(labels.tolist())
    }


def test_acceptance_masking_equivalence():
    failures = []
    rng = np.random.default_rng(707)
    linkages = ("single", "complete", "average", "ward")
    for case in range(50):
        n = int(rng.integers(8, 41))
        groups = int(rng.integers(2, 5))
        d, labels = random_masked_matrix(rng, n, groups)
        masked = np.where(labels[:, None] != labels[None, :], np.inf, d)
        group_members = [np.nonzero(labels == g)[0] for g in range(groups)]

        k = int(rng.integers(groups, min(n, groups + 6) + 1))

        def compare(name, full_labels, runner):
            full_sets = _cluster_sets(full_labels)
            local_sets: set[frozenset] = set()
            for members in group_members:
                sub_labels = runner(members, full_labels)
                for cluster in set(sub_labels.tolist()):
                    local_sets.add(
                        frozenset(int(members[i]) for i in np.nonzero(sub_labels == cluster)[0])
                    )
            if full_sets != local_sets:
                failures.append(f"case {case} {name}")

        full = kmedoids(masked, k)
        compare(
            "kmedoids",
            full,
            lambda members, full_labels: kmedoids(
                d[np.ix_(members, members)], len({int(full_labels[i]) for i in members})
            ),
        )

        linkage = linkages[case % 4]
        full = agglomerative(masked, k, linkage)
        compare(
            f"agglomerative-{linkage}",
            full,
            lambda members, full_labels: agglomerative(
                d[np.ix_(members, members)],
                len({int(full_labels[i]) for i in members}),
                linkage,
            ),
        )

        finite = d[np.isfinite(d) & (d > 0)]
        eps = float(np.quantile(finite, 0.2))
        min_pts = int(rng.integers(1, 5))
        full, _ = dbscan(masked, eps, min_pts)
        compare(
            "dbscan",
            full,
            lambda members, full_labels: dbscan(d[np.ix_(members, members)], eps, min_pts)[0],
        )
    report("masking equivalence (masked full matrix == per-group runs, 50 instances)", failures)


# --- criterion: conservation ----------------------------------------------------------

def test_acceptance_conservation():
    failures = []
    rng = np.random.default_rng(808)
    for case in range(100):
        net = random_power_grid(
            rng,
            n=int(rng.integers(6, 201)),
            islands=int(rng.integers(1, 4)),
            parallel_prob=0.3,
        )
        combined = combine_labelings(group_by_voltage(net), detect_ac_islands(net))
        k = min(net.node_count, combined.group_count + int(rng.integers(0, 4)))
        result = partition(
            net, StrategySpec("kmeans", voltage_aware=True, island_aware=True, k=k, seed=case)
        )
        reduced, membership = aggregate(net, result, "power-grid")

        total_load = sum(n.properties.get("load", 0.0) for n in net.nodes)
        reduced_load = sum(n.properties.get("load", 0.0) for n in reduced.nodes)
        if abs(reduced_load - total_load) > 1e-9 * max(1.0, abs(total_load)):
            failures.append(f"case {case}: load {reduced_load} != {total_load}")

        for agg_edge in reduced.edges:
            members = [net.edge(i) for i in membership.edge_members[agg_edge.id]]
            member_s = [e.s_nom for e in members if e.s_nom is not None]
            if member_s:
                expected = sum(member_s)
                if abs(agg_edge.s_nom - expected) > 1e-9 * max(1.0, abs(expected)):
                    failures.append(f"case {case} {agg_edge.id}: s_nom {agg_edge.s_nom} != {expected}")
            member_x = [e.x for e in members if e.x is not None]
            if member_x and agg_edge.kind in (EdgeKind.AC_LINE, EdgeKind.TRANSFORMER):
                expected = 1.0 / sum(1.0 / x for x in member_x)
                if abs(agg_edge.x - expected) > 1e-12 * max(1.0, abs(expected)):
                    failures.append(f"case {case} {agg_edge.id}: x {agg_edge.x} != {expected}")
    report("conservation (s_nom per pair+kind, total load @1e-9; x_eq @1e-12)", failures)


# --- criterion: two-stage decoupling -----------------------------------------------------

RUN_CONFIG = """
[input]
loader = "csv-power-grid"
[input.params]
dir = "grid"

[preprocess]
consolidate_parallel = {consolidate}

[partition]
algorithm = "{algorithm}"
family = "{family}"
voltage_aware = {voltage_aware}
{k_line}
{eps_lines}
seed = {seed}

[aggregation]
profile = "{profile}"

[output]
busmap = "out/busmap.csv"
network_dir = "out/network"
membership = "out/membership.json"
"""


def _read_outputs(out_dir):
    outputs = {}
    for path in sorted(out_dir.rglob("*")):
        if path.is_file() and path.name != "busmap.meta.json":  # sidecar holds wall_time
            outputs[str(path.relative_to(out_dir))] = path.read_bytes()
    return outputs


def test_acceptance_two_stage_decoupling(tmp_path):
    failures = []
    rng = np.random.default_rng(909)
    algorithms = list(ALL_ALGORITHMS)
    for case in range(20):
        net = random_power_grid(
            rng, n=int(rng.integers(8, 40)), islands=int(rng.integers(1, 3)), parallel_prob=0.3
        )
        base = tmp_path / f"case{case}"
        export_csv(net, base / "grid")
        algorithm = algorithms[case % len(algorithms)]
        voltage_aware = bool(case % 2)
        combined = combine_labelings(group_by_voltage(net), detect_ac_islands(net))
        k = min(net.node_count, combined.group_count + int(rng.integers(0, 4)))
        family = "electrical" if case % 5 == 0 and algorithm != "kmeans" else "geographical"
        eps = 1.5 if family == "electrical" else float(rng.uniform(200.0, 900.0))
        text = RUN_CONFIG.format(
            consolidate="true" if case % 3 else "false",
            algorithm=algorithm,
            family=family,
            voltage_aware="true" if voltage_aware else "false",
            k_line="" if algorithm == "dbscan" else f"k = {k}",
            eps_lines=f"eps = {eps}\nmin_pts = 2" if algorithm == "dbscan" else "",
            seed=case,
            profile="power-grid" if case % 2 else "generic",
        )
        config_path = base / "pipeline.toml"
        config_path.write_text(text, encoding="utf-8")
        config = load_config(config_path)

        run_pipeline(config)
        run_outputs = _read_outputs(base / "out")
        shutil.rmtree(base / "out")

        net_loaded = load_input(config)
        result = run_partition(config, net_loaded)
        write_busmap(config, result)
        aggregate_from_busmap(config, config.busmap_path)
        split_outputs = _read_outputs(base / "out")

        if run_outputs != split_outputs:
            differing = [
                name
                for name in set(run_outputs) | set(split_outputs)
                if run_outputs.get(name) != split_outputs.get(name)
            ]
            failures.append(f"case {case} ({algorithm}): differs in {differing}")
    report("two-stage decoupling (run == partition + aggregate, byte-identical, 20 configs)", failures)


# --- criterion: scale -----------------------------------------------------------------------

def build_scale_network(n_nodes=6800, n_edges=17500, cols=80, rows=85):
    assert cols * rows == n_nodes
    nodes = []
    for row in range(rows):
        for col in range(cols):
            i = row * cols + col
            nodes.append(
                Node(
                    f"b{i:05d}",
                    lon=-10.0 + col * 0.4,
                    lat=35.0 + row * 0.28,
                    voltage_level=380.0 if row < rows // 2 else 220.0,
                    properties={"load": float((i * 13) % 97 + 1)},
                )
            )
    edges = []

    def add_edge(a_row, a_col, b_row, b_col):
        a = a_row * cols + a_col
        b = b_row * cols + b_col
        same_voltage = nodes[a].voltage_level == nodes[b].voltage_level
        kind = EdgeKind.AC_LINE if same_voltage else EdgeKind.TRANSFORMER
        edges.append(
            Edge(
                f"e{len(edges):05d}",
                f"b{a:05d}",
                f"b{b:05d}",
                kind,
                x=0.05 + (len(edges) % 13) * 0.01,
                s_nom=100.0 + (len(edges) % 7) * 50.0,
            )
        )

    for row in range(rows):
        for col in range(cols - 1):
            add_edge(row, col, row, col + 1)
    for row in range(rows - 1):
        for col in range(cols):
            add_edge(row, col, row + 1, col)
    for row in range(rows - 1):
        for col in range(cols - 1):
            if len(edges) >= n_edges:
                break
            add_edge(row, col, row + 1, col + 1)
        if len(edges) >= n_edges:
            break
    assert len(edges) == n_edges
    return build_network(nodes, edges)


def test_acceptance_scale():
    failures = []
    net = build_scale_network()
    assert net.node_count == 6800
    assert net.edge_count == 17500
    started = time.perf_counter()
    result = partition(
        net, StrategySpec("kmeans", voltage_aware=True, k=100, seed=0)
    )
    reduced, _ = aggregate(net, result, "power-grid")
    elapsed = time.perf_counter() - started
    if reduced.node_count != 100:
        failures.append(f"aggregated to {reduced.node_count} nodes, expected 100")
    if result.cluster_count != 100:
        failures.append(f"{result.cluster_count} clusters, expected 100")
    if elapsed >= 60.0:
        failures.append(f"took {elapsed:.1f}s, budget 60s")
    print(f"  scale case: partition+aggregate of 6800/17500 took {elapsed:.2f}s")
    report("scale (6800 nodes / 17500 edges, voltage-aware kmeans k=100, < 60 s)", failures)


# --- criterion: round-trip ---------------------------------------------------------------------

def test_acceptance_round_trip(tmp_path):
    failures = []
    rng = np.random.default_rng(111)
    for case in range(100):
        if case % 2:
            net = random_power_grid(
                rng,
                n=int(rng.integers(4, 60)),
                islands=int(rng.integers(1, 4)),
                parallel_prob=0.4,
            )
        else:
            net = random_generic_network(
                rng, n=int(rng.integers(2, 40)), with_coords=bool(rng.random() < 0.8)
            )
        directory = tmp_path / f"case{case}"
        export_csv(net, directory)
        if load_csv(directory) != net:
            failures.append(f"case {case}")
    report("round-trip (CSV export -> load structural equality, 100 networks)", failures)
