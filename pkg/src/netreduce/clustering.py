"""Deterministic clustering algorithms over precomputed matrices.

All four algorithms share the package's reproducibility contract: ties
break toward the smallest index, every random draw flows from an explicit
seed, and +inf distance entries are respected as hard separation (a
cluster never crosses an infinity block).
"""

from __future__ import annotations

import numpy as np

from .errors import InfeasibleClusterCount, InvalidK

Labels = np.ndarray


def _check_k(k: int | None, n: int) -> int:
    if k is None:
        raise InvalidK("cluster count k is required for this algorithm")
    k = int(k)
    if not 1 <= k <= n:
        raise InvalidK(f"k={k} outside valid range [1, {n}]")
    return k


def finite_blocks(d: np.ndarray) -> list[list[int]]:
    """Connected components over finite off-diagonal entries, by smallest member."""
    n = d.shape[0]
    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    finite = np.isfinite(d)
    for i in range(n):
        row = np.nonzero(finite[i, i + 1:])[0]
        for j in row + i + 1:
            ri, rj = find(i), find(int(j))
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)
    blocks: dict[int, list[int]] = {}
    for i in range(n):
        blocks.setdefault(find(i), []).append(i)
    return [blocks[root] for root in sorted(blocks)]


# --- k-means ---------------------------------------------------------------

def _plusplus_init(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = points.shape[0]
    centers = np.empty((k, points.shape[1]))
    first = int(rng.integers(n))
    centers[0] = points[first]
    d2 = np.sum((points - centers[0]) ** 2, axis=1)
    for j in range(1, k):
        total = float(d2.sum())
        if total > 0.0:
            idx = int(rng.choice(n, p=d2 / total))
        else:
            idx = int(rng.integers(n))
        centers[j] = points[idx]
        d2 = np.minimum(d2, np.sum((points - centers[j]) ** 2, axis=1))
    return centers


def _sq_distances(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    d2 = (
        np.sum(points**2, axis=1)[:, None]
        + np.sum(centers**2, axis=1)[None, :]
        - 2.0 * points @ centers.T
    )
    return np.clip(d2, 0.0, None)


def kmeans(
    points: np.ndarray,
    k: int,
    seed: int = 0,
    max_iter: int = 300,
    wcss_trace: list[float] | None = None,
) -> Labels:
    """Lloyd iterations from k-means++ seeding.

    Empty clusters are repaired by moving the point farthest from its
    centroid; the within-cluster sum of squares is non-increasing across
    iterations (appended to ``wcss_trace`` when given).
    """
    points = np.asarray(points, dtype=float)
    n = points.shape[0]
    k = _check_k(k, n)
    rng = np.random.default_rng(seed)
    centers = _plusplus_init(points, k, rng)
    labels = np.full(n, -1)
    prev_wcss = np.inf
    for _ in range(max_iter):
        d2 = _sq_distances(points, centers)
        new_labels = np.argmin(d2, axis=1)

        counts = np.bincount(new_labels, minlength=k)
        for empty in np.nonzero(counts == 0)[0]:
            member_dist = d2[np.arange(n), new_labels]
            # only steal from clusters that keep at least one member
            stealable = counts[new_labels] > 1
            candidates = np.where(stealable, member_dist, -np.inf)
            farthest = int(np.argmax(candidates))
            counts[new_labels[farthest]] -= 1
            new_labels[farthest] = empty
            counts[empty] += 1

        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for c in range(k):
            centers[c] = points[labels == c].mean(axis=0)
        wcss = float(np.sum((points - centers[labels]) ** 2))
        assert wcss <= prev_wcss + 1e-9 * max(1.0, abs(prev_wcss) if np.isfinite(prev_wcss) else 1.0)
        prev_wcss = wcss
        if wcss_trace is not None:
            wcss_trace.append(wcss)
    return labels


# --- k-medoids (PAM) -------------------------------------------------------

# deeper exchange scans are only attempted while the combination count per
# block stays below this, so tiny blocks are solved exactly and large ones
# fall back to plain single-swap PAM
_ESCAPE_BUDGET = 20_000


def kmedoids(d: np.ndarray, k: int, seed: int = 0, max_iter: int = 300) -> Labels:
    """PAM: greedy BUILD then best-improvement SWAP on a precomputed matrix.

    BUILD places one medoid per infinity-separated block first (so total
    cost stays finite), then adds greedily by global cost reduction. SWAP
    exchanges medoids within their block, escalating to two- and
    three-exchanges (budget-guarded per block) when single swaps converge;
    this removes the shallow local optima plain PAM is prone to on small
    instances. Cross-block exchanges are never explored: infinity blocks
    are independent sub-problems by construction. The seed is accepted for
    interface symmetry; the procedure is fully deterministic and the total
    cost is non-increasing across exchanges.
    """
    d = np.asarray(d, dtype=float)
    n = d.shape[0]
    k = _check_k(k, n)
    blocks = finite_blocks(d)
    if k < len(blocks):
        raise InfeasibleClusterCount(
            f"k={k} is below the {len(blocks)} infinity-separated blocks; "
            "some node would have infinite cost"
        )
    block_of = np.empty(n, dtype=int)
    for bi, members in enumerate(blocks):
        block_of[members] = bi

    medoids: list[int] = []
    for block in blocks:
        idx = np.asarray(block)
        totals = d[np.ix_(idx, idx)].sum(axis=1)
        medoids.append(int(idx[int(np.argmin(totals))]))

    is_medoid = np.zeros(n, dtype=bool)
    is_medoid[medoids] = True
    nearest = d[:, medoids].min(axis=1)
    while len(medoids) < k:
        candidates = np.nonzero(~is_medoid)[0]
        newcosts = np.minimum(nearest[:, None], d[:, candidates]).sum(axis=0)
        chosen = int(candidates[int(np.argmin(newcosts))])
        medoids.append(chosen)
        is_medoid[chosen] = True
        nearest = np.minimum(nearest, d[:, chosen])

    cost = float(nearest.sum())
    for _ in range(max_iter):
        candidates = np.nonzero(~is_medoid)[0]
        if candidates.size == 0:
            break
        swap = _best_single_swap(d, medoids, candidates, cost, block_of)
        if swap is None:
            for depth in (2, 3):
                swap = _best_exchange(d, medoids, candidates, cost, block_of, depth)
                if swap is not None:
                    break
        if swap is None:
            break
        cost = swap[0]
        for mi, h in swap[1]:
            is_medoid[medoids[mi]] = False
            is_medoid[h] = True
            medoids[mi] = h

    return np.argmin(d[:, medoids], axis=1)


def _best_single_swap(d, medoids, candidates, cost, block_of):
    best_cost = cost
    best = None
    for mi, m in enumerate(medoids):
        local = candidates[block_of[candidates] == block_of[m]]
        if local.size == 0:
            continue
        others = medoids[:mi] + medoids[mi + 1:]
        dist_others = d[:, others].min(axis=1) if others else np.full(d.shape[0], np.inf)
        newcosts = np.minimum(dist_others[:, None], d[:, local]).sum(axis=0)
        pos = int(np.argmin(newcosts))
        if newcosts[pos] < best_cost:
            best_cost = float(newcosts[pos])
            best = (best_cost, [(mi, int(local[pos]))])
    return best


def _best_exchange(d, medoids, candidates, cost, block_of, depth):
    from itertools import combinations
    from math import comb

    best_cost = cost
    best = None
    for block in sorted(set(block_of[medoids].tolist())):
        meds = [mi for mi, m in enumerate(medoids) if block_of[m] == block]
        local = [int(h) for h in candidates if block_of[h] == block]
        if len(meds) < depth or len(local) < depth:
            continue
        if comb(len(meds), depth) * comb(len(local), depth) > _ESCAPE_BUDGET:
            continue
        for m_combo in combinations(meds, depth):
            removed = set(m_combo)
            others = [m for mi, m in enumerate(medoids) if mi not in removed]
            dist_others = d[:, others].min(axis=1) if others else np.full(d.shape[0], np.inf)
            for h_combo in combinations(local, depth):
                newcost = float(
                    np.minimum(dist_others, d[:, h_combo].min(axis=1)).sum()
                )
                if newcost < best_cost:
                    best_cost = newcost
                    best = (best_cost, list(zip(m_combo, h_combo)))
    return best


# --- DBSCAN ----------------------------------------------------------------

def dbscan(d: np.ndarray, eps: float, min_pts: int) -> tuple[Labels, list[int]]:
    """Density clustering over a precomputed matrix; assignment is total.

    Core points (neighborhood size >= min_pts, self included) form
    clusters as components of the core graph, ordered by smallest member.
    Border points join the cluster of their smallest-index core neighbor.
    Noise points become singleton clusters appended afterwards; their
    indices are returned alongside the labels.
    """
    d = np.asarray(d, dtype=float)
    if eps <= 0:
        raise ValueError(f"eps must be > 0, got {eps}")
    if min_pts < 1:
        raise ValueError(f"min_pts must be >= 1, got {min_pts}")
    n = d.shape[0]
    within = d <= eps
    core = within.sum(axis=1) >= min_pts
    labels = np.full(n, -1)
    cluster = 0
    for i in range(n):
        if not core[i] or labels[i] != -1:
            continue
        labels[i] = cluster
        queue = [i]
        while queue:
            current = queue.pop(0)
            for j in np.nonzero(within[current] & core & (labels == -1))[0]:
                labels[j] = cluster
                queue.append(int(j))
        cluster += 1
    for i in range(n):
        if core[i]:
            continue
        reachable = np.nonzero(within[i] & core)[0]
        if reachable.size:
            labels[i] = labels[reachable[0]]
    noise = [i for i in range(n) if labels[i] == -1]
    for i in noise:
        labels[i] = cluster
        cluster += 1
    return labels, noise


# --- agglomerative (Lance-Williams) -----------------------------------------

LINKAGES = ("single", "complete", "average", "ward")


def agglomerative(d: np.ndarray, k: int, linkage: str) -> Labels:
    """Bottom-up merging of the minimum-dissimilarity pair until k clusters.

    Ties break toward the lexicographically smallest pair of smallest
    member indices. A required merge across an infinity block raises
    InfeasibleClusterCount.
    """
    if linkage not in LINKAGES:
        raise ValueError(f"unknown linkage '{linkage}' (expected one of {', '.join(LINKAGES)})")
    d = np.asarray(d, dtype=float)
    n = d.shape[0]
    k = _check_k(k, n)

    # slot i holds the cluster whose smallest member is i
    w = d.astype(float).copy()
    if linkage == "ward":
        w = w**2
    np.fill_diagonal(w, np.inf)
    active = np.ones(n, dtype=bool)
    size = np.ones(n)
    slot_of = np.arange(n)

    for _ in range(n - k):
        masked = np.where(active[:, None] & active[None, :], w, np.inf)
        flat = int(np.argmin(masked))
        a, b = divmod(flat, n)
        if not np.isfinite(masked[a, b]):
            raise InfeasibleClusterCount(
                f"cannot reach {k} clusters: remaining merges cross an infinity block"
            )
        if a > b:
            a, b = b, a
        others = active.copy()
        others[a] = others[b] = False
        idx = np.nonzero(others)[0]
        if linkage == "single":
            merged = np.minimum(w[a, idx], w[b, idx])
        elif linkage == "complete":
            merged = np.maximum(w[a, idx], w[b, idx])
        elif linkage == "average":
            merged = (size[a] * w[a, idx] + size[b] * w[b, idx]) / (size[a] + size[b])
        else:  # ward, on squared dissimilarities
            total = size[a] + size[b] + size[idx]
            merged = (
                (size[a] + size[idx]) * w[a, idx]
                + (size[b] + size[idx]) * w[b, idx]
                - size[idx] * w[a, b]
            ) / total
        w[a, idx] = merged
        w[idx, a] = merged
        w[b, :] = np.inf
        w[:, b] = np.inf
        size[a] += size[b]
        active[b] = False
        slot_of[slot_of == b] = a

    remaining = np.nonzero(active)[0]
    dense = {int(slot): i for i, slot in enumerate(remaining)}
    return np.asarray([dense[int(slot)] for slot in slot_of])


# --- proportional budget over groups ----------------------------------------

def allocate_cluster_budget(group_sizes: list[int], k: int) -> list[int]:
    """Largest-remainder apportionment of k across groups, floor 1, cap size."""
    sizes = [int(s) for s in group_sizes]
    if any(s < 1 for s in sizes):
        raise InvalidK("group sizes must all be >= 1")
    total = sum(sizes)
    groups = len(sizes)
    if k < groups:
        raise InfeasibleClusterCount(f"k={k} is below the {groups} groups (each needs >= 1 cluster)")
    if k > total:
        raise InvalidK(f"k={k} exceeds the {total} nodes")
    quota = [k * s / total for s in sizes]
    alloc = [max(1, min(sizes[g], int(quota[g]))) for g in range(groups)]
    assigned = sum(alloc)
    while assigned < k:
        eligible = [g for g in range(groups) if alloc[g] < sizes[g]]
        g = max(eligible, key=lambda g: (quota[g] - alloc[g], -g))
        alloc[g] += 1
        assigned += 1
    while assigned > k:
        eligible = [g for g in range(groups) if alloc[g] > 1]
        g = max(eligible, key=lambda g: (alloc[g] - quota[g], -g))
        alloc[g] -= 1
        assigned -= 1
    return alloc
