"""Independent brute-force oracles used to validate the library.

These deliberately take different routes from the implementations under
test: SCCs via Floyd-Warshall transitive closure instead of Tarjan,
PageRank/HITS via dense matrix power iteration instead of sparse scatter
sums, clustering via triple enumeration.
"""

from __future__ import annotations

import numpy as np


def random_arcs(rng, n: int, p: float) -> list[tuple[int, int]]:
    """Erdos-Renyi style arc set without self-loops, deterministic per rng."""
    return [
        (u, v)
        for u in range(n)
        for v in range(n)
        if u != v and rng.random() < p
    ]


def scc_by_reachability(n: int, arcs: list[tuple[int, int]]) -> tuple[list[int], list[int]]:
    """Mutual-reachability SCCs via Floyd-Warshall transitive closure.

    Returns (comp_id per node, sizes per component) with the same canonical
    numbering the library promises: components ordered by smallest node.
    """
    reach = np.eye(n, dtype=bool)
    for u, v in arcs:
        reach[u, v] = True
    for k in range(n):
        reach |= np.outer(reach[:, k], reach[k, :])
    mutual = reach & reach.T
    comp_of: dict[int, int] = {}
    components: list[list[int]] = []
    for v in range(n):
        if v in comp_of:
            continue
        members = [w for w in range(n) if mutual[v, w]]
        for w in members:
            comp_of[w] = len(components)
        components.append(members)
    components.sort(key=min)
    comp_id = [0] * n
    sizes = []
    for cid, members in enumerate(components):
        for w in members:
            comp_id[w] = cid
        sizes.append(len(members))
    return comp_id, sizes


def dense_pagerank(
    n: int,
    arcs: list[tuple[int, int]],
    damping: float = 0.85,
    tol: float = 1e-13,
    max_iter: int = 100000,
    dangling: str = "uniform",
) -> np.ndarray:
    """Power iteration on the explicitly built dense transition matrix."""
    M = np.zeros((n, n))
    out_deg = np.zeros(n)
    for u, _ in arcs:
        out_deg[u] += 1
    for u, v in arcs:
        M[u, v] = 1.0 / out_deg[u]
    for u in range(n):
        if out_deg[u] == 0:
            if dangling == "uniform":
                M[u, :] = 1.0 / n
            else:  # self-absorbing dangling node
                M[u, u] = 1.0
    G = damping * M + (1.0 - damping) / n
    x = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        x_new = x @ G
        if np.abs(x_new - x).sum() < tol:
            return x_new
        x = x_new
    return x


def dense_hits(
    n: int,
    arcs: list[tuple[int, int]],
    tol: float = 1e-13,
    max_iter: int = 100000,
) -> tuple[np.ndarray, np.ndarray]:
    """Dense-matrix HITS from all-ones vectors, L2-normalized per update."""
    A = np.zeros((n, n))
    for u, v in arcs:
        A[u, v] = 1.0
    hub = np.ones(n)
    auth = np.ones(n)
    for _ in range(max_iter):
        new_auth = A.T @ hub
        new_auth /= np.linalg.norm(new_auth)
        new_hub = A @ new_auth
        new_hub /= np.linalg.norm(new_hub)
        delta = max(np.abs(new_hub - hub).max(), np.abs(new_auth - auth).max())
        hub, auth = new_hub, new_auth
        if delta < tol:
            break
    return hub, auth


def brute_mean_local_clustering(n: int, arcs: list[tuple[int, int]]) -> float:
    """Mean local clustering of the undirected projection, by enumeration."""
    adj = np.zeros((n, n), dtype=bool)
    for u, v in arcs:
        if u != v:
            adj[u, v] = adj[v, u] = True
    total = 0.0
    for v in range(n):
        nbrs = [w for w in range(n) if adj[v, w]]
        k = len(nbrs)
        if k < 2:
            continue
        links = sum(
            1
            for i in range(k)
            for j in range(i + 1, k)
            if adj[nbrs[i], nbrs[j]]
        )
        total += 2.0 * links / (k * (k - 1))
    return total / n if n else 0.0
