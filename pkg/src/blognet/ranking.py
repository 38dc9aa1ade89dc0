"""Popularity measures on the collapsed digraph: in-degree ranking, HITS
hubs/authorities, and PageRank.

The iterative methods update every node from the previous iteration's
frozen vector (Jacobi-style), so results do not depend on node order
beyond floating-point associativity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .graphclean import SimpleDigraph


class GraphHasNoArcsError(ValueError):
    """HITS is undefined on an arcless graph."""


@dataclass(frozen=True)
class RankScores:
    kind: str                    # indegree | hub | authority | pagerank
    scores: dict[int, float]     # node index -> score
    iterations_used: int
    converged: bool


def _arc_arrays(
    g: SimpleDigraph, weights: Mapping[tuple[int, int], float] | None
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    src, dst, w = [], [], []
    for u, v in g.arcs():
        src.append(u)
        dst.append(v)
        w.append(1.0 if weights is None else float(weights[(u, v)]))
    return (
        np.asarray(src, dtype=np.int64),
        np.asarray(dst, dtype=np.int64),
        np.asarray(w, dtype=np.float64),
    )


def _to_scores(kind: str, vec: np.ndarray, iterations: int, converged: bool) -> RankScores:
    return RankScores(
        kind=kind,
        scores={i: float(x) for i, x in enumerate(vec)},
        iterations_used=iterations,
        converged=converged,
    )


def indegree_rank(
    g: SimpleDigraph, weights: Mapping[tuple[int, int], float] | None = None
) -> RankScores:
    """score(v) = number (or total weight) of arcs into v."""
    if weights is None:
        scores = {v: float(d) for v, d in enumerate(g.in_degrees())}
    else:
        acc = [0.0] * g.n
        for u, v in g.arcs():
            acc[v] += float(weights[(u, v)])
        scores = {v: x for v, x in enumerate(acc)}
    return RankScores(kind="indegree", scores=scores, iterations_used=0, converged=True)


def hits(
    g: SimpleDigraph,
    max_iter: int = 200,
    tol: float = 1e-9,
    norm: str = "l2",
    weights: Mapping[tuple[int, int], float] | None = None,
) -> tuple[RankScores, RankScores]:
    """Hub/authority scores, initialized at 1 everywhere.

    Per iteration: authority(v) = sum of hub over in-neighbors, then
    hub(u) = sum of authority over out-neighbors, each vector normalized
    after its update. Stops when the largest component change of either
    vector drops below ``tol``.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if norm not in ("l2", "l1"):
        raise ValueError(f"unknown norm {norm!r}")
    if g.arc_count == 0:
        raise GraphHasNoArcsError("HITS needs at least one arc")

    src, dst, w = _arc_arrays(g, weights)
    n = g.n
    order = 2 if norm == "l2" else 1
    hub = np.ones(n)
    auth = np.ones(n)
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        new_auth = np.bincount(dst, weights=hub[src] * w, minlength=n)
        new_auth /= np.linalg.norm(new_auth, ord=order)
        new_hub = np.bincount(src, weights=new_auth[dst] * w, minlength=n)
        new_hub /= np.linalg.norm(new_hub, ord=order)
        delta = max(
            np.max(np.abs(new_hub - hub)), np.max(np.abs(new_auth - auth))
        )
        hub, auth = new_hub, new_auth
        if delta < tol:
            converged = True
            break
    return (
        _to_scores("hub", hub, iterations, converged),
        _to_scores("authority", auth, iterations, converged),
    )


def pagerank(
    g: SimpleDigraph,
    damping: float = 0.85,
    tol: float = 1e-9,
    max_iter: int = 200,
    dangling: str = "uniform",
    weights: Mapping[tuple[int, int], float] | None = None,
) -> RankScores:
    """PR(v) = (1-d)/N + d * sum over in-arcs of PR(u)/outdeg(u), iterated
    from the uniform vector until the L1 change drops below ``tol``.

    Dangling nodes (no outgoing arcs) hand their mass back each iteration:
    ``uniform`` spreads it over all nodes, ``self`` lets each dangling node
    keep its own. Scores always sum to 1.
    """
    if not 0 < damping < 1:
        raise ValueError("damping must be in (0, 1)")
    if dangling not in ("uniform", "self"):
        raise ValueError(f"unknown dangling policy {dangling!r}")
    n = g.n
    if n == 0:
        return RankScores(kind="pagerank", scores={}, iterations_used=0, converged=True)

    src, dst, w = _arc_arrays(g, weights)
    out_weight = np.bincount(src, weights=w, minlength=n) if len(src) else np.zeros(n)
    dangling_mask = out_weight == 0
    safe_out = np.where(dangling_mask, 1.0, out_weight)

    pr = np.full(n, 1.0 / n)
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        if len(src):
            per_arc = pr[src] * (w / safe_out[src])
            flow = np.bincount(dst, weights=per_arc, minlength=n)
        else:
            flow = np.zeros(n)
        new_pr = (1.0 - damping) / n + damping * flow
        dangling_mass = float(pr[dangling_mask].sum())
        if dangling == "uniform":
            new_pr += damping * dangling_mass / n
        else:
            new_pr[dangling_mask] += damping * pr[dangling_mask]
        delta = float(np.abs(new_pr - pr).sum())
        pr = new_pr
        if delta < tol:
            converged = True
            break
    return _to_scores("pagerank", pr, iterations, converged)


def ranked_rows(
    scores: RankScores, labels: Sequence[str], top_k: int | None = None
) -> list[tuple[str, float, int]]:
    """(blog_id, score, rank) rows sorted by descending score; ties break on
    blog id so listings are reproducible."""
    ordered = sorted(
        ((labels[node], value) for node, value in scores.scores.items()),
        key=lambda item: (-item[1], item[0]),
    )
    if top_k is not None:
        ordered = ordered[:top_k]
    return [(blog_id, value, rank) for rank, (blog_id, value) in enumerate(ordered, 1)]
