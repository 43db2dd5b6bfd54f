"""Bottleneck distance between persistence diagrams.

Finite points are matched by binary search over candidate radii with a
Hopcroft-Karp perfect-matching test on the diagonal-augmented threshold
graph.  Essential points (death = inf) are matched among themselves by
sorted birth; unequal essential counts give an infinite distance.
"""
from __future__ import annotations

import sys
from collections import deque

import numpy as np

from .errors import InputError
from .persistence import INF, PersistenceDiagram

AGGREGATIONS = ("max", "dim0", "dim1")


def hopcroft_karp(adj: list[list[int]], n_right: int) -> int:
    """Size of a maximum matching of a bipartite graph given left adjacency."""
    n_left = len(adj)
    match_l = [-1] * n_left
    match_r = [-1] * n_right
    dist = [0] * n_left
    big = n_left + 1

    def bfs() -> bool:
        q = deque()
        for u in range(n_left):
            if match_l[u] == -1:
                dist[u] = 0
                q.append(u)
            else:
                dist[u] = big
        found = False
        while q:
            u = q.popleft()
            for v in adj[u]:
                w = match_r[v]
                if w == -1:
                    found = True
                elif dist[w] == big:
                    dist[w] = dist[u] + 1
                    q.append(w)
        return found

    def dfs(u: int) -> bool:
        for v in adj[u]:
            w = match_r[v]
            if w == -1 or (dist[w] == dist[u] + 1 and dfs(w)):
                match_l[u] = v
                match_r[v] = u
                return True
        dist[u] = big
        return False

    # dfs recursion depth is bounded by the augmenting path length.
    if sys.getrecursionlimit() < 2 * n_left + 100:
        sys.setrecursionlimit(2 * n_left + 100)
    size = 0
    while bfs():
        for u in range(n_left):
            if match_l[u] == -1 and dfs(u):
                size += 1
    return size


def _linf(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.max(np.abs(a[:, None, :] - b[None, :, :]), axis=2)


def _perfect_at(radius: float, cross: np.ndarray, da: np.ndarray, db: np.ndarray) -> bool:
    """Perfect matching in the augmented graph with edges of cost <= radius.

    Left side: points of A, then one diagonal copy per point of B.
    Right side: points of B, then one diagonal copy per point of A.
    """
    n, m = len(da), len(db)
    adj: list[list[int]] = []
    for i in range(n):
        row = list(np.nonzero(cross[i] <= radius)[0])
        if da[i] <= radius:
            row.append(m + i)
        adj.append(row)
    diag_targets = list(range(m, m + n))
    for j in range(m):
        row = [j] if db[j] <= radius else []
        adj.append(row + diag_targets)
    return hopcroft_karp(adj, m + n) == n + m


def finite_bottleneck(a: np.ndarray, b: np.ndarray) -> float:
    """Bottleneck distance between two finite point sets ``(k, 2)``."""
    a = np.asarray(a, dtype=np.float64).reshape(-1, 2)
    b = np.asarray(b, dtype=np.float64).reshape(-1, 2)
    da = (a[:, 1] - a[:, 0]) / 2
    db = (b[:, 1] - b[:, 0]) / 2
    cross = _linf(a, b)
    cands = np.unique(np.concatenate([[0.0], cross.ravel(), da, db]))
    lo, hi = 0, len(cands) - 1
    # The largest candidate is always feasible: everything goes to the diagonal.
    while lo < hi:
        mid = (lo + hi) // 2
        if _perfect_at(cands[mid], cross, da, db):
            hi = mid
        else:
            lo = mid + 1
    return float(cands[lo])


def essential_bottleneck(ea, eb) -> float:
    ea = np.sort(np.asarray(ea, dtype=np.float64))
    eb = np.sort(np.asarray(eb, dtype=np.float64))
    if len(ea) != len(eb):
        return INF
    if len(ea) == 0:
        return 0.0
    return float(np.max(np.abs(ea - eb)))


def bottleneck_distance(A: PersistenceDiagram, B: PersistenceDiagram, dim: int) -> float:
    """d_b between the dimension-``dim`` parts of two diagrams.

    Both diagrams must already be restricted to ``dim``; pass
    ``A.restrict(dim)`` when starting from a full diagram.
    """
    for name, D in (("A", A), ("B", B)):
        other = D.dims - {dim}
        if other:
            raise InputError(f"diagram {name} holds dimensions {sorted(other)} besides {dim}")
    ess = essential_bottleneck(A.essential(), B.essential())
    if ess == INF:
        return INF
    return max(ess, finite_bottleneck(A.finite(), B.finite()))


def per_dimension(A: PersistenceDiagram, B: PersistenceDiagram, dims=(0, 1)) -> dict[int, float]:
    return {k: bottleneck_distance(A.restrict(k), B.restrict(k), k) for k in dims}


def aggregate(per_dim: dict[int, float], rule: str = "max") -> float:
    if rule == "max":
        return max(per_dim.values())
    if rule == "dim0":
        return per_dim[0]
    if rule == "dim1":
        return per_dim[1]
    raise InputError(f"unknown aggregation rule {rule!r}; expected one of {AGGREGATIONS}")


def combined_bottleneck(A: PersistenceDiagram, B: PersistenceDiagram, rule: str = "max") -> float:
    """One scalar over H0 and H1: their max, or a single dimension."""
    if rule not in AGGREGATIONS:
        raise InputError(f"unknown aggregation rule {rule!r}; expected one of {AGGREGATIONS}")
    return aggregate(per_dimension(A, B), rule)
