"""Persistent homology over Z/2 by boundary-matrix reduction.

Columns are stored as Python sets of row indices; adding two columns mod 2
is a symmetric difference.  Three reductions are available and all produce
the same pairing of simplices:

``standard``
    the textbook left-to-right column reduction;
``twist``
    the same reduction run from the top dimension down, zeroing every column
    whose index is already known to be a pivot (clearing);
``cohomology``
    reduction of the anti-transposed (coboundary) matrix, with H0 pairs
    found by union-find.  This is much faster on Rips complexes, where most
    triangles are positive and would otherwise be reduced to zero.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import NamedTuple

import numpy as np

from .errors import InputError
from .vietoris_rips import Filtration

INF = float("inf")


class PersistencePair(NamedTuple):
    dim: int
    birth: float
    death: float

    @property
    def persistence(self) -> float:
        return self.death - self.birth


@dataclass(frozen=True)
class PersistenceDiagram:
    """Multiset of persistence pairs, stored in canonical sorted order."""

    pairs: tuple[PersistencePair, ...] = ()
    threshold: float = INF

    def __post_init__(self):
        pairs = []
        for p in self.pairs:
            p = PersistencePair(int(p[0]), float(p[1]), float(p[2]))
            if not p.birth <= p.death:
                raise InputError(f"pair {tuple(p)} has birth after death")
            pairs.append(p)
        object.__setattr__(self, "pairs", tuple(sorted(pairs)))

    def __len__(self) -> int:
        return len(self.pairs)

    @property
    def dims(self) -> set[int]:
        return {p.dim for p in self.pairs}

    def restrict(self, dim: int) -> "PersistenceDiagram":
        return PersistenceDiagram(tuple(p for p in self.pairs if p.dim == dim), self.threshold)

    def finite(self) -> np.ndarray:
        """``(k, 2)`` array of finite (birth, death) points."""
        pts = [(p.birth, p.death) for p in self.pairs if p.death != INF]
        return np.array(pts, dtype=np.float64).reshape(-1, 2)

    def essential(self) -> np.ndarray:
        return np.array([p.birth for p in self.pairs if p.death == INF], dtype=np.float64)


@dataclass(frozen=True)
class Barcode:
    """Intervals grouped by dimension, each group sorted by (birth, death)."""

    intervals: dict[int, list[tuple[float, float]]] = field(default_factory=dict)
    threshold: float = INF

    def to_diagram(self) -> PersistenceDiagram:
        return PersistenceDiagram(
            tuple(PersistencePair(k, b, d) for k, bars in self.intervals.items() for b, d in bars),
            self.threshold,
        )

    def __len__(self) -> int:
        return sum(len(v) for v in self.intervals.values())


def barcodes(diag: PersistenceDiagram) -> Barcode:
    groups: dict[int, list[tuple[float, float]]] = {}
    for p in diag.pairs:
        groups.setdefault(p.dim, []).append((p.birth, p.death))
    return Barcode({k: sorted(v) for k, v in sorted(groups.items())}, diag.threshold)


def boundary_columns(f: Filtration) -> list[set[int]]:
    """Z/2 boundary matrix as one set of face positions per simplex."""
    idx = f.index()
    cols = []
    for s in f.simplices:
        if s.dim == 0:
            cols.append(set())
        else:
            cols.append({idx[face] for face in combinations(s.vertices, s.dim)})
    return cols


def reduce_standard(cols: list[set[int]]) -> dict[int, int]:
    """Left-to-right column reduction.  Returns ``{low_row: column}``."""
    pivot_of: dict[int, int] = {}
    for j, col in enumerate(cols):
        while col:
            low = max(col)
            k = pivot_of.get(low)
            if k is None:
                pivot_of[low] = j
                break
            col ^= cols[k]
    return pivot_of


def reduce_twist(cols: list[set[int]], dims: list[int]) -> dict[int, int]:
    """Column reduction with clearing, processing the top dimension first."""
    pivot_of: dict[int, int] = {}
    cleared: set[int] = set()
    for k in sorted(set(dims), reverse=True):
        for j, col in enumerate(cols):
            if dims[j] != k:
                continue
            if j in cleared:
                col.clear()
                continue
            while col:
                low = max(col)
                other = pivot_of.get(low)
                if other is None:
                    pivot_of[low] = j
                    cleared.add(low)
                    break
                col ^= cols[other]
    return pivot_of


def _pairs_from_pivots(f: Filtration, pivot_of: dict[int, int]) -> list[PersistencePair]:
    sx = f.simplices
    out = []
    paired = set(pivot_of) | set(pivot_of.values())
    for i, j in pivot_of.items():
        b, d = sx[i].value, sx[j].value
        if b != d:
            out.append(PersistencePair(sx[i].dim, b, d))
    for i, s in enumerate(sx):
        if i not in paired and s.dim < f.max_dim:
            out.append(PersistencePair(s.dim, s.value, INF))
    return out


def _find(parent: list[int], x: int) -> int:
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def _cohomology_pairs(f: Filtration) -> list[PersistencePair]:
    sx = f.simplices
    idx = f.index()
    n = f.n_vertices
    out: list[PersistencePair] = []

    # H0: elder rule by union-find; edges that merge components are negative.
    parent = list(range(n))
    negative_edges = set()
    edges = []
    for j, s in enumerate(sx):
        if s.dim != 1:
            continue
        edges.append(j)
        a, b = _find(parent, s.vertices[0]), _find(parent, s.vertices[1])
        if a != b:
            parent[max(a, b)] = min(a, b)
            negative_edges.add(j)
            if s.value != 0.0:
                out.append(PersistencePair(0, 0.0, s.value))
    roots = {_find(parent, v) for v in range(n)}
    out.extend(PersistencePair(0, 0.0, INF) for _ in roots)
    if f.max_dim < 2:
        return out

    # H1: reduce coboundaries of positive edges in reverse filtration order.
    # Rows are triangle positions; the pivot is the earliest triangle.
    nbrs: list[set[int]] = [set() for _ in range(n)]
    for j in edges:
        a, b = sx[j].vertices
        nbrs[a].add(b)
        nbrs[b].add(a)
    pivot_of: dict[int, set[int]] = {}
    for j in reversed(edges):
        if j in negative_edges:
            continue
        a, b = sx[j].vertices
        col = set()
        for c in nbrs[a] & nbrs[b]:
            col.add(idx[tuple(sorted((a, b, c)))])
        while col:
            low = min(col)
            other = pivot_of.get(low)
            if other is None:
                pivot_of[low] = col
                death = sx[low].value
                if death != sx[j].value:
                    out.append(PersistencePair(1, sx[j].value, death))
                break
            col ^= other
        else:
            out.append(PersistencePair(1, sx[j].value, INF))
    return out


def compute_persistence(f: Filtration, method: str = "cohomology", check: bool = True) -> PersistenceDiagram:
    """Persistence diagram (dimensions below ``f.max_dim``) of a filtration.

    Zero-length intervals are dropped.  Triangles only kill H1 classes; no
    H2 is reported.
    """
    if check:
        f.check_face_closure()
    if method == "cohomology":
        pairs = _cohomology_pairs(f)
    elif method == "standard":
        pairs = _pairs_from_pivots(f, reduce_standard(boundary_columns(f)))
    elif method == "twist":
        dims = [s.dim for s in f.simplices]
        pairs = _pairs_from_pivots(f, reduce_twist(boundary_columns(f), dims))
    else:
        raise InputError(f"unknown reduction method {method!r}")
    return PersistenceDiagram(tuple(p for p in pairs if p.dim < f.max_dim), f.threshold)
