"""Vietoris-Rips filtrations up to dimension 2.

A simplex enters the filtration at the largest pairwise distance among its
vertices.  Simplices are ordered by ``(value, dimension, vertices)``, which
puts every face before its cofaces.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import NamedTuple

import numpy as np

from .errors import InputError
from .geometry import check_distance_matrix


class Simplex(NamedTuple):
    vertices: tuple[int, ...]
    value: float

    @property
    def dim(self) -> int:
        return len(self.vertices) - 1


@dataclass(frozen=True)
class Filtration:
    simplices: list[Simplex]
    threshold: float
    n_vertices: int
    max_dim: int = 2
    _index: dict = field(default=None, init=False, repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.simplices)

    def index(self) -> dict[tuple[int, ...], int]:
        """Map from vertex tuple to filtration position (built lazily)."""
        if self._index is None:
            object.__setattr__(
                self, "_index", {s.vertices: i for i, s in enumerate(self.simplices)}
            )
        return self._index

    def check_face_closure(self) -> None:
        """Raise :class:`InputError` unless every face precedes its cofaces."""
        idx = self.index()
        if len(idx) != len(self.simplices):
            raise InputError("filtration contains duplicate simplices")
        for j, s in enumerate(self.simplices):
            if list(s.vertices) != sorted(set(s.vertices)):
                raise InputError(f"simplex {s.vertices} has unsorted or repeated vertices")
            if s.value > self.threshold:
                raise InputError(f"simplex {s.vertices} exceeds threshold {self.threshold}")
            if s.dim == 0:
                continue
            for face in combinations(s.vertices, s.dim):
                i = idx.get(face)
                if i is None:
                    raise InputError(f"face {face} of {s.vertices} missing")
                if i > j or self.simplices[i].value > s.value:
                    raise InputError(f"face {face} appears after coface {s.vertices}")


def default_threshold(d: np.ndarray) -> float:
    """Largest pairwise distance, or 1.0 when all points coincide."""
    top = float(np.max(d)) if d.size else 0.0
    return top if top > 0 else 1.0


def build_vr(d, max_dim: int = 2, threshold: float | None = None) -> Filtration:
    """Vietoris-Rips filtration of a distance matrix.

    ``threshold`` defaults to the largest pairwise distance, so the final
    complex is the full simplex truncated at ``max_dim``.
    """
    if max_dim not in (1, 2):
        raise InputError(f"max_dim must be 1 or 2, got {max_dim}")
    d = check_distance_matrix(d)
    if threshold is None:
        threshold = default_threshold(d)
    threshold = float(threshold)
    if not (threshold > 0 and np.isfinite(threshold)):
        raise InputError(f"threshold must be a positive finite number, got {threshold}")
    n = d.shape[0]

    iu, ju = np.triu_indices(n, k=1)
    ev = d[iu, ju]
    keep = ev <= threshold
    iu, ju, ev = iu[keep], ju[keep], ev[keep]

    verts = np.zeros((n, 3), dtype=np.int64)
    verts[:, 0] = np.arange(n)
    verts[:, 1:] = -1
    vals = [np.zeros(n)]
    dims = [np.zeros(n, dtype=np.int64)]
    blocks = [verts]

    eb = np.full((len(ev), 3), -1, dtype=np.int64)
    eb[:, 0], eb[:, 1] = iu, ju
    blocks.append(eb)
    vals.append(ev)
    dims.append(np.ones(len(ev), dtype=np.int64))

    if max_dim == 2 and n >= 3:
        tri = _triangles(d, n, threshold)
        if len(tri):
            tv = np.maximum(
                np.maximum(d[tri[:, 0], tri[:, 1]], d[tri[:, 0], tri[:, 2]]),
                d[tri[:, 1], tri[:, 2]],
            )
            blocks.append(tri)
            vals.append(tv)
            dims.append(np.full(len(tv), 2, dtype=np.int64))

    allv = np.concatenate(blocks)
    allval = np.concatenate(vals)
    alldim = np.concatenate(dims)
    # -1 pads unused vertex slots; equal-dimension rows share the padding.
    order = np.lexsort((allv[:, 2], allv[:, 1], allv[:, 0], alldim, allval))
    simplices = [
        Simplex(tuple(int(v) for v in allv[o, : alldim[o] + 1]), float(allval[o]))
        for o in order
    ]
    return Filtration(simplices, threshold, n, max_dim)


def _triangles(d: np.ndarray, n: int, threshold: float) -> np.ndarray:
    """All vertex triples ``i < j < k`` whose three edges are within threshold."""
    adj = d <= threshold
    out = []
    for i in range(n - 2):
        js = np.nonzero(adj[i, i + 1 :])[0] + i + 1
        if len(js) < 2:
            continue
        sub = adj[np.ix_(js, js)]
        a, b = np.nonzero(np.triu(sub, k=1))
        if len(a):
            t = np.empty((len(a), 3), dtype=np.int64)
            t[:, 0] = i
            t[:, 1] = js[a]
            t[:, 2] = js[b]
            out.append(t)
    if not out:
        return np.empty((0, 3), dtype=np.int64)
    return np.concatenate(out)
