"""Point clouds, Euclidean distance matrices and seeded sub-sampling.

Point clouds are plain ``(n, d)`` float arrays.  All randomness goes through
:func:`make_rng`, which returns a NumPy ``Generator`` backed by the PCG64
bit generator, so a given seed yields the same stream on every platform
supported by NumPy.
"""
from __future__ import annotations

import numpy as np

from .errors import InputError


def make_rng(seed) -> np.random.Generator:
    """PCG64 generator for an int seed or a ``SeedSequence``."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


def as_cloud(points) -> np.ndarray:
    """Validate and return a point cloud as a float64 ``(n, d)`` array."""
    arr = np.asarray(points, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InputError(f"point cloud must be a non-empty n x d matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        bad = np.argwhere(~np.isfinite(arr))[0]
        raise InputError(f"non-finite coordinate at row {bad[0]}, column {bad[1]}")
    return arr


def distance_matrix(cloud) -> np.ndarray:
    """Pairwise Euclidean distances.

    The result is exactly symmetric with an exactly zero diagonal, since
    ``(a - b)**2 == (b - a)**2`` in IEEE arithmetic.
    """
    x = as_cloud(cloud)
    diff = x[:, None, :] - x[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


def check_distance_matrix(d, atol: float = 0.0) -> np.ndarray:
    d = np.asarray(d, dtype=np.float64)
    if d.ndim != 2 or d.shape[0] != d.shape[1] or d.shape[0] < 1:
        raise InputError(f"distance matrix must be square and non-empty, got shape {d.shape}")
    if not np.all(np.isfinite(d)):
        raise InputError("distance matrix has non-finite entries")
    if np.any(d < 0):
        raise InputError("distance matrix has negative entries")
    if np.any(np.abs(d - d.T) > atol):
        raise InputError("distance matrix is not symmetric")
    if np.any(np.diag(d) != 0):
        raise InputError("distance matrix has a non-zero diagonal")
    return d


def subsample_indices(n: int, k: int, seed) -> np.ndarray:
    """``k`` distinct indices from ``range(n)``, uniform without replacement."""
    if not 1 <= k <= n:
        raise InputError(f"sample size k={k} must satisfy 1 <= k <= n={n}")
    return make_rng(seed).choice(n, size=k, replace=False)


def subsample(cloud, k: int, seed) -> np.ndarray:
    x = as_cloud(cloud)
    return x[subsample_indices(x.shape[0], k, seed)]
