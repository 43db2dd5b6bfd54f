"""Topological comparison of the original, latent and reconstructed samples."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from itertools import combinations

import numpy as np

from ..bottleneck import AGGREGATIONS, aggregate, per_dimension
from ..errors import InputError
from ..geometry import as_cloud, distance_matrix, subsample_indices
from ..neural import MlpParams
from ..objectives import TrainConfig
from ..persistence import PersistenceDiagram, compute_persistence
from ..vietoris_rips import build_vr, default_threshold
from .data import Dataset
from .training import decode, encode, train


def diagram_of(cloud, threshold: float | None = None, max_dim: int = 2) -> PersistenceDiagram:
    """Rips persistence (H0, H1) of a point cloud."""
    d = distance_matrix(cloud)
    return compute_persistence(build_vr(d, max_dim, threshold))


def max_distance(cloud) -> float:
    return float(np.max(distance_matrix(cloud)))


def extract_manifolds(ds: Dataset | np.ndarray, encoder: MlpParams, decoder: MlpParams,
                      k: int, seed, include_fraud: bool = False):
    """Row-aligned samples ``(X, Z, G(Z))`` of ``k`` data rows.

    Only normal-class rows are sampled unless ``include_fraud`` is set.
    """
    if isinstance(ds, Dataset):
        x_all = ds.features if include_fraud else ds.normal().features
    else:
        x_all = as_cloud(ds)
    x = x_all[subsample_indices(x_all.shape[0], k, seed)]
    z = encode(encoder, decoder, x)
    return x, z, decode(decoder, z)


@dataclass(frozen=True)
class Comparison:
    value: float
    per_dim: dict[int, float]
    aggregation: str
    threshold: float
    diagram_a: PersistenceDiagram
    diagram_b: PersistenceDiagram


def compare_manifolds(a, b, aggregation: str = "max") -> Comparison:
    """Bottleneck comparison of two clouds filtered up to a shared threshold."""
    a, b = as_cloud(a), as_cloud(b)
    if a.shape[1] != b.shape[1]:
        raise InputError(f"clouds live in R^{a.shape[1]} and R^{b.shape[1]}")
    if aggregation not in AGGREGATIONS:
        raise InputError(f"unknown aggregation rule {aggregation!r}")
    da, db = distance_matrix(a), distance_matrix(b)
    t = max(default_threshold(da), default_threshold(db))
    A = compute_persistence(build_vr(da, 2, t))
    B = compute_persistence(build_vr(db, 2, t))
    pd = per_dimension(A, B)
    return Comparison(aggregate(pd, aggregation), pd, aggregation, t, A, B)


@dataclass(frozen=True)
class ScatterResult:
    mean: float
    max: float
    values: tuple[float, ...]
    size: int
    aggregation: str


def bootstrap_scatter(z, rounds: int = 10, fraction: float = 0.5, seed=0,
                      aggregation: str = "max", allow_full: bool = False) -> ScatterResult:
    """Mean and max pairwise bottleneck distance between bootstrap subsamples.

    Each of ``rounds`` subsamples holds ``ceil(fraction * n)`` distinct rows.
    ``fraction`` must lie in [0.5, 1); ``allow_full`` admits 1.0.
    """
    z = as_cloud(z)
    upper_ok = fraction < 1 or (allow_full and fraction == 1)
    if not (fraction >= 0.5 and upper_ok):
        raise InputError(f"fraction must be in [0.5, 1), got {fraction}")
    if rounds < 2:
        raise InputError(f"need at least 2 bootstrap rounds, got {rounds}")
    if aggregation not in AGGREGATIONS:
        raise InputError(f"unknown aggregation rule {aggregation!r}")
    n = z.shape[0]
    size = math.ceil(fraction * n)
    t = default_threshold(distance_matrix(z))
    seeds = np.random.SeedSequence(seed).spawn(rounds)
    diagrams = [diagram_of(z[subsample_indices(n, size, s)], t) for s in seeds]
    values = tuple(
        aggregate(per_dimension(diagrams[i], diagrams[j]), aggregation)
        for i, j in combinations(range(rounds), 2)
    )
    return ScatterResult(float(np.mean(values)), float(np.max(values)), values, size, aggregation)


def scatter_score(z, rounds: int = 10, fraction: float = 0.5, seed=0,
                  aggregation: str = "max", allow_full: bool = False) -> float:
    return bootstrap_scatter(z, rounds, fraction, seed, aggregation, allow_full).mean


@dataclass(frozen=True)
class ModelReport:
    model: str
    bottleneck: float
    per_dim: dict[int, float]
    scatter_mean: float
    scatter_max: float
    final_loss: float | None
    diagrams: dict[str, PersistenceDiagram] = field(default_factory=dict)


@dataclass(frozen=True)
class AnalysisReport:
    seed: int
    aggregation: str
    k: int
    rounds: int
    fraction: float
    include_fraud: bool
    config: dict
    models: tuple[ModelReport, ...]

    def model(self, name: str) -> ModelReport:
        for m in self.models:
            if m.model == name:
                return m
        raise KeyError(name)


def analyze_model(ds: Dataset, cfg: TrainConfig, k: int = 100, rounds: int = 10,
                  fraction: float = 0.5, aggregation: str = "max",
                  include_fraud: bool = False) -> ModelReport:
    """Train one model, then compare X with G(Z) and score the scatter of Z."""
    fit = train(ds, cfg)
    n_rows = len(ds) if include_fraud else len(ds.normal())
    x, z, g = extract_manifolds(ds, fit.encoder, fit.decoder, min(k, n_rows), cfg.seed, include_fraud)
    cmp = compare_manifolds(x, g, aggregation)
    sc = bootstrap_scatter(z, rounds, fraction, cfg.seed, aggregation)
    return ModelReport(
        cfg.model, cmp.value, cmp.per_dim, sc.mean, sc.max,
        fit.losses[-1] if fit.losses else None,
        {"original": cmp.diagram_a, "reconstructed": cmp.diagram_b, "latent": diagram_of(z)},
    )


def run_analysis(ds: Dataset, cfg: TrainConfig, models=("wae", "vae"), k: int = 100,
                 rounds: int = 10, fraction: float = 0.5, aggregation: str = "max",
                 include_fraud: bool = False) -> AnalysisReport:
    """Both halves of the procedure for each model, under one seed."""
    reports = tuple(
        analyze_model(ds, replace(cfg, model=m), k, rounds, fraction, aggregation, include_fraud)
        for m in models
    )
    snapshot = cfg.to_dict()
    snapshot.pop("model")
    return AnalysisReport(cfg.seed, aggregation, k, rounds, fraction, include_fraud, snapshot, reports)
