"""Loading the credit-card transaction CSV.

Expected header: ``Time,V1,...,V28,Amount,Class``.  ``Time`` is dropped,
``V1..V28`` are kept verbatim and ``Amount`` is standardized with the
population mean/std of the loaded file (std 0 falls back to 1).
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import InputError
from ..geometry import subsample_indices

PCA_COLUMNS = tuple(f"V{i}" for i in range(1, 29))
HEADER = ("Time",) + PCA_COLUMNS + ("Amount", "Class")
FEATURES = PCA_COLUMNS + ("Amount",)


@dataclass(frozen=True)
class Dataset:
    features: np.ndarray
    labels: np.ndarray
    amount_mean: float = 0.0
    amount_std: float = 1.0

    def __post_init__(self):
        x = np.asarray(self.features, dtype=np.float64)
        y = np.asarray(self.labels, dtype=np.int64)
        if x.ndim != 2 or x.shape[0] != y.shape[0]:
            raise InputError(f"features {x.shape} and labels {y.shape} do not line up")
        if not np.all(np.isfinite(x)):
            raise InputError("features contain non-finite values")
        if np.any((y != 0) & (y != 1)):
            raise InputError("labels must be 0 (normal) or 1 (fraud)")
        object.__setattr__(self, "features", x)
        object.__setattr__(self, "labels", y)

    def __len__(self) -> int:
        return self.features.shape[0]

    def subset(self, rows) -> "Dataset":
        rows = np.asarray(rows)
        return Dataset(self.features[rows], self.labels[rows], self.amount_mean, self.amount_std)

    def normal(self) -> "Dataset":
        return self.subset(np.nonzero(self.labels == 0)[0])


def normal_subsample(ds: Dataset, n: int, seed) -> Dataset:
    """``n`` normal-class rows drawn without replacement, in file order."""
    normal = ds.normal()
    return normal.subset(np.sort(subsample_indices(len(normal), n, seed)))


def _parse_label(text: str, where: str) -> int:
    try:
        value = float(text)
    except ValueError:
        raise InputError(f"{where}: Class value {text!r} is not a number") from None
    if value not in (0.0, 1.0):
        raise InputError(f"{where}: Class must be 0 or 1, got {text!r}")
    return int(value)


def load_csv(path) -> Dataset:
    path = Path(path)
    rows, labels = [], []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise InputError(f"{path}: empty file")
        header = [h.strip() for h in header]
        if tuple(header) != HEADER:
            missing = [c for c in HEADER if c not in header]
            extra = [c for c in header if c not in HEADER]
            detail = []
            if missing:
                detail.append(f"missing columns {missing}")
            if extra:
                detail.append(f"unexpected columns {extra}")
            if not detail:
                detail.append("columns out of order")
            raise InputError(f"{path}: bad header ({'; '.join(detail)})")
        for lineno, fields in enumerate(reader, start=2):
            if not fields:
                continue
            if len(fields) != len(HEADER):
                raise InputError(
                    f"{path}: line {lineno} has {len(fields)} columns, expected {len(HEADER)}"
                )
            values = []
            for name, text in zip(HEADER[1:-1], fields[1:-1]):
                try:
                    values.append(float(text))
                except ValueError:
                    raise InputError(
                        f"{path}: line {lineno}, column {name}: cannot parse {text!r}"
                    ) from None
            labels.append(_parse_label(fields[-1], f"{path}: line {lineno}"))
            rows.append(values)
    if not rows:
        raise InputError(f"{path}: no data rows")
    x = np.array(rows, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        r, c = np.argwhere(~np.isfinite(x))[0]
        raise InputError(f"{path}: line {r + 2}, column {FEATURES[c]}: non-finite value")
    amount = x[:, -1]
    mean = float(amount.mean())
    std = float(amount.std())
    if std == 0:
        std = 1.0
    x[:, -1] = (amount - mean) / std
    return Dataset(x, np.array(labels), mean, std)
