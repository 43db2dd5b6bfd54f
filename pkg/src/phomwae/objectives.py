"""Training objectives: WAE (reconstruction + lambda * MMD) and VAE (+ KL).

Each loss returns its value together with the gradients the trainer needs
(with respect to the reconstruction and to the latent codes), so the MLP
tape can be driven without a general autodiff engine.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import InputError
from .geometry import make_rng

KERNELS = ("imq", "gaussian", "linear")
MODELS = ("wae", "vae")


@dataclass(frozen=True)
class KernelConfig:
    """Kernel family and its scale.

    ``imq``: ``C / (C + |x - y|^2)`` with ``C = scale`` (default ``2 * latent_dim``).
    ``gaussian``: ``exp(-|x - y|^2 / (2 * scale))``, ``scale`` being the
    variance (default 1).
    ``linear``: ``x . y``; not characteristic, kept for hand-checkable tests.
    """

    family: str = "imq"
    scale: float | None = None

    def __post_init__(self):
        if self.family not in KERNELS:
            raise InputError(f"unknown kernel family {self.family!r}; expected one of {KERNELS}")
        if self.scale is not None and not self.scale > 0:
            raise InputError(f"kernel scale must be positive, got {self.scale}")

    def resolved_scale(self, latent_dim: int) -> float:
        if self.scale is not None:
            return float(self.scale)
        return 2.0 * latent_dim if self.family == "imq" else 1.0


@dataclass(frozen=True)
class TrainConfig:
    model: str = "wae"
    lam: float = 15.0
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    batch: int = 64
    latent_dim: int = 2
    hidden: tuple[int, ...] = (32, 16)
    activation: str = "tanh"
    epochs: int = 30
    patience: int = 5
    min_improvement: float = 1e-3
    seed: int = 0
    kernel: KernelConfig = field(default_factory=KernelConfig)

    def __post_init__(self):
        if self.model not in MODELS:
            raise InputError(f"model must be one of {MODELS}, got {self.model!r}")
        if not self.lam >= 0:
            raise InputError(f"lambda must be >= 0, got {self.lam}")
        if self.batch < 2:
            raise InputError(f"batch size must be >= 2 for the unbiased MMD, got {self.batch}")
        if self.latent_dim < 1 or self.epochs < 0 or self.patience < 1:
            raise InputError("latent_dim >= 1, epochs >= 0 and patience >= 1 are required")
        if isinstance(self.kernel, dict):
            object.__setattr__(self, "kernel", KernelConfig(**self.kernel))
        object.__setattr__(self, "hidden", tuple(int(h) for h in self.hidden))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["hidden"] = list(self.hidden)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "TrainConfig":
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise InputError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)


class Loss(NamedTuple):
    value: float
    grads: dict[str, np.ndarray]


def _pair(a, b, what: str) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 2:
        raise InputError(f"{what}: shapes {a.shape} and {b.shape} must be equal 2-D batches")
    return a, b


def reconstruction_cost(x, x_rec) -> float:
    """Mean over rows of the squared Euclidean distance."""
    x, x_rec = _pair(x, x_rec, "reconstruction_cost")
    return float(np.mean(np.sum((x - x_rec) ** 2, axis=1)))


def _reconstruction_grad(x, x_rec) -> np.ndarray:
    return 2.0 * (x_rec - x) / x.shape[0]


def kernel_matrix(a, b, k: KernelConfig, latent_dim: int | None = None,
                  with_grad: bool = False):
    """Gram matrix ``K[i, j] = k(a_i, b_j)``.

    With ``with_grad`` also returns ``G[i, j] = d k(a_i, b_j) / d a_i`` of
    shape ``(n, m, d)``.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    s = k.resolved_scale(latent_dim or a.shape[1])
    if k.family == "linear":
        K = a @ b.T
        if not with_grad:
            return K
        return K, np.broadcast_to(b[None, :, :], (a.shape[0],) + b.shape)
    diff = a[:, None, :] - b[None, :, :]
    r2 = np.einsum("ijk,ijk->ij", diff, diff)
    if k.family == "imq":
        K = s / (s + r2)
        if not with_grad:
            return K
        return K, (-2.0 * K * K / s)[:, :, None] * diff
    K = np.exp(-r2 / (2.0 * s))
    if not with_grad:
        return K
    return K, (-K / s)[:, :, None] * diff


def _mmd_parts(zq, zp, k, unbiased, with_grad):
    zq = np.asarray(zq, dtype=np.float64)
    zp = np.asarray(zp, dtype=np.float64)
    if zq.ndim != 2 or zp.ndim != 2 or zq.shape[1] != zp.shape[1]:
        raise InputError(f"mmd: incompatible batches {zq.shape} and {zp.shape}")
    n, m = zq.shape[0], zp.shape[0]
    if unbiased and (n < 2 or m < 2):
        raise InputError("the unbiased MMD estimator needs at least 2 samples per set")
    latent = zq.shape[1]
    if with_grad:
        Kqq, Gqq = kernel_matrix(zq, zq, k, latent, with_grad=True)
        Kqp, Gqp = kernel_matrix(zq, zp, k, latent, with_grad=True)
    else:
        Kqq = kernel_matrix(zq, zq, k, latent)
        Kqp = kernel_matrix(zq, zp, k, latent)
    Kpp = kernel_matrix(zp, zp, k, latent)
    # fsum is correctly rounded, hence independent of summation order; this
    # makes mmd(a, b) == mmd(b, a) bit for bit.
    if unbiased:
        wq, wp = n * (n - 1), m * (m - 1)
        sqq = math.fsum(Kqq[~np.eye(n, dtype=bool)]) / wq
        spp = math.fsum(Kpp[~np.eye(m, dtype=bool)]) / wp
    else:
        wq, wp = n * n, m * m
        sqq = math.fsum(Kqq.ravel()) / wq
        spp = math.fsum(Kpp.ravel()) / wp
    value = float(sqq + spp - 2.0 * math.fsum(Kqp.ravel()) / (n * m))
    if not with_grad:
        return value, None
    if unbiased:
        Gqq = Gqq.copy()
        Gqq[np.arange(n), np.arange(n)] = 0.0
    grad = 2.0 * Gqq.sum(axis=1) / wq - 2.0 * Gqp.sum(axis=1) / (n * m)
    return value, grad


def mmd(zq, zp, k: KernelConfig = KernelConfig(), unbiased: bool = True) -> float:
    """Squared-MMD estimate between two samples.

    The unbiased U-statistic (default) drops the diagonal of both
    within-sample Gram matrices and can be slightly negative.
    """
    return _mmd_parts(zq, zp, k, unbiased, False)[0]


def mmd_with_grad(zq, zp, k: KernelConfig = KernelConfig(), unbiased: bool = True):
    """``(mmd, d mmd / d zq)``."""
    return _mmd_parts(zq, zp, k, unbiased, True)


def wae_loss(x, x_rec, zq, zp, cfg: TrainConfig) -> Loss:
    x, x_rec = _pair(x, x_rec, "wae_loss")
    rec = reconstruction_cost(x, x_rec)
    pen, g_z = mmd_with_grad(zq, zp, cfg.kernel)
    return Loss(rec + cfg.lam * pen, {"x_rec": _reconstruction_grad(x, x_rec), "z": cfg.lam * g_z})


def kl_gaussian(mean, log_var) -> float:
    """Batch mean of KL(N(mean, diag(exp(log_var))) || N(0, I))."""
    mean, log_var = _pair(mean, log_var, "kl_gaussian")
    return float(np.mean(0.5 * np.sum(mean ** 2 + np.exp(log_var) - log_var - 1.0, axis=1)))


def vae_loss(x, x_rec, mean, log_var) -> Loss:
    x, x_rec = _pair(x, x_rec, "vae_loss")
    mean, log_var = _pair(mean, log_var, "vae_loss")
    n = mean.shape[0]
    value = reconstruction_cost(x, x_rec) + kl_gaussian(mean, log_var)
    return Loss(value, {
        "x_rec": _reconstruction_grad(x, x_rec),
        "mean": mean / n,
        "log_var": 0.5 * (np.exp(log_var) - 1.0) / n,
    })


def sample_prior(n: int, latent_dim: int, seed) -> np.ndarray:
    """``n`` draws from the standard normal prior on R^latent_dim."""
    if n < 1 or latent_dim < 1:
        raise InputError(f"sample_prior needs n >= 1 and latent_dim >= 1, got {n}, {latent_dim}")
    return make_rng(seed).standard_normal((n, latent_dim))
