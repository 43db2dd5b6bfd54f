"""Minibatch Adam training of the WAE and VAE auto-encoders.

Seeding: ``SeedSequence(cfg.seed)`` is spawned into three PCG64 streams,
one each for encoder init, decoder init, and the training loop (shuffles,
prior draws, reparameterization noise).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ..errors import InputError, NumericalError
from ..geometry import make_rng
from ..neural import AdamState, MlpParams, adam_update, backward, forward, init_mlp, reparameterize, reparameterize_backward
from ..objectives import TrainConfig, sample_prior, vae_loss, wae_loss
from .data import Dataset

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainResult:
    encoder: MlpParams
    decoder: MlpParams
    losses: list[float] = field(default_factory=list)
    config: TrainConfig = field(default_factory=TrainConfig)


def init_models(data_dim: int, cfg: TrainConfig) -> tuple[MlpParams, MlpParams]:
    enc_seed, dec_seed, _ = np.random.SeedSequence(cfg.seed).spawn(3)
    enc_out = cfg.latent_dim * (2 if cfg.model == "vae" else 1)
    encoder = init_mlp([data_dim, *cfg.hidden, enc_out], cfg.activation, seed=enc_seed)
    decoder = init_mlp([cfg.latent_dim, *reversed(cfg.hidden), data_dim], cfg.activation, seed=dec_seed)
    return encoder, decoder


def batch_loss(encoder: MlpParams, decoder: MlpParams, x: np.ndarray,
               cfg: TrainConfig, noise: np.ndarray):
    """Loss and parameter gradients for one batch.

    ``noise`` is the prior sample ``zp`` for a WAE or the standard-normal
    ``eps`` of the reparameterization for a VAE.  Returns
    ``(value, encoder_grads, decoder_grads)`` with gradients as flat lists
    matching ``MlpParams.arrays()``.
    """
    h, enc_tape = forward(encoder, x)
    if cfg.model == "wae":
        z = h
    else:
        mean, log_var = h[:, : cfg.latent_dim], h[:, cfg.latent_dim :]
        z, _ = reparameterize(mean, log_var, eps=noise)
    x_rec, dec_tape = forward(decoder, z)

    if cfg.model == "wae":
        loss = wae_loss(x, x_rec, z, noise, cfg)
        dec_g = backward(dec_tape, loss.grads["x_rec"])
        dh = dec_g.input + loss.grads["z"]
    else:
        loss = vae_loss(x, x_rec, mean, log_var)
        dec_g = backward(dec_tape, loss.grads["x_rec"])
        g_mean, g_lv = reparameterize_backward(dec_g.input, log_var, noise)
        dh = np.hstack([g_mean + loss.grads["mean"], g_lv + loss.grads["log_var"]])
    enc_g = backward(enc_tape, dh)
    return loss.value, enc_g.arrays(), dec_g.arrays()


def draw_noise(rng: np.random.Generator, rows: int, cfg: TrainConfig) -> np.ndarray:
    if cfg.model == "wae":
        return sample_prior(rows, cfg.latent_dim, rng)
    return rng.standard_normal((rows, cfg.latent_dim))


def train(ds: Dataset | np.ndarray, cfg: TrainConfig) -> TrainResult:
    """Fit encoder and decoder on the normal-class rows of ``ds``.

    Stops after ``cfg.epochs`` epochs, or earlier once the epoch loss has
    improved by less than ``cfg.min_improvement`` (relative) for
    ``cfg.patience`` consecutive epochs.
    """
    x_all = ds.normal().features if isinstance(ds, Dataset) else np.asarray(ds, dtype=np.float64)
    if x_all.ndim != 2 or x_all.shape[0] < 2:
        raise InputError(f"need at least 2 training rows, got shape {x_all.shape}")
    encoder, decoder = init_models(x_all.shape[1], cfg)
    _, _, loop_seed = np.random.SeedSequence(cfg.seed).spawn(3)
    rng = make_rng(loop_seed)
    n_enc = len(encoder.arrays())
    hyper = dict(lr=cfg.lr, beta1=cfg.beta1, beta2=cfg.beta2, eps=cfg.eps)
    state = AdamState.zeros_like(encoder.arrays() + decoder.arrays(), **hyper)

    losses: list[float] = []
    best = np.inf
    stale = 0
    n = x_all.shape[0]
    for epoch in range(cfg.epochs):
        order = rng.permutation(n)
        total, rows = 0.0, 0
        for start in range(0, n, cfg.batch):
            idx = order[start : start + cfg.batch]
            if len(idx) < 2:
                continue
            xb = x_all[idx]
            value, ge, gd = batch_loss(encoder, decoder, xb, cfg, draw_noise(rng, len(idx), cfg))
            if not np.isfinite(value):
                raise NumericalError(
                    f"{cfg.model} loss became {value} at epoch {epoch}; "
                    f"try a smaller learning rate (lr={cfg.lr}) or lambda (lam={cfg.lam})"
                )
            arrays, state = adam_update(encoder.arrays() + decoder.arrays(), ge + gd, state)
            encoder = encoder.with_arrays(arrays[:n_enc])
            decoder = decoder.with_arrays(arrays[n_enc:])
            total += value * len(idx)
            rows += len(idx)
        epoch_loss = total / rows
        losses.append(epoch_loss)
        log.debug("%s epoch %d loss %.6g", cfg.model, epoch, epoch_loss)
        if best - epoch_loss < cfg.min_improvement * abs(best):
            stale += 1
            if stale >= cfg.patience:
                break
        else:
            stale = 0
        best = min(best, epoch_loss)
    return TrainResult(encoder, decoder, losses, cfg)


def encode(encoder: MlpParams, decoder: MlpParams, x) -> np.ndarray:
    """Deterministic latent code: the encoder output, or the posterior mean for a VAE."""
    h, _ = forward(encoder, x)
    latent = decoder.in_dim
    if h.shape[1] == latent:
        return h
    if h.shape[1] == 2 * latent:
        return h[:, :latent]
    raise InputError(f"encoder width {h.shape[1]} fits neither latent dim {latent} nor twice it")


def decode(decoder: MlpParams, z) -> np.ndarray:
    return forward(decoder, z)[0]
