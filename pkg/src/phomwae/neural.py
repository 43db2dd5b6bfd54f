"""Small MLPs with hand-written reverse mode, Adam, and checkpoints.

A network is a sequence of dense layers ``y = act(x @ W.T + b)`` with
``W`` of shape ``(out, in)``.  :func:`forward` records a :class:`Tape` of the
per-layer inputs and outputs; :func:`backward` walks it in reverse.
Parameters are immutable snapshots: every Adam step returns new arrays.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

from .errors import InputError, UsageError
from .geometry import make_rng

ACTIVATIONS = ("linear", "tanh", "relu")
CHECKPOINT_MAGIC = "phomwae-mlp 1"


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=np.float64, copy=True)
    a.setflags(write=False)
    return a


class Layer(NamedTuple):
    weight: np.ndarray
    bias: np.ndarray
    activation: str


@dataclass(frozen=True)
class MlpParams:
    layers: tuple[Layer, ...]

    def __post_init__(self):
        layers = []
        prev = None
        for i, (w, b, act) in enumerate(self.layers):
            w, b = _frozen(w), _frozen(b)
            if act not in ACTIVATIONS:
                raise InputError(f"layer {i}: unknown activation {act!r}")
            if w.ndim != 2 or b.shape != (w.shape[0],):
                raise InputError(f"layer {i}: weight {w.shape} and bias {b.shape} do not agree")
            if prev is not None and w.shape[1] != prev:
                raise InputError(f"layer {i}: expects width {w.shape[1]}, previous layer gives {prev}")
            prev = w.shape[0]
            layers.append(Layer(w, b, act))
        if not layers:
            raise InputError("an MLP needs at least one layer")
        object.__setattr__(self, "layers", tuple(layers))

    @property
    def in_dim(self) -> int:
        return self.layers[0].weight.shape[1]

    @property
    def out_dim(self) -> int:
        return self.layers[-1].weight.shape[0]

    def arrays(self) -> list[np.ndarray]:
        """Flat list ``[W0, b0, W1, b1, ...]``."""
        return [a for layer in self.layers for a in (layer.weight, layer.bias)]

    def with_arrays(self, arrays: Sequence[np.ndarray]) -> "MlpParams":
        it = iter(arrays)
        return MlpParams(tuple(Layer(next(it), next(it), layer.activation) for layer in self.layers))

    def equal(self, other: "MlpParams") -> bool:
        """Bit-exact equality of shapes, values and activations."""
        if len(self.layers) != len(other.layers):
            return False
        return all(
            a.activation == b.activation
            and np.array_equal(a.weight, b.weight)
            and np.array_equal(a.bias, b.bias)
            for a, b in zip(self.layers, other.layers)
        )


def init_mlp(sizes: Sequence[int], hidden_activation: str = "tanh",
             output_activation: str = "linear", seed=0) -> MlpParams:
    """Glorot-uniform weights, zero biases."""
    if len(sizes) < 2:
        raise InputError("sizes must list at least an input and an output width")
    rng = make_rng(seed)
    layers = []
    for i, (fan_in, fan_out) in enumerate(zip(sizes[:-1], sizes[1:])):
        bound = np.sqrt(6.0 / (fan_in + fan_out))
        w = rng.uniform(-bound, bound, size=(fan_out, fan_in))
        act = output_activation if i == len(sizes) - 2 else hidden_activation
        layers.append(Layer(w, np.zeros(fan_out), act))
    return MlpParams(tuple(layers))


@dataclass(frozen=True)
class Tape:
    params: MlpParams
    inputs: tuple[np.ndarray, ...]
    outputs: tuple[np.ndarray, ...]


class Gradients(NamedTuple):
    layers: tuple[tuple[np.ndarray, np.ndarray], ...]
    input: np.ndarray

    def arrays(self) -> list[np.ndarray]:
        return [a for pair in self.layers for a in pair]


def _act(name: str, z: np.ndarray) -> np.ndarray:
    if name == "tanh":
        return np.tanh(z)
    if name == "relu":
        return np.maximum(z, 0.0)
    return z


def _act_grad(name: str, y: np.ndarray) -> np.ndarray:
    # Expressed through the layer output y.
    if name == "tanh":
        return 1.0 - y * y
    if name == "relu":
        return (y > 0).astype(np.float64)
    return np.ones_like(y)


def forward(params: MlpParams, x) -> tuple[np.ndarray, Tape]:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != params.in_dim:
        raise InputError(f"input of shape {x.shape} does not fit a network with input width {params.in_dim}")
    inputs, outputs = [], []
    h = x
    for w, b, act in params.layers:
        inputs.append(h)
        h = _act(act, h @ w.T + b)
        outputs.append(h)
    return h, Tape(params, tuple(inputs), tuple(outputs))


def backward(tape: Tape, loss_grad, params: MlpParams | None = None) -> Gradients:
    """Gradients of a scalar loss given ``dloss/dy`` for the tape's output.

    Passing ``params`` checks that the tape was recorded with exactly those
    parameters; a tape from an earlier snapshot raises :class:`UsageError`.
    """
    if params is not None and params is not tape.params:
        raise UsageError("tape was recorded with a different parameter snapshot")
    g = np.asarray(loss_grad, dtype=np.float64)
    if g.shape != tape.outputs[-1].shape:
        raise InputError(f"loss gradient shape {g.shape} != network output shape {tape.outputs[-1].shape}")
    grads = []
    for (w, _, act), h_in, h_out in zip(
        reversed(tape.params.layers), reversed(tape.inputs), reversed(tape.outputs)
    ):
        g = g * _act_grad(act, h_out)
        grads.append((g.T @ h_in, g.sum(axis=0)))
        g = g @ w
    return Gradients(tuple(reversed(grads)), g)


@dataclass(frozen=True)
class AdamState:
    m: tuple[np.ndarray, ...]
    v: tuple[np.ndarray, ...]
    t: int = 0
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def zeros_like(cls, arrays: Sequence[np.ndarray], **hyper) -> "AdamState":
        zeros = tuple(np.zeros_like(a) for a in arrays)
        return cls(zeros, zeros, 0, **hyper)


def adam_update(arrays: Sequence[np.ndarray], grads: Sequence[np.ndarray],
                state: AdamState) -> tuple[list[np.ndarray], AdamState]:
    """Bias-corrected Adam on a flat list of arrays."""
    if len(arrays) != len(grads) or len(arrays) != len(state.m):
        raise InputError("parameter, gradient and moment lists differ in length")
    t = state.t + 1
    c1 = 1.0 - state.beta1 ** t
    c2 = 1.0 - state.beta2 ** t
    new, ms, vs = [], [], []
    for p, g, m, v in zip(arrays, grads, state.m, state.v):
        if p.shape != g.shape:
            raise InputError(f"gradient shape {g.shape} != parameter shape {p.shape}")
        m = state.beta1 * m + (1.0 - state.beta1) * g
        v = state.beta2 * v + (1.0 - state.beta2) * g * g
        new.append(p - state.lr * (m / c1) / (np.sqrt(v / c2) + state.eps))
        ms.append(m)
        vs.append(v)
    return new, AdamState(tuple(ms), tuple(vs), t, state.lr, state.beta1, state.beta2, state.eps)


def adam_step(params: MlpParams, grads: Gradients, state: AdamState) -> tuple[MlpParams, AdamState]:
    new, state = adam_update(params.arrays(), grads.arrays(), state)
    return params.with_arrays(new), state


def reparameterize(mean, log_var, seed=None, eps=None) -> tuple[np.ndarray, np.ndarray]:
    """``z = mean + exp(log_var / 2) * eps`` with seeded standard-normal ``eps``.

    ``eps`` may be supplied instead of a seed to replay a draw.  Returns
    ``(z, eps)``; keep ``eps`` for :func:`reparameterize_backward`.
    """
    mean = np.asarray(mean, dtype=np.float64)
    log_var = np.asarray(log_var, dtype=np.float64)
    if mean.shape != log_var.shape:
        raise InputError(f"mean {mean.shape} and log-variance {log_var.shape} differ in shape")
    if eps is None:
        eps = make_rng(seed).standard_normal(mean.shape)
    elif np.shape(eps) != mean.shape:
        raise InputError(f"noise shape {np.shape(eps)} != mean shape {mean.shape}")
    return mean + np.exp(0.5 * log_var) * eps, eps


def reparameterize_backward(grad_z, log_var, eps) -> tuple[np.ndarray, np.ndarray]:
    grad_z = np.asarray(grad_z, dtype=np.float64)
    return grad_z, grad_z * 0.5 * np.exp(0.5 * np.asarray(log_var)) * eps


# Checkpoint layout (UTF-8 text, one token per line after the header):
#   phomwae-mlp 1
#   layers <L>
#   then per layer: "layer <out> <in> <activation>", out*in weight values in
#   row-major order, then out bias values.
# Values use float.hex so the round trip is bit-exact.

def save_checkpoint(params: MlpParams, path) -> None:
    lines = [CHECKPOINT_MAGIC, f"layers {len(params.layers)}"]
    for w, b, act in params.layers:
        lines.append(f"layer {w.shape[0]} {w.shape[1]} {act}")
        lines.extend(float(v).hex() for v in w.ravel())
        lines.extend(float(v).hex() for v in b)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_checkpoint(path) -> MlpParams:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != CHECKPOINT_MAGIC:
        raise InputError(f"{path}: not an MLP checkpoint")
    try:
        n_layers = int(lines[1].split()[1])
        pos = 2
        layers = []
        for _ in range(n_layers):
            _, out, inp, act = lines[pos].split()
            out, inp = int(out), int(inp)
            pos += 1
            w = np.array([float.fromhex(s) for s in lines[pos:pos + out * inp]]).reshape(out, inp)
            pos += out * inp
            b = np.array([float.fromhex(s) for s in lines[pos:pos + out]])
            pos += out
            layers.append(Layer(w, b, act))
    except (IndexError, ValueError) as exc:
        raise InputError(f"{path}: malformed checkpoint ({exc})") from exc
    if pos != len(lines):
        raise InputError(f"{path}: {len(lines) - pos} trailing lines after last layer")
    return MlpParams(tuple(layers))
