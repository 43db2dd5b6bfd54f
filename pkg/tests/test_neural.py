import numpy as np
import pytest

from oracles import central_diff, loop_forward
from phomwae.errors import InputError, UsageError
from phomwae.neural import (
    AdamState,
    Layer,
    MlpParams,
    adam_step,
    adam_update,
    backward,
    forward,
    init_mlp,
    load_checkpoint,
    reparameterize,
    reparameterize_backward,
    save_checkpoint,
)


def single(w, b, act="linear"):
    return MlpParams((Layer(np.asarray(w, float), np.asarray(b, float), act),))


def rel_err(a, b, floor=1e-6):
    return np.max(np.abs(a - b) / np.maximum(np.maximum(np.abs(a), np.abs(b)), floor))


def test_identity_layer():
    x = np.random.default_rng(0).normal(size=(5, 3))
    y, _ = forward(single(np.eye(3), np.zeros(3)), x)
    assert np.array_equal(y, x)


def test_zero_layer():
    y, _ = forward(single(np.zeros((2, 3)), np.zeros(2)), np.ones((4, 3)))
    assert np.array_equal(y, np.zeros((4, 2)))


def test_forward_matches_loop():
    rng = np.random.default_rng(1)
    net = init_mlp([4, 5, 3], "tanh", seed=2)
    net = net.with_arrays([a + 0.1 * rng.normal(size=a.shape) for a in net.arrays()])
    x = rng.normal(size=(6, 4))
    y, _ = forward(net, x)
    assert np.allclose(y, loop_forward(net.layers, x), atol=1e-13, rtol=0)


def test_forward_shape_mismatch():
    with pytest.raises(InputError):
        forward(init_mlp([3, 2]), np.ones((2, 4)))


def test_layer_shape_mismatch():
    with pytest.raises(InputError):
        MlpParams((Layer(np.ones((2, 3)), np.ones(2), "tanh"), Layer(np.ones((1, 3)), np.ones(1), "linear")))


def test_linear_sum_loss_gradient():
    x = np.array([[1.0, 2.0], [3.0, -1.0], [0.5, 0.5]])
    net = single(np.ones((3, 2)), np.zeros(3))
    y, tape = forward(net, x)
    g = backward(tape, np.ones_like(y))
    (dw, db), = g.layers
    assert np.array_equal(dw, np.tile(x.sum(axis=0), (3, 1)))
    assert np.array_equal(db, np.full(3, 3.0))


def test_zero_input_gradients():
    net = single(np.random.default_rng(0).normal(size=(2, 3)), np.zeros(2))
    y, tape = forward(net, np.zeros((4, 3)))
    lg = np.random.default_rng(1).normal(size=y.shape)
    (dw, db), = backward(tape, lg).layers
    assert np.array_equal(dw, np.zeros((2, 3)))
    assert np.allclose(db, lg.sum(axis=0))


def test_stale_tape():
    net = init_mlp([2, 2])
    y, tape = forward(net, np.ones((1, 2)))
    newer = net.with_arrays(net.arrays())
    with pytest.raises(UsageError):
        backward(tape, np.ones_like(y), params=newer)
    backward(tape, np.ones_like(y), params=net)


def test_params_are_read_only():
    net = init_mlp([2, 2])
    with pytest.raises(ValueError):
        net.layers[0].weight[0, 0] = 1.0


@pytest.mark.parametrize("seed", range(10))
@pytest.mark.parametrize("act", ["tanh", "linear"])
def test_gradients_match_finite_differences(seed, act):
    rng = np.random.default_rng(seed)
    sizes = [int(v) for v in rng.integers(1, 5, size=rng.integers(2, 5))]
    net = init_mlp(sizes, act, seed=seed)
    x = rng.normal(size=(5, sizes[0]))
    target = rng.normal(size=(5, sizes[-1]))
    arrays = [np.array(a) for a in net.arrays()] + [x.copy()]

    def loss():
        y, _ = forward(net.with_arrays(arrays[:-1]), arrays[-1])
        return float(np.sum((y - target) ** 2 * 0.5) + np.sum(np.sin(y)))

    y, tape = forward(net, x)
    g = backward(tape, (y - target) + np.cos(y))
    fd = central_diff(loss, arrays)
    for analytic, numeric in zip(g.arrays() + [g.input], fd):
        assert rel_err(analytic, numeric) <= 1e-4


def test_adam_zero_gradient():
    p = [np.array([1.0, -2.0])]
    state = AdamState.zeros_like(p)
    new, state = adam_update(p, [np.zeros(2)], state)
    assert np.array_equal(new[0], p[0]) and state.t == 1


@pytest.mark.parametrize("g", [3.0, -0.2, 1e-3])
def test_adam_first_step_magnitude(g):
    state = AdamState.zeros_like([np.zeros(1)], lr=1e-3)
    new, _ = adam_update([np.zeros(1)], [np.array([g])], state)
    assert new[0][0] == pytest.approx(-1e-3 * g / (abs(g) + 1e-8), rel=1e-12)


def test_adam_two_steps_hand_recurrence():
    g, lr, b1, b2, eps = 0.5, 0.01, 0.9, 0.999, 1e-8
    p = np.array([1.0])
    state = AdamState.zeros_like([p], lr=lr, beta1=b1, beta2=b2, eps=eps)
    out, state = adam_update([p], [np.array([g])], state)
    out, state = adam_update(out, [np.array([g])], state)
    m1, v1 = 0.1 * g, 0.001 * g * g
    x1 = 1.0 - lr * (m1 / 0.1) / (np.sqrt(v1 / 0.001) + eps)
    m2, v2 = 0.9 * m1 + 0.1 * g, 0.999 * v1 + 0.001 * g * g
    x2 = x1 - lr * (m2 / (1 - 0.81)) / (np.sqrt(v2 / (1 - 0.999 ** 2)) + eps)
    assert out[0][0] == pytest.approx(x2, rel=1e-14)
    assert state.t == 2


def test_adam_zero_lr_identity():
    net = init_mlp([3, 4, 2], seed=1)
    y, tape = forward(net, np.ones((2, 3)))
    state = AdamState.zeros_like(net.arrays(), lr=0.0)
    new, _ = adam_step(net, backward(tape, np.ones_like(y)), state)
    assert new.equal(net)


def test_reparameterize_zero_variance():
    mean = np.random.default_rng(0).normal(size=(4, 2))
    z, _ = reparameterize(mean, np.full((4, 2), -50.0), seed=1)
    assert np.allclose(z, mean, atol=1e-9, rtol=0)


def test_reparameterize_unit_variance():
    z, _ = reparameterize(np.zeros((20000, 2)), np.zeros((20000, 2)), seed=3)
    assert np.all(np.abs(z.var(axis=0) - 1) <= 0.1)


def test_reparameterize_deterministic():
    a, _ = reparameterize(np.zeros((3, 2)), np.zeros((3, 2)), seed=9)
    b, _ = reparameterize(np.zeros((3, 2)), np.zeros((3, 2)), seed=9)
    assert np.array_equal(a, b)


def test_reparameterize_gradient():
    rng = np.random.default_rng(4)
    mean, lv = rng.normal(size=(3, 2)), rng.normal(size=(3, 2))
    w = rng.normal(size=(3, 2))
    z, eps = reparameterize(mean, lv, seed=5)
    gm, glv = reparameterize_backward(w, lv, eps)
    arrays = [mean.copy(), lv.copy()]
    fd = central_diff(lambda: float(np.sum(w * reparameterize(arrays[0], arrays[1], eps=eps)[0])), arrays)
    assert rel_err(gm, fd[0]) <= 1e-6 and rel_err(glv, fd[1]) <= 1e-6


def test_checkpoint_round_trip(tmp_path):
    net = init_mlp([29, 32, 16, 4], "tanh", seed=7)
    path = tmp_path / "enc.ckpt"
    save_checkpoint(net, path)
    assert load_checkpoint(path).equal(net)


def test_checkpoint_rejects_garbage(tmp_path):
    path = tmp_path / "bad.ckpt"
    path.write_text("phomwae-mlp 1\nlayers 1\nlayer 2 2 tanh\n0x1p0\n")
    with pytest.raises(InputError):
        load_checkpoint(path)
