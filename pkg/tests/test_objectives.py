import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import double_sum_mmd
from phomwae.errors import InputError
from phomwae.objectives import (
    KernelConfig,
    TrainConfig,
    kl_gaussian,
    mmd,
    mmd_with_grad,
    reconstruction_cost,
    sample_prior,
    vae_loss,
    wae_loss,
)

from oracles import central_diff


def test_reconstruction_zero():
    x = np.random.default_rng(0).normal(size=(4, 3))
    assert reconstruction_cost(x, x) == 0.0


def test_reconstruction_single_row():
    assert reconstruction_cost([[0.0, 0.0]], [[3.0, 4.0]]) == 25.0


def test_reconstruction_loop():
    rng = np.random.default_rng(1)
    x, y = rng.normal(size=(5, 3)), rng.normal(size=(5, 3))
    ref = sum(sum((x[i, j] - y[i, j]) ** 2 for j in range(3)) for i in range(5)) / 5
    assert reconstruction_cost(x, y) == pytest.approx(ref, rel=1e-14)


def test_reconstruction_shape_mismatch():
    with pytest.raises(InputError):
        reconstruction_cost(np.zeros((2, 3)), np.zeros((2, 2)))


def test_mmd_linear_kernel_hand_value():
    z = np.array([[0.0], [2.0]])
    assert mmd(z, z, KernelConfig("linear")) == -2.0


@pytest.mark.parametrize("family", ["imq", "gaussian", "linear"])
def test_biased_mmd_identical_sets_is_zero(family):
    z = np.random.default_rng(2).normal(size=(6, 2))
    assert mmd(z, z, KernelConfig(family), unbiased=False) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("family", ["imq", "gaussian"])
@pytest.mark.parametrize("seed", range(5))
def test_mmd_double_sum(family, seed):
    rng = np.random.default_rng(seed)
    zq, zp = rng.normal(size=(7, 2)), rng.normal(size=(9, 2)) + 0.3
    k = KernelConfig(family)
    scale = k.resolved_scale(2)
    assert mmd(zq, zp, k) == pytest.approx(double_sum_mmd(zq, zp, family, scale), abs=1e-10)


def test_mmd_needs_two_samples():
    with pytest.raises(InputError):
        mmd(np.zeros((1, 2)), np.zeros((3, 2)))


@given(st.integers(0, 10_000))
@settings(max_examples=25, deadline=None)
def test_mmd_symmetric(seed):
    rng = np.random.default_rng(seed)
    a, b = rng.normal(size=(5, 2)), rng.normal(size=(5, 2))
    for fam in ("imq", "gaussian"):
        assert mmd(a, b, KernelConfig(fam)) == mmd(b, a, KernelConfig(fam))


@given(st.integers(0, 10_000), st.floats(0, 2 * np.pi))
@settings(max_examples=25, deadline=None)
def test_gaussian_mmd_rotation_invariant(seed, angle):
    rng = np.random.default_rng(seed)
    a, b = rng.normal(size=(6, 2)), rng.normal(size=(6, 2))
    c, s = np.cos(angle), np.sin(angle)
    r = np.array([[c, -s], [s, c]])
    k = KernelConfig("gaussian")
    assert mmd(a @ r.T, b @ r.T, k) == pytest.approx(mmd(a, b, k), abs=1e-9)


@pytest.mark.parametrize("family", ["imq", "gaussian", "linear"])
@pytest.mark.parametrize("unbiased", [True, False])
def test_mmd_gradient(family, unbiased):
    rng = np.random.default_rng(3)
    zq, zp = rng.normal(size=(5, 2)), rng.normal(size=(6, 2))
    k = KernelConfig(family)
    _, g = mmd_with_grad(zq, zp, k, unbiased)
    arrays = [zq.copy()]
    fd = central_diff(lambda: mmd(arrays[0], zp, k, unbiased), arrays)[0]
    assert np.allclose(g, fd, atol=1e-8, rtol=1e-5)


def test_wae_loss_lambda_zero():
    rng = np.random.default_rng(4)
    x, xr, zq, zp = (rng.normal(size=s) for s in [(8, 3), (8, 3), (8, 2), (8, 2)])
    assert wae_loss(x, xr, zq, zp, TrainConfig(lam=0.0)).value == reconstruction_cost(x, xr)


def test_wae_loss_penalty_isolated():
    rng = np.random.default_rng(5)
    x, z = rng.normal(size=(8, 3)), rng.normal(size=(8, 2))
    cfg = TrainConfig(lam=15.0)
    assert wae_loss(x, x, z, z, cfg).value == pytest.approx(15.0 * mmd(z, z, cfg.kernel), rel=1e-14)


def test_wae_loss_term_sum():
    rng = np.random.default_rng(6)
    x, xr, zq, zp = (rng.normal(size=s) for s in [(8, 3), (8, 3), (8, 2), (8, 2)])
    cfg = TrainConfig(lam=3.0, kernel=KernelConfig("gaussian"))
    expected = reconstruction_cost(x, xr) + 3.0 * double_sum_mmd(zq, zp, "gaussian", 1.0)
    assert wae_loss(x, xr, zq, zp, cfg).value == pytest.approx(expected, rel=1e-12)


def test_kl_zero_at_prior():
    assert kl_gaussian(np.zeros((3, 2)), np.zeros((3, 2))) == 0.0


def test_kl_unit_shift():
    assert kl_gaussian([[1.0]], [[0.0]]) == 0.5


def test_kl_loop():
    rng = np.random.default_rng(7)
    m, lv = rng.normal(size=(4, 3)), rng.normal(size=(4, 3))
    ref = sum(0.5 * sum(m[i, j] ** 2 + np.exp(lv[i, j]) - lv[i, j] - 1 for j in range(3)) for i in range(4)) / 4
    assert kl_gaussian(m, lv) == pytest.approx(ref, rel=1e-14)


@given(st.integers(0, 10_000))
@settings(max_examples=25)
def test_kl_non_negative(seed):
    rng = np.random.default_rng(seed)
    assert kl_gaussian(rng.normal(size=(3, 2)) * 3, rng.normal(size=(3, 2)) * 3) >= 0


def test_vae_loss_cases():
    rng = np.random.default_rng(8)
    x = rng.normal(size=(4, 3))
    zero = np.zeros((4, 2))
    assert vae_loss(x, x, zero, zero).value == 0.0
    m, lv = rng.normal(size=(4, 2)), rng.normal(size=(4, 2))
    assert vae_loss(x, x, m, lv).value == kl_gaussian(m, lv)
    xr = rng.normal(size=(4, 3))
    assert vae_loss(x, xr, m, lv).value == pytest.approx(reconstruction_cost(x, xr) + kl_gaussian(m, lv), rel=1e-14)


def test_sample_prior():
    assert np.array_equal(sample_prior(5, 2, 3), sample_prior(5, 2, 3))
    z = sample_prior(10_000, 2, 0)
    assert np.all(np.abs(z.mean(axis=0)) <= 0.05)
    assert np.all(np.abs(z.var(axis=0) - 1) <= 0.1)
    one = sample_prior(1, 2, 0)
    assert one.shape == (1, 2) and np.all(np.isfinite(one))


@pytest.mark.parametrize("kwargs", [dict(lam=-1), dict(batch=1), dict(model="gan"), dict(kernel={"family": "imq", "scale": -1.0})])
def test_config_validation(kwargs):
    with pytest.raises(InputError):
        TrainConfig(**kwargs)


def test_config_dict_round_trip():
    cfg = TrainConfig(lam=2.5, hidden=(8, 4), kernel=KernelConfig("gaussian", 0.5))
    assert TrainConfig.from_dict(cfg.to_dict()) == cfg
