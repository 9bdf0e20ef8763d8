# ginot_operator/numerics/test_functional.py
"""注意力与层归一化的数值性质测试"""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ginot_operator.numerics import Tensor, layer_norm, scaled_dot_attention, softmax
from ginot_operator.utils.errors import AttentionMaskError, ShapeError


def _t(a):
    return Tensor(np.asarray(a, dtype=np.float64))


def test_single_key_returns_its_value():
    q = k = v = _t([[[1.0, 0.0]]])
    out = scaled_dot_attention(q, k, v)
    np.testing.assert_allclose(out.data, [[[1.0, 0.0]]])


def test_identical_keys_give_uniform_weights():
    q = _t([[[0.3, -2.0]]])
    k = _t([[[1.0, 1.0], [1.0, 1.0]]])
    v = _t([[[1.0, 0.0], [0.0, 1.0]]])
    out = scaled_dot_attention(q, k, v)
    np.testing.assert_allclose(out.data, [[[0.5, 0.5]]], atol=1e-15)


def test_masked_keys_equal_reslice():
    rng = np.random.default_rng(3)
    q = rng.normal(size=(2, 4, 3))
    k = rng.normal(size=(2, 5, 3))
    v = rng.normal(size=(2, 5, 3))
    mask = np.array([True, True, True, False, False])
    masked = scaled_dot_attention(_t(q), _t(k), _t(v), mask)
    sliced = scaled_dot_attention(_t(q), _t(k[:, :3]), _t(v[:, :3]))
    np.testing.assert_allclose(masked.data, sliced.data, atol=1e-12)


def test_all_false_mask_raises():
    x = _t(np.ones((1, 2, 2)))
    with pytest.raises(AttentionMaskError, match="no attendable keys"):
        scaled_dot_attention(x, x, x, np.array([False, False]))


def test_shape_mismatch_raises():
    with pytest.raises(ShapeError):
        scaled_dot_attention(_t(np.ones((1, 2, 3))), _t(np.ones((1, 2, 4))), _t(np.ones((1, 2, 4))))


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000), n_keys=st.integers(2, 9), junk=st.floats(-1e6, 1e6))
def test_masked_rows_do_not_influence_output(seed, n_keys, junk):
    rng = np.random.default_rng(seed)
    q = rng.normal(size=(3, 4, 5))
    k = rng.normal(size=(3, n_keys, 5))
    v = rng.normal(size=(3, n_keys, 5))
    mask = rng.random(n_keys) < 0.6
    mask[0] = True
    base = scaled_dot_attention(_t(q), _t(k), _t(v), mask).data

    k2, v2 = k.copy(), v.copy()
    k2[:, ~mask] = junk
    v2[:, ~mask] = -junk
    perturbed = scaled_dot_attention(_t(q), _t(k2), _t(v2), mask).data
    assert np.max(np.abs(base - perturbed)) <= 1e-12


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_attention_weights_sum_to_one(seed):
    rng = np.random.default_rng(seed)
    scores = _t(rng.normal(size=(2, 3, 6)) * 10)
    weights = softmax(scores)
    np.testing.assert_allclose(weights.data.sum(axis=-1), 1.0, atol=1e-9)


def test_layer_norm_constant_slice_is_zero():
    out = layer_norm(_t([3.0, 3.0, 3.0]), _t(np.ones(3)), _t(np.zeros(3)), 1e-5)
    np.testing.assert_allclose(out.data, 0.0, atol=1e-15)


def test_layer_norm_already_standardised():
    out = layer_norm(_t([1.0, -1.0]), _t(np.ones(2)), _t(np.zeros(2)), 1e-14)
    np.testing.assert_allclose(out.data, [1.0, -1.0], atol=1e-12)


def test_layer_norm_matches_direct_formula():
    rng = np.random.default_rng(7)
    x = rng.normal(size=4)
    gain, bias = rng.normal(size=4), rng.normal(size=4)
    mean = sum(x) / 4
    var = sum((xi - mean) ** 2 for xi in x) / 4
    expected = [(xi - mean) / math.sqrt(var + 1e-5) * g + b for xi, g, b in zip(x, gain, bias)]
    out = layer_norm(_t(x), _t(gain), _t(bias), 1e-5)
    np.testing.assert_allclose(out.data, expected, atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000), d=st.integers(2, 16))
def test_layer_norm_output_statistics(seed, d):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(5, d)) * rng.uniform(0.5, 20)
    out = layer_norm(_t(x), _t(np.ones(d)), _t(np.zeros(d)), 1e-12).data
    assert np.all(np.abs(out.mean(axis=-1)) < 1e-9)
    assert np.all(np.abs(out.var(axis=-1) - 1.0) < 1e-6)
