# ginot_operator/numerics/test_tensor.py
"""反向传播与梯度正确性测试"""

import numpy as np
import pytest

from ginot_operator.numerics import (
    AttentionBlock,
    Tensor,
    concat,
    gelu,
    layer_norm,
    parameter,
    softmax,
)
from ginot_operator.numerics.gradcheck import check_gradients, numeric_gradient, relative_error
from ginot_operator.utils.errors import ShapeError


def test_linear_function_gradient_equals_input():
    x = np.array([1.5, -2.0, 0.25])
    w = parameter(np.array([0.3, 0.1, -0.7]))
    (w * x).sum().backward()
    np.testing.assert_array_equal(w.grad, x)


def test_repeated_backward_accumulates():
    x = np.array([1.0, 2.0])
    w = parameter(np.array([0.5, 0.5]))
    (w * x).sum().backward()
    (w * x).sum().backward()
    np.testing.assert_array_equal(w.grad, 2 * x)


def test_backward_on_non_scalar_raises():
    w = parameter(np.ones(3))
    with pytest.raises(ShapeError):
        (w * 2.0).backward()


def test_softmax_composite_matches_finite_differences():
    z = parameter(np.array([0.2, -1.3, 0.7]))
    target = np.array([0.1, 0.6, 0.3])

    def loss():
        return -(softmax(z).log() * target).sum()

    z.zero_grad()
    loss().backward()
    numeric = numeric_gradient(loss, z, step=1e-5)
    assert relative_error(z.grad, numeric) < 1e-6


def test_shared_subexpression_gradient():
    a = parameter(np.array([[1.0, 2.0], [3.0, -1.0]]))
    errors = check_gradients(lambda: ((a @ a) * a).sum() + (a @ a).sum(), {"a": a})
    assert errors["a"] < 1e-6


@pytest.mark.parametrize("seed", range(20))
def test_elementwise_and_shape_ops_gradients(seed):
    rng = np.random.default_rng(seed)
    x = parameter(rng.normal(size=(2, 3, 4)))
    y = parameter(rng.normal(size=(4,)) + 3.0)
    g = parameter(rng.normal(size=(4,)))
    b = parameter(rng.normal(size=(4,)))
    idx = rng.integers(0, 3, size=(2, 5))

    def loss():
        h = gelu(x / y - x * 0.5) ** 2
        h = layer_norm(h, g, b, 1e-5)
        picked = h[np.arange(2)[:, None], idx]
        joined = concat([picked, picked.max(axis=1).reshape(2, 1, 4)], axis=1)
        return joined.transpose(0, 2, 1).mean() + (joined.exp() * 1e-2).sum()

    errors = check_gradients(loss, {"x": x, "y": y, "g": g, "b": b})
    assert max(errors.values()) < 1e-4


@pytest.mark.parametrize("seed", range(20))
def test_attention_block_parameter_gradients(seed):
    rng = np.random.default_rng(100 + seed)
    block = AttentionBlock(8, 2, rng)
    x = Tensor(rng.normal(size=(1, 3, 8)))
    kv = Tensor(rng.normal(size=(1, 4, 8)))
    mask = np.array([[True, True, True, False]])
    weights = rng.normal(size=(1, 3, 8))

    def loss():
        return (block(x, kv, mask) * weights).sum()

    errors = check_gradients(loss, block.parameters())
    assert max(errors.values()) < 1e-4, errors
