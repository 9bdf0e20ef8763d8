# ginot_operator/numerics/test_optim.py
"""Adam 更新与平台期调度测试"""

import numpy as np
import pytest

from ginot_operator.numerics import OptimizerKind, OptimizerState, adam_step, clip_grad_norm, parameter, plateau_schedule
from ginot_operator.utils.errors import ConfigError, GradientError


def test_zero_gradient_leaves_parameters_unchanged():
    p = parameter(np.array([1.0, -2.0]))
    state = OptimizerState()
    adam_step(state, {"p": p}, {"p": np.zeros(2)})
    np.testing.assert_array_equal(p.data, [1.0, -2.0])


def test_first_step_moves_by_learning_rate():
    p = parameter(np.array(0.5))
    state = OptimizerState(learning_rate=0.001)
    adam_step(state, {"p": p}, {"p": np.array(1.0)})
    assert p.data == pytest.approx(0.5 - 0.001, abs=1e-9)
    assert state.step_count == 1


def test_second_moment_positive_under_oscillation():
    p = parameter(np.array([0.0]))
    state = OptimizerState()
    adam_step(state, {"p": p}, {"p": np.array([1.0])})
    adam_step(state, {"p": p}, {"p": np.array([-1.0])})
    assert state.second_moment["p"][0] > 0


def test_non_finite_gradient_names_parameter():
    p = parameter(np.zeros(2))
    with pytest.raises(GradientError, match="decoder.w"):
        adam_step(OptimizerState(), {"decoder.w": p}, {"decoder.w": np.array([np.nan, 0.0])})


def test_adamw_decays_weights_with_zero_gradient():
    p = parameter(np.array([2.0]))
    state = OptimizerState(learning_rate=0.1, weight_decay=0.5, kind=OptimizerKind.ADAMW)
    adam_step(state, {"p": p}, {"p": np.zeros(1)})
    assert p.data[0] == pytest.approx(2.0 * (1 - 0.05))


def _run_schedule(metrics, patience, factor, lr=0.001):
    state = OptimizerState(learning_rate=lr, plateau_patience=patience, plateau_factor=factor)
    reduced_at = []
    for epoch, metric in enumerate(metrics, start=1):
        if plateau_schedule(state, metric):
            reduced_at.append(epoch)
    return state, reduced_at


def test_plateau_monotone_improvement_keeps_lr():
    state, reduced = _run_schedule([1.0, 0.9, 0.8], patience=2, factor=0.7)
    assert reduced == []
    assert state.learning_rate == 0.001


def test_plateau_flat_metric_reduces_after_patience():
    state, reduced = _run_schedule([1.0, 1.0, 1.0], patience=2, factor=0.7)
    assert reduced == [3]
    assert state.learning_rate == pytest.approx(0.0007)


def test_plateau_patience_one_halves_twice():
    state, reduced = _run_schedule([1.0, 2.0, 0.5, 2.0], patience=1, factor=0.5)
    assert reduced == [2, 4]
    assert state.learning_rate == pytest.approx(0.00025)


def test_invalid_factor_is_config_error():
    with pytest.raises(ConfigError):
        OptimizerState(plateau_factor=1.5)


def test_clip_grad_norm_scales_to_max():
    grads = {"a": np.array([3.0]), "b": np.array([4.0])}
    norm = clip_grad_norm(grads, 1.0)
    assert norm == pytest.approx(5.0)
    total = np.sqrt(grads["a"] ** 2 + grads["b"] ** 2)
    assert total[0] == pytest.approx(1.0, rel=1e-9)
