# ginot_operator/numerics/optim.py
"""
Adam / AdamW 优化器与平台期学习率调度

- 单写者: 一个训练步独占全部参数与动量缓冲
- 学习率只会通过乘以 plateau_factor 降低
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional

import numpy as np

from .tensor import Tensor
from ..utils.errors import ConfigError, GradientError, ShapeError

logger = logging.getLogger(__name__)


class OptimizerKind(Enum):
    ADAM = "adam"
    ADAMW = "adamw"


@dataclass
class OptimizerState:
    """优化器状态 (动量、步数、学习率与平台期计数)"""
    learning_rate: float = 1e-3
    plateau_patience: int = 40
    plateau_factor: float = 0.7
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    weight_decay: float = 0.0
    kind: OptimizerKind = OptimizerKind.ADAM
    step_count: int = 0
    best_metric: float = math.inf
    epochs_since_improvement: int = 0
    first_moment: Dict[str, np.ndarray] = field(default_factory=dict)
    second_moment: Dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ConfigError(f"learning_rate 必须为正, 当前 {self.learning_rate}", field="initial_learning_rate")
        if self.plateau_patience < 1:
            raise ConfigError(f"plateau_patience 必须 ≥ 1, 当前 {self.plateau_patience}", field="scheduler_patience")
        if not 0.0 < self.plateau_factor < 1.0:
            raise ConfigError(f"plateau_factor 必须在 (0,1) 内, 当前 {self.plateau_factor}", field="scheduler_factor")

    def scalars(self) -> Dict[str, float]:
        """可写入 manifest 的标量部分"""
        return {
            "learning_rate": self.learning_rate,
            "step_count": self.step_count,
            "best_metric": self.best_metric if math.isfinite(self.best_metric) else None,
            "epochs_since_improvement": self.epochs_since_improvement,
        }

    def restore_scalars(self, values: Dict[str, Optional[float]]) -> None:
        self.learning_rate = float(values["learning_rate"])
        self.step_count = int(values["step_count"])
        best = values.get("best_metric")
        self.best_metric = math.inf if best is None else float(best)
        self.epochs_since_improvement = int(values["epochs_since_improvement"])


def adam_step(state: OptimizerState, params: Dict[str, Tensor], grads: Dict[str, np.ndarray]) -> None:
    """原地执行一步 Adam (带偏差修正); AdamW 时先做解耦权重衰减

    Raises:
        GradientError: 某个梯度含 NaN/Inf (错误信息带参数名)
        ShapeError: 梯度与参数形状不一致
    """
    for name, g in grads.items():
        if not np.all(np.isfinite(g)):
            raise GradientError(f"参数 {name} 的梯度含非有限值", parameter=name)
        if g.shape != params[name].shape:
            raise ShapeError(f"参数 {name} 梯度形状 {g.shape} 与参数 {params[name].shape} 不一致")

    state.step_count += 1
    t = state.step_count
    lr = state.learning_rate
    correction1 = 1.0 - state.beta1 ** t
    correction2 = 1.0 - state.beta2 ** t

    for name, g in grads.items():
        p = params[name]
        m = state.first_moment.get(name)
        v = state.second_moment.get(name)
        if m is None:
            m = np.zeros_like(p.data)
            v = np.zeros_like(p.data)
        m = state.beta1 * m + (1.0 - state.beta1) * g
        v = state.beta2 * v + (1.0 - state.beta2) * g * g
        state.first_moment[name] = m
        state.second_moment[name] = v

        if state.kind is OptimizerKind.ADAMW and state.weight_decay > 0:
            p.data = p.data - lr * state.weight_decay * p.data
        p.data = p.data - lr * (m / correction1) / (np.sqrt(v / correction2) + state.eps)


def plateau_schedule(state: OptimizerState, epoch_metric: float) -> bool:
    """按 epoch 指标更新平台期计数, 连续 patience 个 epoch 无严格改进则降学习率

    Returns:
        本次是否降低了学习率
    """
    if epoch_metric < state.best_metric:
        state.best_metric = epoch_metric
        state.epochs_since_improvement = 0
        return False

    state.epochs_since_improvement += 1
    if state.epochs_since_improvement >= state.plateau_patience:
        old = state.learning_rate
        state.learning_rate = old * state.plateau_factor
        state.epochs_since_improvement = 0
        logger.info(f"🔄 学习率平台期衰减: {old:.3g} → {state.learning_rate:.3g}")
        return True
    return False


def clip_grad_norm(grads: Dict[str, np.ndarray], max_norm: float) -> float:
    """按全局范数裁剪梯度 (原地), 返回裁剪前的范数"""
    total = math.sqrt(sum(float(np.sum(g * g)) for g in grads.values()))
    if max_norm > 0 and total > max_norm:
        scale = max_norm / (total + 1e-12)
        for name in grads:
            grads[name] = grads[name] * scale
    return total


class Adam:
    """把参数字典与 OptimizerState 绑在一起的便捷封装"""

    def __init__(self, params: Dict[str, Tensor], state: OptimizerState):
        self.params = params
        self.state = state

    def collect_grads(self) -> Dict[str, np.ndarray]:
        return {name: (p.grad if p.grad is not None else np.zeros_like(p.data))
                for name, p in self.params.items()}

    def step(self, grads: Optional[Dict[str, np.ndarray]] = None) -> None:
        adam_step(self.state, self.params, grads if grads is not None else self.collect_grads())

    def zero_grad(self) -> None:
        for p in self.params.values():
            p.zero_grad()
