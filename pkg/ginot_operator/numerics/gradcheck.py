# ginot_operator/numerics/gradcheck.py
"""中心差分梯度校验"""

import logging
from typing import Callable, Dict

import numpy as np

from .tensor import Tensor

logger = logging.getLogger(__name__)


def numeric_gradient(loss_fn: Callable[[], Tensor], param: Tensor, step: float = 1e-5) -> np.ndarray:
    """对 param 的每个元素做中心差分"""
    grad = np.zeros_like(param.data)
    for idx in np.ndindex(*param.shape):
        original = param.data[idx]
        param.data[idx] = original + step
        plus = loss_fn().item()
        param.data[idx] = original - step
        minus = loss_fn().item()
        param.data[idx] = original
        grad[idx] = (plus - minus) / (2.0 * step)
    return grad


def relative_error(analytic: np.ndarray, numeric: np.ndarray, floor: float = 1e-10) -> float:
    """按范数计算相对误差; 两者都接近 0 时视为一致"""
    scale = max(np.linalg.norm(analytic), np.linalg.norm(numeric))
    if scale < floor:
        return 0.0
    return float(np.linalg.norm(analytic - numeric) / scale)


def check_gradients(loss_fn: Callable[[], Tensor], params: Dict[str, Tensor],
                    step: float = 1e-5) -> Dict[str, float]:
    """比较解析梯度与中心差分, 返回每个参数的相对误差

    loss_fn 每次调用都必须重新构建计算图。
    """
    for p in params.values():
        p.zero_grad()
    loss_fn().backward()
    analytic = {name: (p.grad.copy() if p.grad is not None else np.zeros_like(p.data))
                for name, p in params.items()}

    errors = {}
    for name, p in params.items():
        errors[name] = relative_error(analytic[name], numeric_gradient(loss_fn, p, step))
    worst = max(errors, key=errors.get) if errors else None
    if worst is not None:
        logger.debug(f"梯度校验: 最大相对误差 {errors[worst]:.2e} @ {worst}")
    return errors
