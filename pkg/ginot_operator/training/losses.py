# ginot_operator/training/losses.py
"""带掩码的 MSE 与 L2 相对误差"""

import numpy as np

from ..model import FieldBatch
from ..numerics import Tensor
from ..utils.errors import MetricError, ShapeError


def masked_mse(pred: FieldBatch, target: FieldBatch) -> Tensor:
    """MSE = Σ m_i·(y_i - ŷ_i)² / (1 + Σ m_i)

    分子对所有行与通道求和, m_i 为行掩码; 填充行不影响结果。

    Raises:
        ShapeError: 形状或掩码不一致
    """
    if pred.values.shape != target.values.shape:
        raise ShapeError(f"预测形状 {pred.values.shape} 与目标形状 {target.values.shape} 不一致")
    if not np.array_equal(pred.valid, target.valid):
        raise ShapeError("预测与目标的有效掩码不一致")
    mask = target.valid.astype(np.float64)[..., None]
    diff = (pred.values - target.values) * mask
    return (diff * diff).sum() * (1.0 / (1.0 + mask.sum()))


def l2_relative_error(pred: np.ndarray, target: np.ndarray, mask: np.ndarray) -> float:
    """‖y - ŷ‖₂ / ‖y‖₂, 只统计有效行, 所有通道展平

    Raises:
        MetricError: 目标在有效行上的范数为 0
    """
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if pred.shape != target.shape:
        raise ShapeError(f"预测形状 {pred.shape} 与目标形状 {target.shape} 不一致")
    keep = np.asarray(mask, dtype=bool)
    ref = np.linalg.norm(target[keep])
    if ref == 0.0:
        raise MetricError("参考解在有效行上的范数为 0, 相对误差无定义")
    return float(np.linalg.norm(target[keep] - pred[keep]) / ref)
