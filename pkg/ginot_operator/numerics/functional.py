# ginot_operator/numerics/functional.py
"""
神经网络基础算子: linear / softmax / layer_norm / gelu / 缩放点积注意力

每个算子都是 Tensor 上的可微函数, 前向用 numpy 完成, 反向给出解析梯度。
"""

import logging
import math
from typing import Optional

import numpy as np

from .tensor import Tensor, as_tensor
from ..utils.errors import AttentionMaskError, ShapeError

logger = logging.getLogger(__name__)

# 被屏蔽的注意力分数; 用最小有限值而不是 -inf, 避免 softmax 平移时出现 inf - inf
MASKED_SCORE = np.finfo(np.float64).min

_GELU_C = math.sqrt(2.0 / math.pi)


def linear(x: Tensor, weight: Tensor, bias: Optional[Tensor] = None) -> Tensor:
    """y = x @ W + b, W 形状 [in_dim, out_dim]"""
    if x.shape[-1] != weight.shape[0]:
        raise ShapeError(f"linear: 输入维度 {x.shape[-1]} 与权重 {weight.shape} 不一致")
    out = x @ weight
    return out + bias if bias is not None else out


def softmax(x: Tensor, axis: int = -1) -> Tensor:
    """数值稳定的 softmax"""
    a = x.data
    shifted = a - a.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    y = e / e.sum(axis=axis, keepdims=True)

    def backward(g):
        return (y * (g - (g * y).sum(axis=axis, keepdims=True)),)

    return Tensor._make(y, (x,), backward, "softmax")


def gelu(x: Tensor) -> Tensor:
    """GELU (tanh 近似)"""
    a = x.data
    inner = _GELU_C * (a + 0.044715 * a ** 3)
    t = np.tanh(inner)
    y = 0.5 * a * (1.0 + t)

    def backward(g):
        d_inner = _GELU_C * (1.0 + 3 * 0.044715 * a ** 2)
        return (g * (0.5 * (1.0 + t) + 0.5 * a * (1.0 - t * t) * d_inner),)

    return Tensor._make(y, (x,), backward, "gelu")


def layer_norm(x: Tensor, gain: Tensor, bias: Tensor, eps: float = 1e-5) -> Tensor:
    """沿最后一维做层归一化 (总体方差 + eps), 再做仿射

    Args:
        x: [..., d]
        gain: [d]
        bias: [d]
        eps: 方差平滑项, 必须 > 0
    """
    d = x.shape[-1]
    if gain.shape != (d,) or bias.shape != (d,):
        raise ShapeError(f"layer_norm: gain {gain.shape} / bias {bias.shape} 与最后一维 {d} 不一致")
    if eps <= 0:
        raise ShapeError(f"layer_norm: eps 必须为正, 当前 {eps}")

    a = x.data
    mu = a.mean(axis=-1, keepdims=True)
    centered = a - mu
    var = (centered * centered).mean(axis=-1, keepdims=True)
    inv_std = 1.0 / np.sqrt(var + eps)
    x_hat = centered * inv_std
    w, b = gain.data, bias.data
    out = x_hat * w + b

    def backward(g):
        g_hat = g * w
        gx = inv_std * (g_hat - g_hat.mean(axis=-1, keepdims=True)
                        - x_hat * (g_hat * x_hat).mean(axis=-1, keepdims=True))
        lead = tuple(range(g.ndim - 1))
        return gx, (g * x_hat).sum(axis=lead), g.sum(axis=lead)

    return Tensor._make(out, (x, gain, bias), backward, "layer_norm")


def masked_fill(scores: Tensor, keep: np.ndarray, value: float = MASKED_SCORE) -> Tensor:
    """keep 为 False 的位置替换为 value, 这些位置不回传梯度"""
    keep = np.broadcast_to(keep, scores.shape)
    out = np.where(keep, scores.data, value)
    return Tensor._make(out, (scores,), lambda g: (np.where(keep, g, 0.0),), "masked_fill")


def scaled_dot_attention(q: Tensor, k: Tensor, v: Tensor,
                         key_mask: Optional[np.ndarray] = None) -> Tensor:
    """缩放点积注意力 softmax(q·kᵀ/√d_h)·v

    Args:
        q: [..., h, N_q, d_h]
        k: [..., h, N_k, d_h]
        v: [..., h, N_k, d_h]
        key_mask: 布尔数组, 形状可广播到 q.shape[:-2] + (N_k,); True 表示可被关注

    Returns:
        [..., h, N_q, d_h]

    Raises:
        ShapeError: 维度不一致
        AttentionMaskError: 某一行 key_mask 全为 False
    """
    q, k, v = as_tensor(q), as_tensor(k), as_tensor(v)
    d_h = q.shape[-1]
    if d_h < 1 or k.shape[-1] != d_h:
        raise ShapeError(f"attention: q 的头维度 {q.shape} 与 k {k.shape} 不一致")
    if k.shape[-2] != v.shape[-2]:
        raise ShapeError(f"attention: k {k.shape} 与 v {v.shape} 的 key 数不一致")

    scores = (q @ k.swapaxes(-1, -2)) * (1.0 / math.sqrt(d_h))
    if key_mask is not None:
        mask = np.asarray(key_mask, dtype=bool)
        if mask.shape[-1] != k.shape[-2]:
            raise ShapeError(f"attention: key_mask 长度 {mask.shape[-1]} 与 N_k={k.shape[-2]} 不一致")
        if not np.all(mask.any(axis=-1)):
            raise AttentionMaskError("no attendable keys: key_mask 至少一行全部为 False")
        scores = masked_fill(scores, mask[..., None, :])
    weights = softmax(scores, axis=-1)
    return weights @ v
