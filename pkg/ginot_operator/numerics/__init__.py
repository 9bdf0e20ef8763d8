"""
数值核心 - 反向模式自动微分张量、神经网络算子与优化器

模块:
- tensor: Tensor 与计算图
- functional: linear / softmax / layer_norm / gelu / 缩放点积注意力
- layers: Module / Linear / LayerNorm / MLP / 多头注意力 / 注意力块
- optim: Adam(W)、平台期学习率调度、梯度裁剪
"""

from .tensor import Tensor, concat, no_grad, parameter
from .functional import MASKED_SCORE, gelu, layer_norm, linear, scaled_dot_attention, softmax
from .layers import MLP, AttentionBlock, LayerNorm, Linear, Module, MultiHeadAttention
from .optim import Adam, OptimizerKind, OptimizerState, adam_step, clip_grad_norm, plateau_schedule

__all__ = [
    "Tensor",
    "concat",
    "no_grad",
    "parameter",
    "MASKED_SCORE",
    "gelu",
    "layer_norm",
    "linear",
    "scaled_dot_attention",
    "softmax",
    "MLP",
    "AttentionBlock",
    "LayerNorm",
    "Linear",
    "Module",
    "MultiHeadAttention",
    "Adam",
    "OptimizerKind",
    "OptimizerState",
    "adam_step",
    "clip_grad_norm",
    "plateau_schedule",
]
