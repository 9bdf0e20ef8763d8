# ginot_operator/numerics/layers.py
"""
网络层: 参数容器、线性层、层归一化、MLP、多头注意力与注意力块

约定:
- 权重初始化: 均匀分布 ±gain·√(6/(fan_in+fan_out)), 偏置为 0
- 注意力块为后归一化: 子层 → 残差相加 → LayerNorm
"""

import logging
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .tensor import Tensor, parameter
from .functional import gelu, layer_norm, linear, scaled_dot_attention
from ..utils.errors import ShapeError

logger = logging.getLogger(__name__)


def xavier_uniform(rng: np.random.Generator, fan_in: int, fan_out: int, gain: float = 1.0) -> np.ndarray:
    bound = gain * np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-bound, bound, size=(fan_in, fan_out))


class Module:
    """参数容器基类; 递归收集属性中的参数 (Tensor / Module / Module 列表)"""

    def named_parameters(self, prefix: str = "") -> Iterator[Tuple[str, Tensor]]:
        for attr, value in vars(self).items():
            if attr.startswith("_"):
                continue
            full = f"{prefix}{attr}"
            if isinstance(value, Tensor) and value.requires_grad:
                yield full, value
            elif isinstance(value, Module):
                yield from value.named_parameters(full + ".")
            elif isinstance(value, (list, tuple)):
                for i, item in enumerate(value):
                    if isinstance(item, Module):
                        yield from item.named_parameters(f"{full}.{i}.")

    def parameters(self) -> Dict[str, Tensor]:
        return dict(self.named_parameters())

    def zero_grad(self) -> None:
        for p in self.parameters().values():
            p.zero_grad()

    def state_dict(self) -> Dict[str, np.ndarray]:
        return {name: p.data.copy() for name, p in self.named_parameters()}

    def load_state_dict(self, state: Dict[str, np.ndarray]) -> None:
        """按名称加载参数; 缺失、多余或形状不一致都报错"""
        params = self.parameters()
        missing = sorted(set(params) - set(state))
        unexpected = sorted(set(state) - set(params))
        if missing or unexpected:
            raise ShapeError(f"参数集合不一致: 缺失 {missing[:3]}, 多余 {unexpected[:3]}")
        for name, p in params.items():
            arr = np.asarray(state[name], dtype=np.float64)
            if arr.shape != p.shape:
                raise ShapeError(f"参数 {name} 形状不一致: 期望 {p.shape}, 得到 {arr.shape}")
            p.data = arr.copy()

    def num_parameters(self) -> int:
        return int(sum(p.size for p in self.parameters().values()))


class Linear(Module):
    """线性层 y = x @ weight + bias, weight 形状 [in_dim, out_dim]"""

    def __init__(self, in_dim: int, out_dim: int, rng: np.random.Generator, gain: float = 1.0):
        self.weight = parameter(xavier_uniform(rng, in_dim, out_dim, gain))
        self.bias = parameter(np.zeros(out_dim))

    @property
    def in_dim(self) -> int:
        return self.weight.shape[0]

    @property
    def out_dim(self) -> int:
        return self.weight.shape[1]

    def __call__(self, x: Tensor) -> Tensor:
        return linear(x, self.weight, self.bias)


class LayerNorm(Module):
    def __init__(self, dim: int, eps: float = 1e-5):
        self.gain = parameter(np.ones(dim))
        self.bias = parameter(np.zeros(dim))
        self._eps = eps

    def __call__(self, x: Tensor) -> Tensor:
        return layer_norm(x, self.gain, self.bias, self._eps)


class MLP(Module):
    """逐点共享的多层感知机; widths = [in, hidden..., out], 隐藏层后接 GELU"""

    def __init__(self, widths: Sequence[int], rng: np.random.Generator, final_gain: float = 1.0):
        if len(widths) < 2:
            raise ShapeError(f"MLP 至少需要输入与输出两个宽度, 得到 {list(widths)}")
        last = len(widths) - 2
        self.layers: List[Linear] = [
            Linear(widths[i], widths[i + 1], rng, gain=final_gain if i == last else 1.0)
            for i in range(len(widths) - 1)
        ]

    @property
    def widths(self) -> List[int]:
        return [self.layers[0].in_dim] + [layer.out_dim for layer in self.layers]

    def __call__(self, x: Tensor) -> Tensor:
        for i, layer in enumerate(self.layers):
            x = layer(x)
            if i < len(self.layers) - 1:
                x = gelu(x)
        return x


class MultiHeadAttention(Module):
    """多头注意力: 独立的 Q/K/V 线性映射, d_model 均分到各头, 最后做输出映射"""

    def __init__(self, d_model: int, num_heads: int, rng: np.random.Generator):
        if num_heads < 1 or d_model % num_heads != 0:
            raise ShapeError(f"d_model={d_model} 不能被注意力头数 {num_heads} 整除")
        self.q_proj = Linear(d_model, d_model, rng)
        self.k_proj = Linear(d_model, d_model, rng)
        self.v_proj = Linear(d_model, d_model, rng)
        self.out_proj = Linear(d_model, d_model, rng)
        self._heads = num_heads

    def _split(self, x: Tensor) -> Tensor:
        # [B, N, d] -> [B, h, N, d_h]
        b, n, d = x.shape
        return x.reshape(b, n, self._heads, d // self._heads).transpose(0, 2, 1, 3)

    def __call__(self, x_q: Tensor, x_kv: Tensor, key_mask: Optional[np.ndarray] = None) -> Tensor:
        """
        Args:
            x_q: [B, N_q, d]
            x_kv: [B, N_k, d]
            key_mask: [B, N_k] 布尔, None 表示全部可关注
        """
        if x_q.ndim != 3 or x_kv.ndim != 3 or x_q.shape[0] != x_kv.shape[0]:
            raise ShapeError(f"注意力输入需为 [B, N, d], 得到 {x_q.shape} / {x_kv.shape}")
        q = self._split(self.q_proj(x_q))
        k = self._split(self.k_proj(x_kv))
        v = self._split(self.v_proj(x_kv))
        mask = None if key_mask is None else np.asarray(key_mask, dtype=bool)[:, None, :]
        out = scaled_dot_attention(q, k, v, mask)
        b, h, n, d_h = out.shape
        return self.out_proj(out.transpose(0, 2, 1, 3).reshape(b, n, h * d_h))


class AttentionBlock(Module):
    """注意力块 (后归一化):
    x = LN1(x + MHA(x, kv, mask)); x = LN2(x + FFN(x))

    kv 为 None 时即自注意力。
    """

    def __init__(self, d_model: int, num_heads: int, rng: np.random.Generator, ffn_dim: Optional[int] = None):
        ffn_dim = ffn_dim or d_model
        self.attention = MultiHeadAttention(d_model, num_heads, rng)
        self.norm1 = LayerNorm(d_model)
        self.ffn = MLP([d_model, ffn_dim, d_model], rng)
        self.norm2 = LayerNorm(d_model)

    def __call__(self, x: Tensor, kv: Optional[Tensor] = None, key_mask: Optional[np.ndarray] = None) -> Tensor:
        source = x if kv is None else kv
        x = self.norm1(x + self.attention(x, source, key_mask))
        return self.norm2(x + self.ffn(x))
