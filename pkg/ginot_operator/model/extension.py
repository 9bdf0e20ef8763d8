# ginot_operator/model/extension.py
"""
扩展输入 (标量载荷 λ) 与几何 tokens 的融合

extras -> MLP -> [d_e] -> 沿 N_s 复制 -> 与 tokens 按通道拼接 -> 聚合 MLP -> [N_s, d_e]
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .geometry_encoder import GeometryTokens
from .solution_decoder import FieldBatch, QueryBatch, SolutionDecoder, decode
from ..numerics import MLP, Module, Tensor, concat
from ..utils.errors import ShapeError

logger = logging.getLogger(__name__)

_repeat_note_logged = False


def _log_repeat_note_once(n_s: int) -> None:
    global _repeat_note_logged
    if not _repeat_note_logged:
        logger.warning(f"⚠️ 载荷编码沿 N_s={n_s} 复制以匹配 tokens 形状 B×N_s×d_e (不是按 N_p 次)")
        _repeat_note_logged = True


@dataclass
class ExtraInputs:
    """每个样本的附加标量输入; load 形状 [B] 或 [B, n_extras]"""
    load: np.ndarray

    def __post_init__(self):
        load = np.asarray(self.load, dtype=np.float64)
        self.load = load[:, None] if load.ndim == 1 else load
        if self.load.ndim != 2:
            raise ShapeError(f"附加输入需为 [B] 或 [B, n], 得到 {load.shape}")
        if not np.all(np.isfinite(self.load)):
            raise ShapeError("附加输入包含非有限值")


class ExtrasFusion(Module):
    """载荷编码 MLP + 聚合 MLP"""

    def __init__(self, embedding_dim: int, extras_dim: int, rng: np.random.Generator,
                 aggregation_widths: Optional[Sequence[int]] = None):
        d_e = embedding_dim
        self.extras_mlp = MLP([extras_dim, d_e, d_e], rng)
        widths = list(aggregation_widths or [2 * d_e, d_e, d_e])
        if widths[0] != 2 * d_e or widths[-1] != d_e:
            raise ShapeError(f"聚合 MLP 宽度必须为 [2·d_e, ..., d_e], 得到 {widths}")
        self.aggregation_mlp = MLP(widths, rng)

    def concatenated(self, geo: GeometryTokens, extras: ExtraInputs) -> Tensor:
        """聚合前的 [B, N_s, 2·d_e] 张量"""
        tokens = geo.tokens
        batch, n_s, d_e = tokens.shape
        if extras.load.shape[0] != batch:
            raise ShapeError(f"附加输入批大小 {extras.load.shape[0]} 与 tokens 批大小 {batch} 不一致")
        encoded = self.extras_mlp(Tensor(extras.load))  # [B, d_e]
        _log_repeat_note_once(n_s)
        repeated = encoded.reshape(batch, 1, d_e) + Tensor(np.zeros((batch, n_s, d_e)))
        return concat([tokens, repeated], axis=-1)

    def __call__(self, geo: GeometryTokens, extras: ExtraInputs) -> GeometryTokens:
        return GeometryTokens(self.aggregation_mlp(self.concatenated(geo, extras)))


def fuse_extras(geo: GeometryTokens, extras: ExtraInputs, fusion: ExtrasFusion) -> GeometryTokens:
    """融合后的 tokens 形状与 geo 相同"""
    return fusion(geo, extras)


def decode_with_extras(queries: QueryBatch, fused: GeometryTokens, decoder: SolutionDecoder) -> FieldBatch:
    return decode(queries, fused, decoder)
