# ginot_operator/model/solution_decoder.py
"""
解场解码器: 查询点坐标 + GeometryTokens -> 解场值

查询点之间没有任何交互 (只有对 tokens 的交叉注意力), 所以每一行的输出
只依赖该行坐标与 tokens, 填充查询点不会影响真实查询点。
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .config import ModelConfig
from .encoding import frequency_encode
from .geometry_encoder import GeometryTokens
from ..numerics import MLP, AttentionBlock, Module, Tensor
from ..utils.errors import ShapeError

logger = logging.getLogger(__name__)

# 输出层初始化缩放: 初始预测接近 0
OUTPUT_GAIN = 0.1


@dataclass
class QueryBatch:
    points: np.ndarray  # [B, N_q, d]
    valid: np.ndarray  # [B, N_q]

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=np.float64)
        if self.valid is None:
            self.valid = np.ones(self.points.shape[:2], dtype=bool)
        self.valid = np.asarray(self.valid, dtype=bool)
        if self.points.ndim != 3 or self.valid.shape != self.points.shape[:2]:
            raise ShapeError(f"查询点需为 [B, N_q, d] + [B, N_q], 得到 {self.points.shape} / {self.valid.shape}")
        if self.points.shape[1] == 0:
            raise ShapeError("查询点集合为空")

    @classmethod
    def single(cls, points: np.ndarray, valid: Optional[np.ndarray] = None) -> "QueryBatch":
        points = np.asarray(points, dtype=np.float64)
        return cls(points[None], None if valid is None else np.asarray(valid, dtype=bool)[None])


@dataclass
class FieldBatch:
    values: Tensor  # [B, N_q, out_channels]
    valid: np.ndarray  # [B, N_q]

    def numpy(self) -> np.ndarray:
        return self.values.numpy()


class SolutionDecoder(Module):
    """可学习的解码器参数集合"""

    def __init__(self, cfg: ModelConfig, rng: np.random.Generator):
        d_e = cfg.embedding_dim
        self.query_mlp = MLP([cfg.encoding.channels(cfg.coord_dim), d_e, d_e], rng)
        self.cross_blocks = [AttentionBlock(d_e, cfg.att_heads_decoder, rng)
                             for _ in range(cfg.cross_att_layers_decoder)]
        self.output_mlp = MLP([d_e, d_e, d_e, cfg.out_channels], rng, final_gain=OUTPUT_GAIN)
        self._cfg = cfg

    def __call__(self, coords: np.ndarray, tokens: Tensor) -> Tensor:
        """coords [B, N_q, d] (网络坐标), tokens [B, N_s, d_e] -> [B, N_q, out_channels]"""
        coords = np.asarray(coords, dtype=np.float64)
        if coords.shape[-1] != self._cfg.coord_dim:
            raise ShapeError(f"查询坐标维度 {coords.shape[-1]} 与配置 coord_dim={self._cfg.coord_dim} 不一致")
        if tokens.shape[0] != coords.shape[0] or tokens.shape[-1] != self._cfg.embedding_dim:
            raise ShapeError(f"tokens 形状 {tokens.shape} 与查询批 {coords.shape} 不匹配")
        x = self.query_mlp(Tensor(frequency_encode(coords, self._cfg.encoding)))
        for block in self.cross_blocks:
            x = block(x, tokens)
        return self.output_mlp(x)


def decode(queries: QueryBatch, geo: GeometryTokens, decoder: SolutionDecoder) -> FieldBatch:
    """在任意查询点上求值; 填充行的输出由损失与指标忽略"""
    return FieldBatch(decoder(queries.points, geo.tokens), queries.valid)
