# ginot_operator/model/ginot.py
"""完整的 GINOT 模型: 几何编码器 + (可选) 载荷融合 + 解场解码器"""

import logging
from typing import Optional

import numpy as np

from .config import ModelConfig
from .extension import ExtraInputs, ExtrasFusion
from .geometry_encoder import GeometryEncoder, GeometryTokens, GroupPlan
from .solution_decoder import QueryBatch, SolutionDecoder
from ..numerics import Module, Tensor
from ..utils.errors import ShapeError

logger = logging.getLogger(__name__)


class GinotModel(Module):
    """参数按 (encoder, fusion, decoder) 的顺序由同一个随机数发生器初始化"""

    def __init__(self, cfg: ModelConfig, seed: int = 0):
        rng = np.random.default_rng(seed)
        self.encoder = GeometryEncoder(cfg, rng)
        self.fusion = ExtrasFusion(cfg.embedding_dim, cfg.extras_dim, rng) if cfg.use_extras else None
        self.decoder = SolutionDecoder(cfg, rng)
        self._cfg = cfg
        logger.info(f"✅ GINOT 模型初始化完成, 参数量 {self.num_parameters():,}")

    @property
    def config(self) -> ModelConfig:
        return self._cfg

    def encode(self, coords: np.ndarray, valid: np.ndarray, plan: GroupPlan,
               extras: Optional[ExtraInputs] = None) -> GeometryTokens:
        geo = self.encoder(coords, valid, plan)
        if self.fusion is None:
            return geo
        if extras is None:
            raise ShapeError("模型启用了附加输入 (use_extras), 但未提供载荷")
        return self.fusion(geo, extras)

    def __call__(self, coords: np.ndarray, valid: np.ndarray, plan: GroupPlan,
                 queries: QueryBatch, extras: Optional[ExtraInputs] = None) -> Tensor:
        """
        Args:
            coords / valid: 边界点云的网络坐标 [B, N, d] 与有效位 [B, N]
            plan: 在原始坐标上计算的分组索引
            queries: 网络坐标下的查询点
            extras: use_extras 时必需

        Returns:
            [B, N_q, out_channels] 网络空间 (归一化) 的预测
        """
        geo = self.encode(coords, valid, plan, extras)
        return self.decoder(queries.points, geo.tokens)
