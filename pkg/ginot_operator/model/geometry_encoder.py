# ginot_operator/model/geometry_encoder.py
"""
几何编码器: 边界点云 -> GeometryTokens [B, N_s, d_e]

流程:
1. 在原始坐标上做 FPS + 球查询分组 (不可微, 只产生索引)
2. 频率编码 -> 线性层 -> 按组索引收集 -> 拼接组内坐标 -> 共享 MLP -> 组内 max-pool
3. 局部特征作为 Q, 整个点云 (频率编码 -> 线性层) 作为 K/V, 填充点通过 key_mask 屏蔽
4. 交叉注意力块 -> 自注意力块 -> 输出线性层
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .config import ModelConfig
from .encoding import frequency_encode
from ..numerics import MLP, AttentionBlock, Linear, Module, Tensor, concat
from ..pointcloud import FpsInit, PointCloud, ball_group, farthest_point_sample
from ..utils.errors import PointCloudError, ShapeError

logger = logging.getLogger(__name__)


@dataclass
class GroupPlan:
    """一个批次的分组索引 (指向点云行号)"""
    centroid_indices: np.ndarray  # [B, N_s]
    group_indices: np.ndarray  # [B, N_s, N_p]
    in_ball_count: np.ndarray  # [B, N_s]


@dataclass
class GeometryTokens:
    tokens: Tensor  # [B, N_s, d_e]

    @property
    def shape(self):
        return self.tokens.shape


def build_group_plan(points: np.ndarray, valid: np.ndarray, cfg: ModelConfig,
                     init: FpsInit = FpsInit.FIXED_FIRST_VALID,
                     seeds: Optional[Sequence[int]] = None) -> GroupPlan:
    """逐样本执行 FPS 与球查询

    Args:
        points: [B, N, d] 原始 (未归一化) 坐标
        valid: [B, N] 有效位
        cfg: 提供 N_s / N_p / r / 分组模式
        init: FPS 初始化方式
        seeds: 每个样本的 FPS 种子 (SEEDED_RANDOM 时使用)
    """
    points = np.asarray(points, dtype=np.float64)
    valid = np.asarray(valid, dtype=bool)
    if points.ndim != 3 or valid.shape != points.shape[:2]:
        raise ShapeError(f"边界点云需为 [B, N, d] + [B, N], 得到 {points.shape} / {valid.shape}")
    batch = points.shape[0]
    if seeds is None:
        seeds = [0] * batch

    centroids, groups, counts = [], [], []
    for b in range(batch):
        pc = PointCloud(points[b], valid[b])
        sampling = farthest_point_sample(pc, cfg.n_s, init, seed=int(seeds[b]))
        grouped = ball_group(pc, sampling, cfg.grouping_r, cfg.n_p, cfg.grouping_mode)
        centroids.append(sampling.centroid_indices)
        groups.append(grouped.group_indices)
        counts.append(grouped.in_ball_count)
    return GroupPlan(np.stack(centroids), np.stack(groups), np.stack(counts))


def local_feature_extract(encoded: np.ndarray, coords: np.ndarray, group_indices: np.ndarray,
                          pe_linear: Linear, group_mlp: MLP) -> Tensor:
    """组内局部特征聚合

    Args:
        encoded: [B, N, E] 点云的频率编码
        coords: [B, N, d] 网络输入坐标, 与特征一起拼接
        group_indices: [B, N_s, N_p]
        pe_linear: E -> C
        group_mlp: 输入宽度 C + d

    Returns:
        [B, N_s, C'] (C' 为 group_mlp 的输出宽度)

    Raises:
        PointCloudError: 组索引越界
    """
    group_indices = np.asarray(group_indices)
    n_points = encoded.shape[1]
    if group_indices.size and (group_indices.min() < 0 or group_indices.max() >= n_points):
        raise PointCloudError(f"组索引越界: 范围 [{group_indices.min()}, {group_indices.max()}], 点数 {n_points}")
    if group_indices.shape[0] != encoded.shape[0]:
        raise ShapeError(f"组索引批大小 {group_indices.shape[0]} 与点云批大小 {encoded.shape[0]} 不一致")

    batch_idx = np.arange(encoded.shape[0])[:, None, None]
    features = pe_linear(Tensor(encoded))[batch_idx, group_indices]  # [B, N_s, N_p, C]
    members = Tensor(np.asarray(coords, dtype=np.float64)[batch_idx, group_indices])
    per_point = group_mlp(concat([features, members], axis=-1))
    return per_point.max(axis=2)


class GeometryEncoder(Module):
    """可学习的几何编码器参数集合"""

    def __init__(self, cfg: ModelConfig, rng: np.random.Generator):
        enc_dim = cfg.encoding.channels(cfg.coord_dim)
        c, d_e = cfg.channels, cfg.embedding_dim
        self.pe_linear = Linear(enc_dim, c, rng)
        self.group_mlp = MLP([c + cfg.coord_dim, d_e, d_e, c], rng)
        self.query_linear = Linear(c, d_e, rng)
        self.kv_linear = Linear(enc_dim, d_e, rng)
        self.cross_blocks = [AttentionBlock(d_e, cfg.attention_heads_encoder, rng)
                             for _ in range(cfg.cross_att_layers_encoder)]
        self.self_blocks = [AttentionBlock(d_e, cfg.attention_heads_encoder, rng)
                            for _ in range(cfg.self_att_layers_encoder)]
        self.out_linear = Linear(d_e, d_e, rng)
        self._cfg = cfg

    @property
    def config(self) -> ModelConfig:
        return self._cfg

    def __call__(self, coords: np.ndarray, valid: np.ndarray, plan: GroupPlan) -> GeometryTokens:
        """
        Args:
            coords: [B, N, d] 网络坐标 (已归一化)
            valid: [B, N] 有效位
            plan: build_group_plan 的结果
        """
        coords = np.asarray(coords, dtype=np.float64)
        valid = np.asarray(valid, dtype=bool)
        encoded = frequency_encode(coords, self._cfg.encoding)

        local = local_feature_extract(encoded, coords, plan.group_indices, self.pe_linear, self.group_mlp)
        x = self.query_linear(local)
        kv = self.kv_linear(Tensor(encoded))
        for block in self.cross_blocks:
            x = block(x, kv, valid)
        for block in self.self_blocks:
            x = block(x)
        return GeometryTokens(self.out_linear(x))


def encode_geometry(pc: PointCloud, encoder: GeometryEncoder,
                    init: FpsInit = FpsInit.FIXED_FIRST_VALID, seed: int = 0,
                    coords: Optional[np.ndarray] = None) -> GeometryTokens:
    """单个点云的便捷入口, 返回 [1, N_s, d_e] 的 tokens

    coords 为网络坐标 (默认与 pc.points 相同); 采样与分组始终在 pc.points 上进行。
    """
    if pc.num_valid < 1:
        raise PointCloudError("点云至少需要一个有效点")
    cfg = encoder.config
    plan = build_group_plan(pc.points[None], pc.valid[None], cfg, init, [seed])
    net_coords = pc.points if coords is None else np.asarray(coords, dtype=np.float64)
    return encoder(net_coords[None], pc.valid[None], plan)
