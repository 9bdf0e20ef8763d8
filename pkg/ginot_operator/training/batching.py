# ginot_operator/training/batching.py
"""
批次组装: 把变长的边界点云与查询点集合填充到批内最大长度

- 原始坐标 (用于 FPS / 分组) 与网络坐标 (归一化) 分别保存
- 填充行的坐标为 0, 有效位为 False, 目标值为 0
"""

import logging
import math
from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence

import numpy as np

from ..datagen import NormStats, PoissonSample
from ..pointcloud import FpsInit, PointCloud
from ..model import ExtraInputs, GinotModel, QueryBatch, build_group_plan
from ..numerics import Tensor
from ..utils.errors import ConfigError, ShapeError

logger = logging.getLogger(__name__)


@dataclass
class Batch:
    indices: List[int]
    boundary: np.ndarray  # [B, N, d] 原始坐标
    boundary_coords: np.ndarray  # [B, N, d] 网络坐标
    boundary_valid: np.ndarray  # [B, N]
    query_points: np.ndarray  # [B, N_q, d] 原始坐标
    queries: QueryBatch  # 网络坐标
    targets: np.ndarray  # [B, N_q, C] 归一化目标
    loads: np.ndarray  # [B] 原始载荷
    extras: ExtraInputs  # 归一化载荷

    @property
    def size(self) -> int:
        return len(self.indices)

    @property
    def query_valid(self) -> np.ndarray:
        return self.queries.valid


def _pad_stack(arrays: Sequence[np.ndarray], length: int) -> np.ndarray:
    width = arrays[0].shape[1]
    out = np.zeros((len(arrays), length, width), dtype=np.float64)
    for i, arr in enumerate(arrays):
        out[i, :arr.shape[0]] = arr
    return out


def _mask(lengths: Sequence[int], length: int) -> np.ndarray:
    return np.arange(length)[None, :] < np.asarray(lengths)[:, None]


def subsample_boundary(boundary: np.ndarray, density: float, rng: np.random.Generator) -> np.ndarray:
    """随机保留 ceil(density·N) 个边界点, 保持原有顺序

    Raises:
        ConfigError: density 不在 (0, 1] 内
    """
    if not 0.0 < density <= 1.0:
        raise ConfigError(f"点云密度必须在 (0, 1] 内, 当前 {density}", field="train_density")
    n = boundary.shape[0]
    keep = max(1, math.ceil(density * n))
    if keep >= n:
        return boundary
    chosen = np.sort(rng.permutation(n)[:keep])
    return boundary[chosen]


def collate(samples: Sequence[PoissonSample], norm: NormStats, indices: Optional[Sequence[int]] = None,
            clouds: Optional[Sequence[PointCloud]] = None) -> Batch:
    """组装一个批次

    Args:
        samples: 样本列表
        norm: 归一化统计
        indices: 样本在数据集中的编号 (只用于记录)
        clouds: 替换样本自带的边界点云 (密度采样、打乱、带填充位等变体)
    """
    if not samples:
        raise ShapeError("不能组装空批次")
    clouds = list(clouds) if clouds is not None else [s.boundary_cloud() for s in samples]
    if len(clouds) != len(samples):
        raise ShapeError(f"边界点云数 {len(clouds)} 与样本数 {len(samples)} 不一致")

    n_max = max(c.num_points for c in clouds)
    q_max = max(s.num_queries for s in samples)
    boundary_valid = np.zeros((len(clouds), n_max), dtype=bool)
    for i, c in enumerate(clouds):
        boundary_valid[i, :c.num_points] = c.valid
    query_valid = _mask([s.num_queries for s in samples], q_max)

    boundary = _pad_stack([c.points for c in clouds], n_max)
    query_points = _pad_stack([s.queries for s in samples], q_max)
    targets = _pad_stack([norm.normalize_output(s.solution) for s in samples], q_max)

    boundary_coords = np.where(boundary_valid[..., None], norm.normalize_coords(boundary), 0.0)
    query_coords = np.where(query_valid[..., None], norm.normalize_coords(query_points), 0.0)
    targets = np.where(query_valid[..., None], targets, 0.0)
    loads = np.array([s.load for s in samples], dtype=np.float64)

    return Batch(
        indices=list(indices) if indices is not None else list(range(len(samples))),
        boundary=boundary,
        boundary_coords=boundary_coords,
        boundary_valid=boundary_valid,
        query_points=query_points,
        queries=QueryBatch(query_coords, query_valid),
        targets=targets,
        loads=loads,
        extras=ExtraInputs(norm.normalize_load(loads)),
    )


def batch_order(n: int, batch_size: int, rng: Optional[np.random.Generator] = None) -> Iterator[np.ndarray]:
    """按 batch_size 切分 0..n-1; 给定 rng 时先打乱"""
    order = rng.permutation(n) if rng is not None else np.arange(n)
    for start in range(0, n, batch_size):
        yield order[start:start + batch_size]


def forward_batch(model: GinotModel, batch: Batch, init: FpsInit = FpsInit.FIXED_FIRST_VALID,
                  seeds: Optional[Sequence[int]] = None) -> Tensor:
    """分组 (原始坐标) + 前向 (网络坐标), 返回 [B, N_q, C] 归一化预测"""
    plan = build_group_plan(batch.boundary, batch.boundary_valid, model.config, init, seeds)
    extras = batch.extras if model.config.use_extras else None
    return model(batch.boundary_coords, batch.boundary_valid, plan, batch.queries, extras)
