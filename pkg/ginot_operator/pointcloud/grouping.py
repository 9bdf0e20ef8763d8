# ginot_operator/pointcloud/grouping.py
"""
球查询分组 + 复杂度探针

每个中心点的候选集合 = 半径 r 内的有效点, 组内按 (距离, 索引) 升序:
- 超过 N_p: 保留最近的 N_p 个
- 不足 N_p: NEAREST_FILL 追加球外最近的有效点; CENTROID_FILL 重复组内最近点
- 有效点总数 < N_p: 用最近点重复补齐
"""

import logging
from typing import Dict

import numpy as np

from .sampling import euclidean_distances, farthest_point_sample
from .types import FpsInit, GroupedFeatures, GroupingMode, PointCloud, SamplingResult
from ..utils.errors import PointCloudError

logger = logging.getLogger(__name__)


def ball_group(pc: PointCloud, sampling: SamplingResult, radius: float, group_size: int,
               mode: GroupingMode = GroupingMode.NEAREST_FILL) -> GroupedFeatures:
    """按中心点构建局部邻域

    Args:
        pc: 点云
        sampling: FPS 结果 (索引必须指向 pc 的有效点)
        radius: 球半径 r (> 0)
        group_size: 每组点数 N_p (≥ 1)
        mode: 不足 N_p 时的补齐方式

    Returns:
        GroupedFeatures, group_indices 形状 [N_s, N_p]

    Raises:
        PointCloudError: r ≤ 0、N_p < 1 或没有有效点
    """
    if radius <= 0:
        raise PointCloudError(f"分组半径必须为正, 当前 {radius}")
    if group_size < 1:
        raise PointCloudError(f"N_p 必须 ≥ 1, 当前 {group_size}")
    valid_idx = pc.valid_indices()
    m = valid_idx.size
    if m == 0:
        raise PointCloudError("点云中没有有效点, 无法分组")

    dist = euclidean_distances(sampling.centroids, pc.points[valid_idx])
    order = np.argsort(dist, axis=1, kind="stable")
    in_ball = (dist <= radius).sum(axis=1)
    n_centroids = dist.shape[0]

    if m >= group_size:
        local = order[:, :group_size].copy()
    else:
        nearest = np.repeat(order[:, :1], group_size - m, axis=1)
        local = np.concatenate([order, nearest], axis=1)

    if mode is GroupingMode.CENTROID_FILL:
        slots = np.arange(group_size)[None, :]
        keep = slots < np.maximum(in_ball, 1)[:, None]
        local = np.where(keep, local, local[:, :1])

    indices = valid_idx[local]
    short = int((in_ball < group_size).sum())
    if short:
        logger.debug(f"{short}/{n_centroids} 个组球内点数不足 N_p={group_size}, 按 {mode.value} 补齐")

    return GroupedFeatures(
        group_indices=indices,
        group_points=pc.points[indices],
        radius=float(radius),
        in_ball_count=in_ball.astype(np.int64),
        distance_evals=n_centroids * m,
        mode=mode,
    )


def complexity_probe(n_points: int, n_samples: int, group_size: int = 18,
                     radius: float = 0.2, seed: int = 0) -> Dict[str, int]:
    """在随机二维点云上运行两个核函数, 返回距离计算次数

    Returns:
        {"fps_distance_evals": ..., "ball_query_distance_evals": ...}
    """
    rng = np.random.default_rng(seed)
    pc = PointCloud.from_points(rng.uniform(-1.0, 1.0, size=(n_points, 2)))
    sampling = farthest_point_sample(pc, n_samples, FpsInit.FIXED_FIRST_VALID)
    groups = ball_group(pc, sampling, radius, group_size)
    counts = {
        "fps_distance_evals": sampling.distance_evals,
        "ball_query_distance_evals": groups.distance_evals,
    }
    logger.debug(f"复杂度探针 N={n_points}, N_s={n_samples}: {counts}")
    return counts
