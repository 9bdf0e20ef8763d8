# ginot_operator/pointcloud/sampling.py
"""
迭代最远点采样 (FPS)

维护每个有效点 "到已选中心的最小距离", 每选中一个新中心只计算它到所有有效点的
一行距离 (内存 O(N), 距离计算 N·N_s 次, N_s 与 N 同阶时为 O(N²))。
贪心地选出最小距离最大的点; 并列时取索引最小者。
填充点 (valid=False) 永远不会被选中。
"""

import logging
from typing import Optional

import numpy as np

from .types import FpsInit, PointCloud, SamplingResult
from ..utils.errors import PointCloudError

logger = logging.getLogger(__name__)


def euclidean_distances(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """逐坐标累加的欧氏距离 [len(a), len(b)]; 同一对点在任何调用里结果逐位相同"""
    sq = np.zeros((a.shape[0], b.shape[0]), dtype=np.float64)
    for c in range(a.shape[1]):
        diff = a[:, c][:, None] - b[:, c][None, :]
        sq += diff * diff
    return np.sqrt(sq)


def farthest_point_sample(pc: PointCloud, n_samples: int,
                          init: FpsInit = FpsInit.FIXED_FIRST_VALID,
                          seed: Optional[int] = None) -> SamplingResult:
    """最远点采样

    Args:
        pc: 点云 (含有效位)
        n_samples: 中心点数 N_s
        init: 第一个中心点的选取方式
        seed: init 为 SEEDED_RANDOM 时使用的种子

    Returns:
        SamplingResult; 有效点少于 N_s 时按已选顺序循环重复, 输出长度恒为 N_s

    Raises:
        PointCloudError: N_s < 1 或没有有效点
    """
    if n_samples < 1:
        raise PointCloudError(f"N_s 必须 ≥ 1, 当前 {n_samples}")
    valid_idx = pc.valid_indices()
    m = valid_idx.size
    if m == 0:
        raise PointCloudError("点云中没有有效点, 无法采样")

    pts = pc.points[valid_idx]

    if init is FpsInit.SEEDED_RANDOM:
        start = int(np.random.default_rng(seed).integers(m))
    else:
        start = 0

    n_distinct = min(n_samples, m)
    order = np.empty(n_distinct, dtype=np.int64)
    order[0] = start
    min_dist = euclidean_distances(pts[start:start + 1], pts)[0]
    min_dist[start] = -np.inf
    evals = m
    for i in range(1, n_distinct):
        nxt = int(np.argmax(min_dist))
        order[i] = nxt
        if i < n_distinct - 1:
            np.minimum(min_dist, euclidean_distances(pts[nxt:nxt + 1], pts)[0], out=min_dist)
            evals += m
        min_dist[nxt] = -np.inf

    if n_distinct < n_samples:
        logger.debug(f"有效点 {m} < N_s={n_samples}, 循环重复已选中心")
        order = order[np.arange(n_samples) % n_distinct]

    indices = valid_idx[order]
    return SamplingResult(centroid_indices=indices, centroids=pc.points[indices].copy(),
                          distance_evals=evals)
