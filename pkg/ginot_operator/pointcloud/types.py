# ginot_operator/pointcloud/types.py
"""点云数据结构: 带有效位掩码的点云、采样结果、分组结果"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from ..utils.errors import PointCloudError


class FpsInit(Enum):
    """FPS 第一个中心点的选取方式"""
    FIXED_FIRST_VALID = "fixed_first_valid"  # 推理: 第一个非填充点
    SEEDED_RANDOM = "seeded_random"  # 训练: 按种子随机选取有效点


class GroupingMode(Enum):
    """球查询不足/超出 N_p 时的处理方式"""
    NEAREST_FILL = "nearest_fill"  # 超出取最近 N_p, 不足用球外最近点补齐
    CENTROID_FILL = "centroid_fill"  # 超出取最近 N_p, 不足重复组内最近点


@dataclass
class PointCloud:
    """点云 [N, d] 与有效位 [N]; valid=False 的行是填充点, 坐标无意义"""
    points: np.ndarray
    valid: np.ndarray

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=np.float64)
        self.valid = np.asarray(self.valid, dtype=bool)
        if self.points.ndim != 2:
            raise PointCloudError(f"点云坐标必须为 [N, d], 得到 {self.points.shape}")
        if self.valid.shape != (self.points.shape[0],):
            raise PointCloudError(f"valid 长度 {self.valid.shape} 与点数 {self.points.shape[0]} 不一致")

    @classmethod
    def from_points(cls, points: np.ndarray) -> "PointCloud":
        points = np.asarray(points, dtype=np.float64)
        return cls(points, np.ones(points.shape[0], dtype=bool))

    @property
    def num_points(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def num_valid(self) -> int:
        return int(self.valid.sum())

    def valid_indices(self) -> np.ndarray:
        return np.flatnonzero(self.valid)

    def padded(self, n_total: int, fill_value: float = 0.0) -> "PointCloud":
        """在末尾追加填充点, 使总点数为 n_total"""
        extra = n_total - self.num_points
        if extra < 0:
            raise PointCloudError(f"无法把 {self.num_points} 个点填充到 {n_total}")
        if extra == 0:
            return self
        pad = np.full((extra, self.dim), fill_value, dtype=np.float64)
        return PointCloud(np.vstack([self.points, pad]),
                          np.concatenate([self.valid, np.zeros(extra, dtype=bool)]))


@dataclass
class SamplingResult:
    """FPS 结果: 中心点索引 [N_s] 与坐标 [N_s, d]"""
    centroid_indices: np.ndarray
    centroids: np.ndarray
    distance_evals: int = 0


@dataclass
class GroupedFeatures:
    """分组结果: 组内索引 [N_s, N_p] 与坐标 [N_s, N_p, d]"""
    group_indices: np.ndarray
    group_points: np.ndarray
    radius: float
    in_ball_count: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    distance_evals: int = 0
    mode: Optional[GroupingMode] = None

    @property
    def num_groups(self) -> int:
        return self.group_indices.shape[0]

    @property
    def group_size(self) -> int:
        return self.group_indices.shape[1]
