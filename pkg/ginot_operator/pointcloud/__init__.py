"""
点云核函数 - 最远点采样、球查询分组与有效位掩码

模块:
- types: PointCloud / SamplingResult / GroupedFeatures 以及两个枚举
- sampling: farthest_point_sample (O(N²))
- grouping: ball_group (O(N·N_s)) 与 complexity_probe
"""

from .types import FpsInit, GroupedFeatures, GroupingMode, PointCloud, SamplingResult
from .sampling import euclidean_distances, farthest_point_sample
from .grouping import ball_group, complexity_probe

__all__ = [
    "FpsInit",
    "GroupedFeatures",
    "GroupingMode",
    "PointCloud",
    "SamplingResult",
    "euclidean_distances",
    "farthest_point_sample",
    "ball_group",
    "complexity_probe",
]
