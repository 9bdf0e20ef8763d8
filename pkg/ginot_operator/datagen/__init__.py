"""
数据集工厂 - 星形区域采样、有限差分 Poisson 求解、归一化统计与容器读写
"""

from .config import DataGenConfig
from .domain import StarDomain, circle_domain, sample_domain
from .poisson import PoissonSample, solve_poisson
from .container import ContainerReader, ContainerWriter, container_paths
from .normalization import NormStats
from .dataset import (
    PoissonDataset,
    compute_norm_stats,
    generate_dataset,
    read_dataset,
    split_indices,
    write_dataset,
)

__all__ = [
    "DataGenConfig",
    "StarDomain",
    "circle_domain",
    "sample_domain",
    "PoissonSample",
    "solve_poisson",
    "ContainerReader",
    "ContainerWriter",
    "container_paths",
    "NormStats",
    "PoissonDataset",
    "compute_norm_stats",
    "generate_dataset",
    "read_dataset",
    "split_indices",
    "write_dataset",
]
