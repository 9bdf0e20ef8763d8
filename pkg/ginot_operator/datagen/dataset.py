# ginot_operator/datagen/dataset.py
"""
Poisson 数据集: 生成 (可多进程)、80/20 划分、归一化统计与容器读写

容器布局:
- samples/<i>/boundary [n_b, 2], queries [N_q, 2], solution [N_q, 1], radii [n_b]
- loads [n], seeds [n] (int64), split/train, split/test (int64)
- meta: n_samples, generator, norm_stats
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .config import DataGenConfig
from .container import ContainerReader, ContainerWriter
from .domain import sample_domain
from .normalization import NormStats
from .poisson import PoissonSample, solve_poisson
from ..utils.errors import ContainerError

logger = logging.getLogger(__name__)


@dataclass
class PoissonDataset:
    samples: List[PoissonSample]
    train_indices: np.ndarray
    test_indices: np.ndarray
    norm_stats: Optional[NormStats] = None
    generator: Dict[str, Any] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.samples)

    def split(self, name: str) -> List[PoissonSample]:
        if name == "train":
            return [self.samples[i] for i in self.train_indices]
        if name == "test":
            return [self.samples[i] for i in self.test_indices]
        if name == "all":
            return list(self.samples)
        raise ContainerError(f"未知的数据划分 {name}, 可选 train / test / all")

    def query_count_range(self) -> Tuple[int, int]:
        if not self.samples:
            return 0, 0
        counts = [s.num_queries for s in self.samples]
        return min(counts), max(counts)


def split_indices(n: int, seed: int, train_fraction: float = 0.8) -> Tuple[np.ndarray, np.ndarray]:
    """按种子打乱后取前 round(train_fraction·n) 个作为训练集"""
    order = np.random.default_rng(seed).permutation(n)
    n_train = int(round(train_fraction * n))
    if n >= 2:
        n_train = min(max(n_train, 1), n - 1)
    return np.sort(order[:n_train]).astype(np.int64), np.sort(order[n_train:]).astype(np.int64)


def compute_norm_stats(samples: Sequence[PoissonSample]) -> Optional[NormStats]:
    if not samples:
        return None
    return NormStats.fit(
        coords=[np.vstack([s.boundary, s.queries]) for s in samples],
        outputs=[s.solution for s in samples],
        loads=[s.load for s in samples],
    )


def _generate_one(args: Tuple[int, float, DataGenConfig]) -> PoissonSample:
    seed, load, cfg = args
    domain = sample_domain(seed, n_b=cfg.n_b, n_modes=cfg.n_modes,
                           smoothness=cfg.smoothness, amplitude=cfg.amplitude)
    return solve_poisson(domain, cfg.grid_n, load=load, seed=seed)


def sample_plan(cfg: DataGenConfig) -> Tuple[np.ndarray, np.ndarray]:
    """每个样本的 (区域种子, 载荷 λ), 只由 cfg.seed 决定"""
    rng = np.random.default_rng(cfg.seed)
    seeds = rng.integers(0, 2 ** 31 - 1, size=cfg.n_samples, dtype=np.int64)
    if cfg.varies_load:
        loads = rng.uniform(cfg.lambda_min, cfg.lambda_max, size=cfg.n_samples)
    else:
        loads = np.full(cfg.n_samples, cfg.lambda_min)
    return seeds, loads


def generate_dataset(cfg: DataGenConfig) -> PoissonDataset:
    """生成数据集; 多进程时结果按种子顺序收集, 与串行结果一致"""
    seeds, loads = sample_plan(cfg)
    jobs = [(int(s), float(l), cfg) for s, l in zip(seeds, loads)]

    if cfg.num_workers > 1 and len(jobs) > 1:
        logger.info(f"🔄 使用 {cfg.num_workers} 个进程生成 {len(jobs)} 个样本")
        with ProcessPoolExecutor(max_workers=cfg.num_workers) as pool:
            samples = list(pool.map(_generate_one, jobs, chunksize=max(1, len(jobs) // (4 * cfg.num_workers))))
    else:
        samples = [_generate_one(job) for job in jobs]

    train_idx, test_idx = split_indices(len(samples), cfg.seed, cfg.training_dataset)
    dataset = PoissonDataset(
        samples=samples,
        train_indices=train_idx,
        test_indices=test_idx,
        norm_stats=compute_norm_stats([samples[i] for i in train_idx]),
        generator=cfg.model_dump(exclude={"num_workers"}),
    )
    if samples:
        lo, hi = dataset.query_count_range()
        logger.info(f"✅ 生成 {len(samples)} 个样本, 查询点数范围 [{lo}, {hi}]")
    else:
        logger.warning("⚠️ n_samples=0, 生成空数据集")
    return dataset


def write_dataset(dataset: PoissonDataset, path: Union[str, Path]) -> Path:
    """写出数据集容器, 返回 manifest 路径"""
    writer = ContainerWriter(path)
    with writer:
        for i, s in enumerate(dataset.samples):
            prefix = f"samples/{i}"
            writer.write(f"{prefix}/boundary", s.boundary)
            writer.write(f"{prefix}/queries", s.queries)
            writer.write(f"{prefix}/solution", s.solution)
            writer.write(f"{prefix}/radii", s.radii)
        writer.write("loads", np.array([s.load for s in dataset.samples], dtype=np.float64))
        writer.write("seeds", np.array([s.seed for s in dataset.samples], dtype=np.int64))
        writer.write("grid_n", np.array([s.grid_n for s in dataset.samples], dtype=np.int64))
        writer.write("split/train", np.asarray(dataset.train_indices, dtype=np.int64))
        writer.write("split/test", np.asarray(dataset.test_indices, dtype=np.int64))
        writer.close(meta={
            "n_samples": len(dataset.samples),
            "generator": dataset.generator,
            "norm_stats": None if dataset.norm_stats is None else dataset.norm_stats.to_dict(),
        })
    return writer.manifest_path


def read_dataset(path: Union[str, Path]) -> PoissonDataset:
    """读取数据集容器

    Raises:
        ContainerError: manifest/payload 损坏或样本缺失
    """
    reader = ContainerReader(path)
    n = int(reader.meta.get("n_samples", -1))
    if n < 0:
        raise ContainerError("manifest 缺少 n_samples")
    loads, seeds, grid_n = reader["loads"], reader["seeds"], reader["grid_n"]
    if not (loads.shape == seeds.shape == grid_n.shape == (n,)):
        raise ContainerError(f"样本级数组长度与 n_samples={n} 不一致")

    samples = []
    for i in range(n):
        prefix = f"samples/{i}"
        samples.append(PoissonSample(
            boundary=reader[f"{prefix}/boundary"],
            queries=reader[f"{prefix}/queries"],
            solution=reader[f"{prefix}/solution"],
            load=float(loads[i]),
            radii=reader[f"{prefix}/radii"],
            seed=int(seeds[i]),
            grid_n=int(grid_n[i]),
        ))
    norm = reader.meta.get("norm_stats")
    logger.info(f"✅ 读取数据集 {reader.manifest_path.name}: {n} 个样本")
    return PoissonDataset(
        samples=samples,
        train_indices=reader["split/train"],
        test_indices=reader["split/test"],
        norm_stats=None if norm is None else NormStats.from_dict(norm),
        generator=dict(reader.meta.get("generator", {})),
    )
