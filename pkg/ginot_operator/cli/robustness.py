# ginot_operator/cli/robustness.py
"""
点云鲁棒性实验

模式:
- original           原始点云
- shuffled           打乱后保留前 80%
- padded             末尾追加 199 个位于 (-1000, -1000) 的填充点
- shuffled_padded    对 padded 点云整体打乱 (填充点混入中间)
- shuffled_anchored  打乱但第一个有效点保持在首位, FPS 起点不变
- density_<d>        保留 d% 的点; 不同密度的子集互相嵌套
- seed_sweep         FPS 随机起点, K 个种子的平均 L2 的均值 / 标准差
"""

import logging
import math
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from ..datagen import PoissonSample
from ..pointcloud import FpsInit, PointCloud
from ..training import ModelPredictor, Predictor, evaluate_predictor
from ..utils.errors import ConfigError

logger = logging.getLogger(__name__)

PAD_POINTS = 199
PAD_VALUE = -1000.0
SHUFFLE_KEEP = 0.8
DEFAULT_DENSITIES = (100.0, 80.0, 60.0, 40.0, 20.0)
DEFAULT_SWEEP_SEEDS = 20
CLOUD_MODES = ("original", "shuffled", "padded", "shuffled_padded", "shuffled_anchored")
ALL_MODES = CLOUD_MODES + ("density", "seed_sweep")
DEFAULT_MODES = ("original", "shuffled", "padded", "shuffled_padded", "density")

COLUMNS = ["mode", "mean_l2", "std_l2", "median_l2", "worst_l2", "n"]


def check_densities(densities: Sequence[float]) -> List[float]:
    """百分比密度必须在 (0, 100] 内"""
    checked = []
    for d in densities:
        if not 0.0 < float(d) <= 100.0:
            raise ConfigError(f"点云密度必须在 (0, 100] 内, 当前 {d}", field="density")
        checked.append(float(d))
    return checked


def shuffled_cloud(points: np.ndarray, rng: np.random.Generator, keep: float = 1.0) -> PointCloud:
    perm = rng.permutation(points.shape[0])
    n_keep = max(1, math.ceil(keep * points.shape[0]))
    return PointCloud.from_points(points[perm[:n_keep]])


def padded_cloud(cloud: PointCloud, n_pad: int = PAD_POINTS, fill_value: float = PAD_VALUE) -> PointCloud:
    return cloud.padded(cloud.num_points + n_pad, fill_value=fill_value)


def shuffled_padded_cloud(points: np.ndarray, rng: np.random.Generator) -> PointCloud:
    cloud = padded_cloud(PointCloud.from_points(points))
    perm = rng.permutation(cloud.num_points)
    return PointCloud(cloud.points[perm], cloud.valid[perm])


def anchored_shuffle(points: np.ndarray, rng: np.random.Generator) -> PointCloud:
    """打乱除第一个点以外的全部点"""
    rest = 1 + rng.permutation(points.shape[0] - 1)
    return PointCloud.from_points(points[np.concatenate([[0], rest])])


def density_cloud(points: np.ndarray, density: float, order: np.ndarray) -> PointCloud:
    """按固定的随机顺序取前 ceil(d%·N) 个点, 再按原顺序排列

    同一 order 下, 低密度子集总是高密度子集的子集。
    """
    n_keep = max(1, math.ceil(density / 100.0 * points.shape[0]))
    return PointCloud.from_points(points[np.sort(order[:n_keep])])


def mode_clouds(samples: Sequence[PoissonSample], mode: str, seed: int) -> List[PointCloud]:
    """为每个样本构造某一模式下的边界点云; 种子只与 (seed, 样本序号) 有关"""
    clouds = []
    for i, sample in enumerate(samples):
        rng = np.random.default_rng([seed, i])
        points = sample.boundary
        if mode == "original":
            clouds.append(PointCloud.from_points(points))
        elif mode == "shuffled":
            clouds.append(shuffled_cloud(points, rng, keep=SHUFFLE_KEEP))
        elif mode == "padded":
            clouds.append(padded_cloud(PointCloud.from_points(points)))
        elif mode == "shuffled_padded":
            clouds.append(shuffled_padded_cloud(points, rng))
        elif mode == "shuffled_anchored":
            clouds.append(anchored_shuffle(points, rng))
        else:
            raise ConfigError(f"未知的鲁棒性模式: {mode}", field="modes")
    return clouds


def _row(mode: str, summary: Dict[str, float]) -> Dict[str, object]:
    return {"mode": mode, **{k: summary[k] for k in ("mean_l2", "std_l2", "median_l2", "worst_l2", "n")}}


def run_robustness(predictor: Predictor, samples: Sequence[PoissonSample], indices: Sequence[int],
                   modes: Sequence[str] = DEFAULT_MODES,
                   densities: Sequence[float] = DEFAULT_DENSITIES, seed: int = 0,
                   sweep_seeds: int = DEFAULT_SWEEP_SEEDS,
                   sweep_predictor: Optional[ModelPredictor] = None) -> pd.DataFrame:
    """逐模式评估, 每个模式 (或密度) 一行

    Raises:
        ConfigError: 未知模式或密度 ≤ 0
    """
    unknown = [m for m in modes if m not in ALL_MODES]
    if unknown:
        raise ConfigError(f"未知的鲁棒性模式: {unknown[0]}", field="modes")
    densities = check_densities(densities)
    rows = []

    for mode in modes:
        if mode in CLOUD_MODES:
            report = evaluate_predictor(predictor, samples, indices, mode_clouds(samples, mode, seed))
            rows.append(_row(mode, report.summary))
        elif mode == "density":
            orders = [np.random.default_rng([seed, i, 1]).permutation(s.boundary.shape[0])
                      for i, s in enumerate(samples)]
            for d in densities:
                clouds = [density_cloud(s.boundary, d, o) for s, o in zip(samples, orders)]
                report = evaluate_predictor(predictor, samples, indices, clouds)
                rows.append(_row(f"density_{d:g}", report.summary))
        elif mode == "seed_sweep":
            rows.append(_seed_sweep_row(sweep_predictor, samples, indices, seed, sweep_seeds))
        logger.info(f"✅ 模式 {rows[-1]['mode']}: 平均 L2 {rows[-1]['mean_l2']:.4%}")

    return pd.DataFrame(rows, columns=COLUMNS)


def _seed_sweep_row(predictor: Optional[ModelPredictor], samples: Sequence[PoissonSample],
                    indices: Sequence[int], seed: int, sweep_seeds: int) -> Dict[str, object]:
    if predictor is None:
        raise ConfigError("seed_sweep 需要模型预测器", field="modes")
    if sweep_seeds < 1:
        raise ConfigError(f"种子数必须 ≥ 1, 当前 {sweep_seeds}", field="sweep_seeds")
    means = []
    for k in range(sweep_seeds):
        swept = ModelPredictor(predictor.model, predictor.norm_stats, predictor.batch_size,
                               init=FpsInit.SEEDED_RANDOM, seed=seed + 100_003 * (k + 1))
        means.append(evaluate_predictor(swept, samples, indices).summary["mean_l2"])
    means = np.asarray(means)
    logger.info(f"🔄 {sweep_seeds} 个 FPS 种子: 平均 L2 {means.mean():.4%} ± {means.std():.4%}")
    return {"mode": "seed_sweep", "mean_l2": float(means.mean()), "std_l2": float(means.std()),
            "median_l2": float(np.median(means)), "worst_l2": float(means.max()), "n": sweep_seeds}
