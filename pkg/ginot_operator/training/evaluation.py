# ginot_operator/training/evaluation.py
"""
评估: 预测器接口 + 每样本 L2 相对误差统计

预测器把一组样本 (可替换边界点云) 映射为物理单位下的解场;
OraclePredictor 直接返回存储的解, 作为测试钩子。
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Protocol, Sequence

import numpy as np
import pandas as pd

from .batching import batch_order, collate, forward_batch
from .losses import l2_relative_error
from ..datagen import NormStats, PoissonSample
from ..model import GinotModel
from ..numerics import no_grad
from ..pointcloud import FpsInit, PointCloud

logger = logging.getLogger(__name__)


class Predictor(Protocol):
    def predict(self, samples: Sequence[PoissonSample],
                clouds: Optional[Sequence[PointCloud]] = None) -> List[np.ndarray]:
        """返回每个样本 [N_q, C] 的物理单位预测"""


class ModelPredictor:
    """用训练好的 GINOT 模型做批量推理"""

    def __init__(self, model: GinotModel, norm_stats: NormStats, batch_size: int = 32,
                 init: FpsInit = FpsInit.FIXED_FIRST_VALID, seed: int = 0):
        self.model = model
        self.norm_stats = norm_stats
        self.batch_size = batch_size
        self.init = init
        self.seed = seed

    def predict(self, samples: Sequence[PoissonSample],
                clouds: Optional[Sequence[PointCloud]] = None) -> List[np.ndarray]:
        outputs: List[np.ndarray] = []
        for batch_no, idx in enumerate(batch_order(len(samples), self.batch_size)):
            chosen = [samples[i] for i in idx]
            batch = collate(chosen, self.norm_stats, indices=idx,
                            clouds=None if clouds is None else [clouds[i] for i in idx])
            seeds = [self.seed + int(i) for i in idx]
            with no_grad():
                pred = forward_batch(self.model, batch, self.init, seeds).numpy()
            physical = self.norm_stats.denormalize_output(pred)
            for row, sample in enumerate(chosen):
                outputs.append(physical[row, :sample.num_queries])
        return outputs

    def predict_points(self, boundary: np.ndarray, queries: np.ndarray, load: float = 1.0) -> np.ndarray:
        """在任意查询点上推理 (单个几何)"""
        boundary = np.asarray(boundary, dtype=np.float64)
        queries = np.asarray(queries, dtype=np.float64)
        sample = PoissonSample(
            boundary=boundary,
            queries=queries,
            solution=np.zeros((queries.shape[0], self.model.config.out_channels)),
            load=float(load),
            radii=np.linalg.norm(boundary, axis=1),
        )
        return self.predict([sample])[0]


class OraclePredictor:
    """返回存储的参考解"""

    def predict(self, samples: Sequence[PoissonSample],
                clouds: Optional[Sequence[PointCloud]] = None) -> List[np.ndarray]:
        return [s.solution.copy() for s in samples]


@dataclass
class EvaluationReport:
    per_sample: pd.DataFrame  # sample, l2, n_queries, n_boundary
    summary: Dict[str, float]


def summarize(l2: np.ndarray, indices: Sequence[int]) -> Dict[str, float]:
    if l2.size == 0:
        return {"n": 0, "mean_l2": float("nan"), "std_l2": float("nan"),
                "median_l2": float("nan"), "worst_l2": float("nan"), "worst_sample": -1}
    worst = int(np.argmax(l2))
    return {
        "n": int(l2.size),
        "mean_l2": float(l2.mean()),
        "std_l2": float(l2.std()),
        "median_l2": float(np.median(l2)),
        "worst_l2": float(l2[worst]),
        "worst_sample": int(indices[worst]),
    }


def evaluate_predictor(predictor: Predictor, samples: Sequence[PoissonSample],
                       indices: Optional[Sequence[int]] = None,
                       clouds: Optional[Sequence[PointCloud]] = None) -> EvaluationReport:
    """逐样本计算 L2 相对误差, 并汇总 mean / std / median / worst"""
    indices = list(indices) if indices is not None else list(range(len(samples)))
    predictions = predictor.predict(samples, clouds) if samples else []
    rows = []
    for idx, sample, pred in zip(indices, samples, predictions):
        mask = np.ones(sample.num_queries, dtype=bool)
        rows.append({
            "sample": int(idx),
            "l2": l2_relative_error(pred, sample.solution, mask),
            "n_queries": sample.num_queries,
            "n_boundary": int(sample.boundary.shape[0] if clouds is None else clouds[len(rows)].num_valid),
        })
    frame = pd.DataFrame(rows, columns=["sample", "l2", "n_queries", "n_boundary"])
    summary = summarize(frame["l2"].to_numpy(dtype=np.float64), indices)
    logger.info(f"✅ 评估完成: {summary['n']} 个样本, 平均 L2 {summary['mean_l2']:.4%}")
    return EvaluationReport(per_sample=frame, summary=summary)
