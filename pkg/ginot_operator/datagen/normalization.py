# ginot_operator/datagen/normalization.py
"""零均值 / 单位方差归一化统计, 只在训练划分上计算并冻结进数据集 manifest"""

from dataclasses import dataclass
from typing import Any, Dict, Sequence

import numpy as np

from ..utils.errors import ContainerError

STD_FLOOR = 1e-8


def _std(values: np.ndarray) -> np.ndarray:
    return np.maximum(values.std(axis=0), STD_FLOOR)


def _load_std(loads: np.ndarray) -> float:
    # λ 恒定时无从缩放, 保持单位尺度
    spread = float(loads.std())
    return spread if spread > STD_FLOOR else 1.0


@dataclass
class NormStats:
    """输入坐标 (边界点与查询点共用)、输出场、载荷 λ 的统计量"""
    input_mean: np.ndarray
    input_std: np.ndarray
    output_mean: np.ndarray
    output_std: np.ndarray
    load_mean: float = 0.0
    load_std: float = 1.0

    @classmethod
    def identity(cls, dim: int = 2, channels: int = 1) -> "NormStats":
        return cls(np.zeros(dim), np.ones(dim), np.zeros(channels), np.ones(channels))

    @classmethod
    def fit(cls, coords: Sequence[np.ndarray], outputs: Sequence[np.ndarray],
            loads: Sequence[float]) -> "NormStats":
        """coords: 每个样本的所有坐标行 (边界 + 查询); outputs: 每个样本的解 [N_q, C]"""
        all_coords = np.concatenate([np.asarray(c, dtype=np.float64) for c in coords], axis=0)
        all_out = np.concatenate([np.asarray(o, dtype=np.float64) for o in outputs], axis=0)
        load_arr = np.asarray(loads, dtype=np.float64)
        return cls(
            input_mean=all_coords.mean(axis=0),
            input_std=_std(all_coords),
            output_mean=all_out.mean(axis=0),
            output_std=_std(all_out),
            load_mean=float(load_arr.mean()),
            load_std=_load_std(load_arr),
        )

    def normalize_coords(self, x: np.ndarray) -> np.ndarray:
        return (np.asarray(x, dtype=np.float64) - self.input_mean) / self.input_std

    def denormalize_coords(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x, dtype=np.float64) * self.input_std + self.input_mean

    def normalize_output(self, y: np.ndarray) -> np.ndarray:
        return (np.asarray(y, dtype=np.float64) - self.output_mean) / self.output_std

    def denormalize_output(self, y: np.ndarray) -> np.ndarray:
        return np.asarray(y, dtype=np.float64) * self.output_std + self.output_mean

    def normalize_load(self, load: np.ndarray) -> np.ndarray:
        return (np.asarray(load, dtype=np.float64) - self.load_mean) / self.load_std

    def to_dict(self) -> Dict[str, Any]:
        return {
            "input_mean": self.input_mean.tolist(),
            "input_std": self.input_std.tolist(),
            "output_mean": self.output_mean.tolist(),
            "output_std": self.output_std.tolist(),
            "load_mean": self.load_mean,
            "load_std": self.load_std,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "NormStats":
        """从 manifest 元数据重建

        Raises:
            ContainerError: 字段缺失、不是数值, 或标准差非正
        """
        try:
            stats = cls(
                input_mean=np.asarray(data["input_mean"], dtype=np.float64),
                input_std=np.asarray(data["input_std"], dtype=np.float64),
                output_mean=np.asarray(data["output_mean"], dtype=np.float64),
                output_std=np.asarray(data["output_std"], dtype=np.float64),
                load_mean=float(data.get("load_mean", 0.0)),
                load_std=float(data.get("load_std", 1.0)),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise ContainerError(f"归一化统计格式错误: {type(e).__name__}: {e}") from e
        if stats.input_mean.shape != stats.input_std.shape or stats.output_mean.shape != stats.output_std.shape:
            raise ContainerError("归一化统计的均值与标准差长度不一致")
        stds = np.concatenate([stats.input_std.ravel(), stats.output_std.ravel(), [stats.load_std]])
        if not np.all(np.isfinite(stds)) or np.any(stds <= 0):
            raise ContainerError("归一化统计中的标准差必须为正的有限值")
        return stats
