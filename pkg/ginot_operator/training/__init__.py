"""
训练与评估 - 批次组装、masked MSE、平台期调度训练循环、检查点与 L2 评估
"""

from ..datagen.normalization import NormStats
from .config import TrainConfig
from .losses import l2_relative_error, masked_mse
from .batching import Batch, batch_order, collate, forward_batch, subsample_boundary
from .checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from .evaluation import (
    EvaluationReport,
    ModelPredictor,
    OraclePredictor,
    Predictor,
    evaluate_predictor,
    summarize,
)
from .trainer import EpochMetrics, Trainer, TrainResult, train

__all__ = [
    "NormStats",
    "TrainConfig",
    "l2_relative_error",
    "masked_mse",
    "Batch",
    "batch_order",
    "collate",
    "forward_batch",
    "subsample_boundary",
    "Checkpoint",
    "load_checkpoint",
    "save_checkpoint",
    "EvaluationReport",
    "ModelPredictor",
    "OraclePredictor",
    "Predictor",
    "evaluate_predictor",
    "summarize",
    "EpochMetrics",
    "Trainer",
    "TrainResult",
    "train",
]
