# ginot_operator/training/trainer.py
"""
训练循环

- 数据顺序、模型初始化、FPS 起点全部由 seed 决定
- 训练时 FPS 用随机起点, 验证时固定为第一个有效点
- 每个 epoch 结束: 验证集 masked MSE 驱动平台期调度, 写指标行与 last 检查点,
  验证集改进时另存 best 检查点
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .batching import Batch, batch_order, collate, forward_batch, subsample_boundary
from .checkpoint import load_checkpoint, save_checkpoint
from .config import TrainConfig
from .losses import l2_relative_error, masked_mse
from ..datagen import NormStats, PoissonDataset, PoissonSample, compute_norm_stats
from ..model import FieldBatch, GinotModel, ModelConfig
from ..numerics import Adam, OptimizerState, Tensor, clip_grad_norm, no_grad, plateau_schedule
from ..pointcloud import FpsInit, PointCloud
from ..utils.errors import ConfigError, TrainingError
from ..utils.run_store import RunStore

logger = logging.getLogger(__name__)


@dataclass
class EpochMetrics:
    epoch: int
    train_mse: float
    val_mse: float
    val_l2: float
    lr: float

    def as_row(self) -> dict:
        return {"epoch": self.epoch, "train_mse": self.train_mse, "val_mse": self.val_mse,
                "val_l2": self.val_l2, "lr": self.lr}


@dataclass
class TrainResult:
    model: GinotModel
    norm_stats: NormStats
    optimizer_state: OptimizerState
    history: List[EpochMetrics] = field(default_factory=list)
    best_epoch: int = -1
    best_val_mse: float = math.inf


class Trainer:
    """GINOT 训练器

    Args:
        model_config: 模型结构
        train_config: 训练超参数
        dataset: 数据集 (train 划分用于训练, test 划分用于验证)
        store: 运行目录; None 时不写任何文件
    """

    def __init__(self, model_config: ModelConfig, train_config: TrainConfig, dataset: PoissonDataset,
                 store: Optional[RunStore] = None):
        if len(dataset) < 2:
            raise ConfigError(f"训练至少需要 2 个样本, 当前 {len(dataset)}", field="training_dataset")
        self.model_config = model_config
        self.config = train_config
        self.store = store
        self.train_indices = [int(i) for i in dataset.train_indices]
        self.test_indices = [int(i) for i in dataset.test_indices]
        self.val_indices = list(self.test_indices)
        self.train_samples = dataset.split("train")
        self.val_samples = dataset.split("test")
        if not self.train_samples:
            raise ConfigError("训练划分为空", field="training_dataset")
        if not self.val_samples:
            logger.warning("⚠️ 验证划分为空, 使用训练划分做验证")
            self.val_samples, self.val_indices = self.train_samples, self.train_indices

        self.norm_stats = dataset.norm_stats or compute_norm_stats(self.train_samples)
        self.model = GinotModel(model_config, seed=train_config.seed)
        self.state = OptimizerState(
            learning_rate=train_config.initial_learning_rate,
            plateau_patience=train_config.scheduler_patience,
            plateau_factor=train_config.scheduler_factor,
            weight_decay=train_config.weight_decay,
            kind=train_config.optimizer,
        )
        self.optimizer = Adam(self.model.parameters(), self.state)
        self.start_epoch = 0
        self.history: List[EpochMetrics] = []
        self.best_epoch = -1
        self.best_val_mse = math.inf

    # ------------------------------------------------------------------
    # 续训
    # ------------------------------------------------------------------
    def resume(self) -> int:
        """从运行目录的 last 检查点恢复, 返回下一个 epoch 编号"""
        if self.store is None:
            raise ConfigError("续训需要运行目录", field="resume")
        ckpt = load_checkpoint(self.store.require_checkpoint("last"))
        self.model.load_state_dict(ckpt.model.state_dict())
        if ckpt.optimizer_state is not None:
            self.state = ckpt.optimizer_state
            self.optimizer = Adam(self.model.parameters(), self.state)
        self.norm_stats = ckpt.norm_stats
        manifest = self.store.load_manifest()
        self.best_epoch = int(manifest.get("best_epoch", -1))
        best = manifest.get("best_val_mse")
        self.best_val_mse = math.inf if best is None else float(best)
        self.start_epoch = ckpt.epoch + 1
        self.store.truncate_metrics(ckpt.epoch)
        logger.info(f"🔄 从 epoch {ckpt.epoch} 续训, 学习率 {self.state.learning_rate:.3g}")
        return self.start_epoch

    # ------------------------------------------------------------------
    # 单步 / 单 epoch
    # ------------------------------------------------------------------
    def _fps_seeds(self, epoch: int, batch_no: int, size: int) -> np.ndarray:
        rng = np.random.default_rng([self.config.seed, epoch, batch_no])
        return rng.integers(0, 2 ** 31 - 1, size=size)

    def _training_clouds(self, samples: Sequence[PoissonSample], indices: Sequence[int],
                         epoch: int) -> Optional[List[PointCloud]]:
        density = self.config.train_density
        if density >= 1.0:
            return None
        clouds = []
        for i, sample in zip(indices, samples):
            rng = np.random.default_rng([self.config.seed, epoch, int(i), 7])
            clouds.append(PointCloud.from_points(subsample_boundary(sample.boundary, density, rng)))
        return clouds

    def batch_loss(self, batch: Batch, init: FpsInit, seeds: Optional[Sequence[int]] = None) -> Tensor:
        pred = forward_batch(self.model, batch, init, seeds)
        target = FieldBatch(Tensor(batch.targets), batch.query_valid)
        return masked_mse(FieldBatch(pred, batch.query_valid), target)

    def train_step(self, batch: Batch, seeds: Sequence[int], epoch: int = 0, batch_no: int = 0) -> float:
        """一次前向 + 反向 + 参数更新, 返回更新前的损失

        Raises:
            TrainingError: 损失为非有限值 (携带 epoch / batch)
        """
        self.optimizer.zero_grad()
        loss = self.batch_loss(batch, FpsInit.SEEDED_RANDOM, seeds)
        value = loss.item()
        if not math.isfinite(value):
            raise TrainingError(f"epoch {epoch} batch {batch_no} 损失为非有限值 {value}",
                                epoch=epoch, batch=batch_no)
        loss.backward()
        grads = self.optimizer.collect_grads()
        if self.config.grad_clip > 0:
            clip_grad_norm(grads, self.config.grad_clip)
        self.optimizer.step(grads)
        return value

    def train_epoch(self, epoch: int) -> float:
        rng = np.random.default_rng([self.config.seed, epoch])
        losses = []
        for batch_no, idx in enumerate(batch_order(len(self.train_samples), self.config.batch_size, rng)):
            samples = [self.train_samples[i] for i in idx]
            dataset_idx = [self.train_indices[i] for i in idx]
            batch = collate(samples, self.norm_stats, indices=dataset_idx,
                            clouds=self._training_clouds(samples, dataset_idx, epoch))
            losses.append(self.train_step(batch, self._fps_seeds(epoch, batch_no, len(idx)), epoch, batch_no))
        return float(np.mean(losses))

    def validate(self) -> Tuple[float, float]:
        """验证集 (masked MSE 的批平均, 物理单位平均 L2)"""
        losses, l2 = [], []
        with no_grad():
            for idx in batch_order(len(self.val_samples), self.config.batch_size):
                samples = [self.val_samples[i] for i in idx]
                batch = collate(samples, self.norm_stats)
                pred = forward_batch(self.model, batch, FpsInit.FIXED_FIRST_VALID)
                target = FieldBatch(Tensor(batch.targets), batch.query_valid)
                losses.append(masked_mse(FieldBatch(pred, batch.query_valid), target).item())
                physical = self.norm_stats.denormalize_output(pred.numpy())
                for row, sample in enumerate(samples):
                    mask = np.ones(sample.num_queries, dtype=bool)
                    l2.append(l2_relative_error(physical[row, :sample.num_queries], sample.solution, mask))
        return float(np.mean(losses)), float(np.mean(l2))

    # ------------------------------------------------------------------
    # 主循环
    # ------------------------------------------------------------------
    def _checkpoint(self, name: str, epoch: int) -> None:
        if self.store is None:
            return
        save_checkpoint(self.store.checkpoint_stem(name), self.model, self.norm_stats, epoch,
                        optimizer_state=self.state,
                        extra={"split": {"train": self.train_indices, "test": self.test_indices}})

    def fit(self, epochs: Optional[int] = None) -> TrainResult:
        total = self.config.epochs if epochs is None else epochs
        if self.store is not None:
            self.store.update_manifest(
                seed=self.config.seed,
                train_indices=self.train_indices,
                test_indices=self.test_indices,
                val_indices=self.val_indices,
                norm_stats=self.norm_stats.to_dict(),
            )
        logger.info(f"🔄 开始训练: epoch {self.start_epoch}..{total - 1}, "
                    f"训练 {len(self.train_samples)} / 验证 {len(self.val_samples)} 个样本")

        for epoch in range(self.start_epoch, total):
            lr = self.state.learning_rate
            train_mse = self.train_epoch(epoch)
            val_mse, val_l2 = self.validate()
            plateau_schedule(self.state, val_mse)
            metrics = EpochMetrics(epoch, train_mse, val_mse, val_l2, lr)
            self.history.append(metrics)
            logger.info(f"epoch {epoch}: train_mse={train_mse:.4e} val_mse={val_mse:.4e} "
                        f"val_l2={val_l2:.4%} lr={lr:.3g}")

            if val_mse < self.best_val_mse:
                self.best_val_mse, self.best_epoch = val_mse, epoch
                self._checkpoint("best", epoch)
            self._checkpoint("last", epoch)
            if self.store is not None:
                self.store.append_metrics(metrics.as_row())
                self.store.update_manifest(last_epoch=epoch, best_epoch=self.best_epoch,
                                           best_val_mse=self.best_val_mse)

        logger.info(f"✅ 训练结束, 最佳 epoch {self.best_epoch}, 验证 MSE {self.best_val_mse:.4e}")
        return TrainResult(self.model, self.norm_stats, self.state, self.history,
                           self.best_epoch, self.best_val_mse)


def train(model_config: ModelConfig, train_config: TrainConfig, dataset: PoissonDataset,
          store: Optional[RunStore] = None, resume: bool = False) -> TrainResult:
    """构建 Trainer 并运行全部 epoch"""
    trainer = Trainer(model_config, train_config, dataset, store)
    if resume:
        trainer.resume()
    return trainer.fit()
