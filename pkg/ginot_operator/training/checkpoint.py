# ginot_operator/training/checkpoint.py
"""
检查点: 复用数据集容器格式

数组:  param/<name>, adam_m/<name>, adam_v/<name>
meta:  model_config, norm_stats, epoch, optimizer (标量 + 类型), split (训练时的 train/test 编号)
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Union

from ..datagen import ContainerReader, ContainerWriter, NormStats, container_paths
from ..model import GinotModel, ModelConfig
from ..numerics import OptimizerKind, OptimizerState
from ..utils.errors import CheckpointError, ContainerError

logger = logging.getLogger(__name__)


@dataclass
class Checkpoint:
    model: GinotModel
    norm_stats: NormStats
    epoch: int
    optimizer_state: Optional[OptimizerState] = None
    meta: Dict[str, Any] = field(default_factory=dict)


def save_checkpoint(path: Union[str, Path], model: GinotModel, norm_stats: NormStats, epoch: int,
                    optimizer_state: Optional[OptimizerState] = None,
                    extra: Optional[Dict[str, Any]] = None) -> Path:
    """写出权重、归一化统计与 (可选) 优化器状态, 返回 manifest 路径"""
    writer = ContainerWriter(path)
    with writer:
        for name, value in model.state_dict().items():
            writer.write(f"param/{name}", value)
        optimizer_meta = None
        if optimizer_state is not None:
            for name, m in optimizer_state.first_moment.items():
                writer.write(f"adam_m/{name}", m)
                writer.write(f"adam_v/{name}", optimizer_state.second_moment[name])
            optimizer_meta = {
                **optimizer_state.scalars(),
                "kind": optimizer_state.kind.value,
                "plateau_patience": optimizer_state.plateau_patience,
                "plateau_factor": optimizer_state.plateau_factor,
                "weight_decay": optimizer_state.weight_decay,
            }
        writer.close(meta={
            "model_config": model.config.model_dump(mode="json"),
            "norm_stats": norm_stats.to_dict(),
            "epoch": int(epoch),
            "optimizer": optimizer_meta,
            **(extra or {}),
        })
    logger.debug(f"检查点已保存: {writer.manifest_path} (epoch {epoch})")
    return writer.manifest_path


def load_checkpoint(path: Union[str, Path]) -> Checkpoint:
    """读取检查点并重建模型

    Raises:
        CheckpointError: 文件不存在或内容不完整
    """
    manifest_path, _ = container_paths(path)
    if not manifest_path.exists():
        raise CheckpointError(f"检查点不存在: {manifest_path}")
    try:
        reader = ContainerReader(path)
    except ContainerError as e:
        raise CheckpointError(f"检查点损坏: {e.message}") from e

    meta = reader.meta
    for key in ("model_config", "norm_stats", "epoch"):
        if key not in meta:
            raise CheckpointError(f"检查点 {manifest_path.name} 缺少字段 {key}")

    try:
        norm_stats = NormStats.from_dict(meta["norm_stats"])
    except ContainerError as e:
        raise CheckpointError(f"检查点 {manifest_path.name}: {e.message}") from e
    model = GinotModel(ModelConfig.model_validate(meta["model_config"]))
    state = {name[len("param/"):]: reader[name] for name in reader if name.startswith("param/")}
    model.load_state_dict(state)

    optimizer_state = None
    opt_meta = meta.get("optimizer")
    if opt_meta:
        optimizer_state = OptimizerState(
            learning_rate=float(opt_meta["learning_rate"]),
            plateau_patience=int(opt_meta["plateau_patience"]),
            plateau_factor=float(opt_meta["plateau_factor"]),
            weight_decay=float(opt_meta["weight_decay"]),
            kind=OptimizerKind(opt_meta["kind"]),
        )
        optimizer_state.restore_scalars(opt_meta)
        for name in reader:
            if name.startswith("adam_m/"):
                key = name[len("adam_m/"):]
                optimizer_state.first_moment[key] = reader[name]
                optimizer_state.second_moment[key] = reader[f"adam_v/{key}"]

    logger.info(f"✅ 检查点已加载: {manifest_path.name} (epoch {meta['epoch']})")
    return Checkpoint(model=model, norm_stats=norm_stats,
                      epoch=int(meta["epoch"]), optimizer_state=optimizer_state, meta=dict(meta))
