# ginot_operator/cli/config.py
"""
运行配置 - 配置文件中的扁平键集合

键名与公开超参数表的行名一致 (batch_size, n_s, grouping_r, ...),
默认值取结构化网格 Poisson 一列; 其余是本实现的产物键。
"""

import logging
from pathlib import Path
from typing import Any, Dict, Optional, Type, TypeVar, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ..datagen import DataGenConfig
from ..model import ModelConfig
from ..numerics import OptimizerKind
from ..pointcloud import GroupingMode
from ..training import TrainConfig
from ..utils.config_parser import RobustConfigParser
from ..utils.errors import ConfigError

logger = logging.getLogger(__name__)

T = TypeVar("T", bound=BaseModel)

_MODEL_KEYS = (
    "n_s", "n_p", "grouping_r", "grouping_mode", "attention_heads_encoder", "att_heads_decoder",
    "cross_att_layers_encoder", "self_att_layers_encoder", "cross_att_layers_decoder",
    "embedding_dim", "num_frequencies", "use_extras",
)
_TRAIN_KEYS = (
    "batch_size", "optimizer", "initial_learning_rate", "scheduler_patience", "scheduler_factor",
    "epochs", "grad_clip", "weight_decay", "train_density", "seed",
)
_DATAGEN_KEYS = (
    "n_samples", "grid_n", "seed", "n_b", "n_modes", "smoothness", "amplitude",
    "lambda_min", "lambda_max", "training_dataset",
)


def validated(cls: Type[T], data: Dict[str, Any]) -> T:
    """pydantic 校验; 失败时转成带字段名的 ConfigError"""
    try:
        return cls.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        field_name = ".".join(str(p) for p in first.get("loc", ())) or None
        text = first.get("msg", str(e))
        raise ConfigError(f"配置字段 {field_name or '<root>'} 非法: {text}", field=field_name) from e


class RunConfig(BaseModel):
    """命令行使用的完整配置"""
    model_config = ConfigDict(extra="forbid")

    # 训练
    batch_size: int = Field(default=32, ge=1, description="批大小")
    optimizer: OptimizerKind = Field(default=OptimizerKind.ADAM, description="adam 或 adamw")
    initial_learning_rate: float = Field(default=1e-3, gt=0, description="初始学习率")
    scheduler_patience: int = Field(default=40, ge=1, description="平台期耐心")
    scheduler_factor: float = Field(default=0.7, gt=0, lt=1, description="平台期衰减系数")
    epochs: int = Field(default=500, ge=0, description="训练 epoch 数")
    training_dataset: float = Field(default=0.8, gt=0, lt=1, description="训练集比例")
    testing_dataset: float = Field(default=0.2, gt=0, lt=1, description="测试集比例")
    grad_clip: float = Field(default=1.0, ge=0, description="梯度裁剪阈值")
    weight_decay: float = Field(default=0.0, ge=0, description="AdamW 权重衰减")
    train_density: float = Field(default=1.0, gt=0, le=1, description="训练点云密度")
    seed: int = Field(default=0, ge=0, description="全局种子")

    # 模型
    n_s: int = Field(default=64, ge=1, description="FPS 中心点数")
    n_p: int = Field(default=18, ge=1, description="每组点数")
    grouping_r: float = Field(default=0.2, gt=0, description="分组半径")
    grouping_mode: GroupingMode = Field(default=GroupingMode.NEAREST_FILL, description="分组补齐方式")
    att_heads_decoder: int = Field(default=8, ge=1, description="解码器注意力头数")
    attention_heads_encoder: int = Field(default=8, ge=1, description="编码器注意力头数")
    cross_att_layers_encoder: int = Field(default=1, ge=0, description="编码器交叉注意力层数")
    self_att_layers_encoder: int = Field(default=3, ge=0, description="编码器自注意力层数")
    cross_att_layers_decoder: int = Field(default=4, ge=1, description="解码器交叉注意力层数")
    embedding_dim: int = Field(default=64, ge=1, description="嵌入维度")
    num_frequencies: int = Field(default=8, ge=1, description="位置编码频率层数")
    use_extras: bool = Field(default=False, description="启用载荷 λ 输入")

    # 数据集生成
    n_samples: int = Field(default=500, ge=0, description="样本数")
    grid_n: int = Field(default=48, ge=16, description="网格节点数")
    n_b: int = Field(default=144, ge=8, description="边界点数")
    n_modes: int = Field(default=6, ge=0, description="边界 Fourier 模态数")
    smoothness: float = Field(default=1.0, ge=0, description="模态衰减指数")
    amplitude: float = Field(default=0.12, ge=0, description="一阶模态标准差")
    lambda_min: float = Field(default=1.0, description="载荷下限")
    lambda_max: float = Field(default=1.0, description="载荷上限")

    @model_validator(mode="after")
    def _check_split(self) -> "RunConfig":
        if abs(self.training_dataset + self.testing_dataset - 1.0) > 1e-9:
            raise ConfigError(f"training_dataset + testing_dataset 必须为 1, "
                              f"当前 {self.training_dataset} + {self.testing_dataset}", field="testing_dataset")
        return self

    def _subset(self, keys) -> Dict[str, Any]:
        return {k: getattr(self, k) for k in keys}

    def to_model_config(self) -> ModelConfig:
        return validated(ModelConfig, self._subset(_MODEL_KEYS))

    def to_train_config(self) -> TrainConfig:
        return validated(TrainConfig, self._subset(_TRAIN_KEYS))

    def to_datagen_config(self, num_workers: int = 1) -> DataGenConfig:
        return validated(DataGenConfig, {**self._subset(_DATAGEN_KEYS), "num_workers": num_workers})

    def with_updates(self, **updates: Any) -> "RunConfig":
        """返回重新校验过的副本"""
        return validated(RunConfig, {**self.model_dump(), **updates})


def load_run_config(path: Optional[Union[str, Path]] = None,
                    overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """读取配置文件 (可选) 并叠加命令行覆盖项

    Raises:
        ConfigError: 文件缺失、解析失败或字段非法 (带字段名)
    """
    data: Dict[str, Any] = {}
    if path is not None:
        data = RobustConfigParser.load(path)
        logger.info(f"✅ 已读取配置文件 {path} ({len(data)} 个字段)")
    data.update({k: v for k, v in (overrides or {}).items() if v is not None})
    cfg = validated(RunConfig, data)
    # 提前暴露组合约束 (如头数整除 embedding_dim)
    cfg.to_model_config()
    return cfg
