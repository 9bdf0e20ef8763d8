# ginot_operator/training/config.py
"""训练超参数; 默认值为结构化网格 Poisson 的公开设置"""

from pydantic import BaseModel, ConfigDict, Field

from ..numerics import OptimizerKind


class TrainConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    batch_size: int = Field(default=32, ge=1, description="批大小")
    optimizer: OptimizerKind = Field(default=OptimizerKind.ADAM, description="adam 或 adamw")
    initial_learning_rate: float = Field(default=1e-3, gt=0, description="初始学习率")
    scheduler_patience: int = Field(default=40, ge=1, description="平台期耐心 (epoch)")
    scheduler_factor: float = Field(default=0.7, gt=0, lt=1, description="平台期学习率衰减系数")
    epochs: int = Field(default=500, ge=0, description="训练 epoch 数")
    grad_clip: float = Field(default=1.0, ge=0, description="全局梯度范数上限, 0 表示不裁剪")
    weight_decay: float = Field(default=0.0, ge=0, description="AdamW 解耦权重衰减")
    train_density: float = Field(default=1.0, gt=0, le=1, description="训练时保留的边界点比例")
    seed: int = Field(default=0, ge=0, description="初始化 / 数据顺序 / FPS 种子")
