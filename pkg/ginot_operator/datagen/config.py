# ginot_operator/datagen/config.py
"""数据集生成参数"""

from pydantic import BaseModel, ConfigDict, Field, model_validator


class DataGenConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n_samples: int = Field(default=500, ge=0, description="样本数")
    grid_n: int = Field(default=48, ge=16, description="每个方向的网格节点数")
    seed: int = Field(default=0, ge=0, description="生成种子")
    n_b: int = Field(default=144, ge=8, description="边界采样点数")
    n_modes: int = Field(default=6, ge=0, description="边界 Fourier 模态数")
    smoothness: float = Field(default=1.0, ge=0, description="系数标准差按 1/k^smoothness 衰减")
    amplitude: float = Field(default=0.12, ge=0, description="一阶模态的标准差")
    lambda_min: float = Field(default=1.0, description="载荷 λ 下限")
    lambda_max: float = Field(default=1.0, description="载荷 λ 上限")
    training_dataset: float = Field(default=0.8, gt=0, le=1, description="训练划分比例")
    num_workers: int = Field(default=1, ge=1, description="生成进程数")

    @model_validator(mode="after")
    def _check_lambda(self) -> "DataGenConfig":
        if self.lambda_max < self.lambda_min:
            raise ValueError(f"lambda_max={self.lambda_max} 小于 lambda_min={self.lambda_min}")
        return self

    @property
    def varies_load(self) -> bool:
        return self.lambda_max > self.lambda_min
