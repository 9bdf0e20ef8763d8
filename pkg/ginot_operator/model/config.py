# ginot_operator/model/config.py
"""模型结构配置 (pydantic), 字段名与公开的超参数表行名一致"""

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..pointcloud import GroupingMode


class FrequencyEncodingConfig(BaseModel):
    """频率位置编码: 每个坐标输出 include_input + 2L 个通道"""
    model_config = ConfigDict(extra="forbid", frozen=True)

    num_frequencies: int = Field(default=8, ge=1, description="频率层数 L")
    include_input: bool = Field(default=True, description="是否保留原始坐标")
    base: float = Field(default=2.0, gt=0, description="几何频率的底数")

    def channels(self, dim: int) -> int:
        return dim * (int(self.include_input) + 2 * self.num_frequencies)


class ModelConfig(BaseModel):
    """GINOT 结构超参数"""
    model_config = ConfigDict(extra="forbid")

    coord_dim: int = Field(default=2, ge=1, description="坐标维度 d")
    out_channels: int = Field(default=1, ge=1, description="解场通道数")
    embedding_dim: int = Field(default=64, ge=1, description="嵌入维度 d_e")
    local_channels: int = Field(default=0, ge=0, description="局部特征通道 C, 0 表示与 d_e 相同")
    num_frequencies: int = Field(default=8, ge=1, description="位置编码频率层数 L")
    n_s: int = Field(default=64, ge=1, description="FPS 中心点数 N_s")
    n_p: int = Field(default=18, ge=1, description="每组点数 N_p")
    grouping_r: float = Field(default=0.2, gt=0, description="分组球半径 r")
    grouping_mode: GroupingMode = Field(default=GroupingMode.NEAREST_FILL, description="球内点不足时的补齐方式")
    attention_heads_encoder: int = Field(default=8, ge=1, description="编码器注意力头数")
    att_heads_decoder: int = Field(default=8, ge=1, description="解码器注意力头数")
    cross_att_layers_encoder: int = Field(default=1, ge=0, description="编码器交叉注意力层数")
    self_att_layers_encoder: int = Field(default=3, ge=0, description="编码器自注意力层数")
    cross_att_layers_decoder: int = Field(default=4, ge=1, description="解码器交叉注意力层数")
    use_extras: bool = Field(default=False, description="是否启用附加标量输入 (载荷 λ)")
    extras_dim: int = Field(default=1, ge=1, description="附加输入维度")

    @model_validator(mode="after")
    def _check_heads(self) -> "ModelConfig":
        for field_name in ("attention_heads_encoder", "att_heads_decoder"):
            heads = getattr(self, field_name)
            if self.embedding_dim % heads != 0:
                raise ValueError(f"{field_name}={heads} 不能整除 embedding_dim={self.embedding_dim}")
        return self

    @property
    def channels(self) -> int:
        return self.local_channels or self.embedding_dim

    @property
    def encoding(self) -> FrequencyEncodingConfig:
        return FrequencyEncodingConfig(num_frequencies=self.num_frequencies)
