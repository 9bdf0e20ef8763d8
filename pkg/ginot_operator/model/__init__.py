"""
GINOT 模型 - 频率编码、几何编码器、解场解码器与载荷融合
"""

from .config import FrequencyEncodingConfig, ModelConfig
from .encoding import frequency_encode
from .geometry_encoder import (
    GeometryEncoder,
    GeometryTokens,
    GroupPlan,
    build_group_plan,
    encode_geometry,
    local_feature_extract,
)
from .solution_decoder import FieldBatch, QueryBatch, SolutionDecoder, decode
from .extension import ExtraInputs, ExtrasFusion, decode_with_extras, fuse_extras
from .ginot import GinotModel

__all__ = [
    "FrequencyEncodingConfig",
    "ModelConfig",
    "frequency_encode",
    "GeometryEncoder",
    "GeometryTokens",
    "GroupPlan",
    "build_group_plan",
    "encode_geometry",
    "local_feature_extract",
    "FieldBatch",
    "QueryBatch",
    "SolutionDecoder",
    "decode",
    "ExtraInputs",
    "ExtrasFusion",
    "decode_with_extras",
    "fuse_extras",
    "GinotModel",
]
