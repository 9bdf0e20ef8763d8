"""
工具模块 - 错误体系、配置解析、路径守卫、运行目录管理
"""

from .errors import (
    AttentionMaskError,
    CheckpointError,
    ConfigError,
    ContainerError,
    DegenerateDomainError,
    GinotError,
    GradientError,
    MetricError,
    PathSecurityError,
    PointCloudError,
    ShapeError,
    SolverError,
    TrainingError,
)
from .config_parser import RobustConfigParser
from .paths import SecureFileManager
from .run_store import RunStore

__all__ = [
    "AttentionMaskError",
    "CheckpointError",
    "ConfigError",
    "ContainerError",
    "DegenerateDomainError",
    "GinotError",
    "GradientError",
    "MetricError",
    "PathSecurityError",
    "PointCloudError",
    "ShapeError",
    "SolverError",
    "TrainingError",
    "RobustConfigParser",
    "SecureFileManager",
    "RunStore",
]
