# ginot_operator/utils/errors.py
"""
统一异常体系 - 所有领域错误都携带稳定的机器可读错误码

CLI 层只捕获 GinotError 并输出单行 `ERROR code=<CODE> message=<text>`,
其余模块只负责抛出。
"""

from typing import Optional


class GinotError(Exception):
    """所有 ginot_operator 错误的基类"""
    code = "GINOT_ERROR"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message

    def one_line(self) -> str:
        """生成单行、可被脚本解析的错误描述"""
        text = " ".join(str(self.message).split())
        return f"ERROR code={self.code} message={text}"


class ShapeError(GinotError):
    """张量/批次形状不一致"""
    code = "SHAPE_MISMATCH"


class AttentionMaskError(GinotError):
    """key_mask 全部为 False, 注意力无可用的 key"""
    code = "NO_ATTENDABLE_KEYS"


class GradientError(GinotError):
    """梯度出现 NaN/Inf"""
    code = "NON_FINITE_GRADIENT"

    def __init__(self, message: str, parameter: Optional[str] = None):
        super().__init__(message)
        self.parameter = parameter


class PointCloudError(GinotError):
    """点云采样/分组的前置条件不满足"""
    code = "INVALID_POINT_CLOUD"


class DegenerateDomainError(GinotError):
    """求解域内部没有网格节点"""
    code = "DEGENERATE_DOMAIN"


class SolverError(GinotError):
    """线性求解器未收敛"""
    code = "SOLVER_FAILED"


class ContainerError(GinotError):
    """数据容器 manifest 或 payload 损坏"""
    code = "CORRUPT_CONTAINER"


class ConfigError(GinotError):
    """配置字段非法"""
    code = "INVALID_CONFIG"

    def __init__(self, message: str, field: Optional[str] = None):
        super().__init__(message)
        self.field = field


class TrainingError(GinotError):
    """训练过程中损失为非有限值"""
    code = "NON_FINITE_LOSS"

    def __init__(self, message: str, epoch: Optional[int] = None, batch: Optional[int] = None):
        super().__init__(message)
        self.epoch = epoch
        self.batch = batch


class PathSecurityError(GinotError):
    """输出路径越出允许的运行目录"""
    code = "UNSAFE_PATH"


class CheckpointError(GinotError):
    """检查点文件缺失或不可用"""
    code = "MISSING_CHECKPOINT"


class MetricError(GinotError):
    """相对误差的参考解范数为 0"""
    code = "ZERO_NORM_TARGET"
