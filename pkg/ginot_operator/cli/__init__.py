"""
命令行层 - 运行配置、子命令、鲁棒性与消融实验
"""

from .config import RunConfig, load_run_config, validated
from .commands import (
    apply_split,
    cmd_ablation,
    cmd_eval,
    cmd_generate,
    cmd_infer,
    cmd_robustness,
    cmd_train,
    read_points_csv,
    resolve_checkpoint,
)
from .robustness import run_robustness
from .ablation import run_ablation
from .main import build_parser, main

__all__ = [
    "RunConfig",
    "load_run_config",
    "validated",
    "apply_split",
    "cmd_ablation",
    "cmd_eval",
    "cmd_generate",
    "cmd_infer",
    "cmd_robustness",
    "cmd_train",
    "read_points_csv",
    "resolve_checkpoint",
    "run_robustness",
    "run_ablation",
    "build_parser",
    "main",
]
