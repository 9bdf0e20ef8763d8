# ginot_operator/cli/main.py
"""
命令行解析与分发

子命令: generate | train | eval | infer | robustness | ablation
全局参数: --seed --out --config

错误处理: 领域错误输出单行 `ERROR code=<CODE> message=<text>` 并以 2 退出,
其它异常以 code=INTERNAL、退出码 1 报告。
"""

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import List, Optional

from .ablation import AXES
from .commands import cmd_ablation, cmd_eval, cmd_generate, cmd_infer, cmd_robustness, cmd_train
from .config import load_run_config
from .robustness import ALL_MODES, DEFAULT_DENSITIES, DEFAULT_MODES, DEFAULT_SWEEP_SEEDS
from ..utils.errors import GinotError

logger = logging.getLogger(__name__)

DEFAULT_RUN_ROOT = "./runs"


def run_root() -> Path:
    return Path(os.getenv("GINOT_RUN_ROOT", DEFAULT_RUN_ROOT))


def num_workers() -> int:
    raw = os.getenv("GINOT_NUM_WORKERS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        logger.warning(f"⚠️ GINOT_NUM_WORKERS={raw!r} 不是整数, 使用 1")
        return 1


def _global_flags(default) -> argparse.ArgumentParser:
    flags = argparse.ArgumentParser(add_help=False)
    flags.add_argument("--seed", type=int, default=default, help="全局种子 (覆盖配置文件)")
    flags.add_argument("--out", type=str, default=default, help="输出目录 / 容器路径")
    flags.add_argument("--config", type=str, default=default, help="扁平 JSON 配置文件")
    return flags


def build_parser() -> argparse.ArgumentParser:
    # 全局参数可以写在子命令前或后; 子命令层不设默认值, 避免覆盖前面给出的值
    common = _global_flags(argparse.SUPPRESS)

    parser = argparse.ArgumentParser(prog="ginot", description="几何感知神经算子: 数据生成 / 训练 / 评估",
                                     parents=[_global_flags(None)])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", parents=[common], help="生成星形区域 Poisson 数据集")
    p.add_argument("--n-samples", type=int, default=None)
    p.add_argument("--grid-n", type=int, default=None)
    p.add_argument("--lambda-min", type=float, default=None)
    p.add_argument("--lambda-max", type=float, default=None)

    p = sub.add_parser("train", parents=[common], help="训练模型")
    p.add_argument("--dataset", required=True)
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--resume", action="store_true", help="从运行目录的 last 检查点续训")

    p = sub.add_parser("eval", parents=[common], help="在数据划分上评估 L2 相对误差")
    p.add_argument("--dataset", required=True)
    p.add_argument("--checkpoint", default=None, help="运行目录或检查点路径")
    p.add_argument("--split", default="test", choices=["train", "test", "all"])
    p.add_argument("--oracle", action="store_true", help="使用存储的参考解作为预测 (测试钩子)")

    p = sub.add_parser("infer", parents=[common], help="在任意查询点上推理")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--boundary", required=True, help="边界点 CSV, 每行 x,y")
    p.add_argument("--queries", required=True, help="查询点 CSV, 每行 x,y")
    p.add_argument("--load", type=float, default=1.0, help="载荷 λ")

    p = sub.add_parser("robustness", parents=[common], help="点云打乱 / 填充 / 密度实验")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--modes", nargs="+", default=list(DEFAULT_MODES),
                   choices=list(ALL_MODES))
    p.add_argument("--densities", nargs="+", type=float, default=list(DEFAULT_DENSITIES))
    p.add_argument("--sweep-seeds", type=int, default=DEFAULT_SWEEP_SEEDS)
    p.add_argument("--split", default="test", choices=["train", "test", "all"])

    p = sub.add_parser("ablation", parents=[common], help="沿某一轴的消融训练")
    p.add_argument("--dataset", required=True)
    p.add_argument("--axis", required=True, choices=list(AXES))
    p.add_argument("--values", nargs="+", required=True)
    p.add_argument("--epochs", type=int, default=None)
    return parser


def dispatch(args: argparse.Namespace) -> None:
    overrides = {"seed": args.seed}
    if args.command == "generate":
        overrides.update(n_samples=args.n_samples, grid_n=args.grid_n,
                         lambda_min=args.lambda_min, lambda_max=args.lambda_max)
    elif args.command in ("train", "ablation"):
        overrides["epochs"] = args.epochs
    cfg = load_run_config(args.config, overrides)
    root = run_root()

    if args.command == "generate":
        cmd_generate(cfg, args.out or root / "dataset", num_workers=num_workers())
    elif args.command == "train":
        cmd_train(cfg, args.dataset, args.out or root / "train", resume=args.resume)
    elif args.command == "eval":
        cmd_eval(args.dataset, args.out or root / "eval", checkpoint=args.checkpoint,
                 split=args.split, oracle=args.oracle, batch_size=cfg.batch_size)
    elif args.command == "infer":
        cmd_infer(args.checkpoint, args.boundary, args.queries, args.out or root / "predictions.csv",
                  load=args.load)
    elif args.command == "robustness":
        cmd_robustness(args.checkpoint, args.dataset, args.out or root / "robustness", args.modes,
                       args.densities, seed=cfg.seed, sweep_seeds=args.sweep_seeds,
                       split=args.split, batch_size=cfg.batch_size)
    elif args.command == "ablation":
        cmd_ablation(cfg, args.dataset, args.out or root / "ablation", args.axis, args.values)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        dispatch(args)
    except GinotError as e:
        logger.error(f"❌ {args.command} 失败: {e.message}")
        print(e.one_line(), file=sys.stderr)
        return 2
    except Exception as e:
        logger.exception(f"❌ {args.command} 出现未预期的异常")
        text = " ".join(str(e).split())
        print(f"ERROR code=INTERNAL message={type(e).__name__}: {text}", file=sys.stderr)
        return 1
    return 0
