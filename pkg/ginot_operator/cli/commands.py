# ginot_operator/cli/commands.py
"""
子命令实现 - 每个函数对应一个子命令, 参数已解析完毕

所有产物都写在 --out 指定的目录 (或容器路径) 下; 结果表统一用 CSV。
"""

import json
import logging
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
import pandas as pd

from .ablation import run_ablation
from .config import RunConfig
from .robustness import DEFAULT_DENSITIES, DEFAULT_SWEEP_SEEDS, run_robustness
from ..datagen import PoissonDataset, compute_norm_stats, generate_dataset, read_dataset, split_indices, write_dataset
from ..training import (
    Checkpoint,
    EvaluationReport,
    ModelPredictor,
    OraclePredictor,
    TrainResult,
    evaluate_predictor,
    load_checkpoint,
    train,
)
from ..utils.errors import CheckpointError, ConfigError
from ..utils.paths import SecureFileManager
from ..utils.run_store import RunStore

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def resolve_checkpoint(path: PathLike) -> Checkpoint:
    """运行目录取其 best 检查点, 否则按检查点路径读取

    Raises:
        CheckpointError: 检查点不存在或损坏
    """
    path = Path(path)
    if path.is_dir():
        return load_checkpoint(RunStore(path).require_checkpoint("best"))
    return load_checkpoint(path)


def apply_split(dataset: PoissonDataset, cfg: RunConfig) -> PoissonDataset:
    """配置的训练比例与数据集不同时按配置重新划分, 并在新训练集上重算归一化"""
    stored = dataset.generator.get("training_dataset")
    if stored is not None and abs(float(stored) - cfg.training_dataset) < 1e-12:
        return dataset
    train_idx, test_idx = split_indices(len(dataset), cfg.seed, cfg.training_dataset)
    logger.warning(f"⚠️ 按配置重新划分数据集: 训练 {len(train_idx)} / 测试 {len(test_idx)}")
    return PoissonDataset(
        samples=dataset.samples,
        train_indices=train_idx,
        test_indices=test_idx,
        norm_stats=compute_norm_stats([dataset.samples[i] for i in train_idx]),
        generator={**dataset.generator, "training_dataset": cfg.training_dataset},
    )


def _split_samples(dataset: PoissonDataset, split: str, ckpt: Optional[Checkpoint] = None):
    """按名称取出划分; 检查点记录了训练时的划分则以它为准

    Raises:
        ConfigError: 划分名未知, 或记录的编号超出数据集
    """
    if split not in ("train", "test", "all"):
        raise ConfigError(f"未知的数据划分: {split}", field="split")
    recorded = (ckpt.meta.get("split") if ckpt is not None else None) or {}
    if split == "all":
        indices = np.arange(len(dataset))
    elif split in recorded:
        indices = recorded[split]
        if len(indices) and max(int(i) for i in indices) >= len(dataset):
            raise ConfigError(f"检查点记录的 {split} 划分超出数据集 ({len(dataset)} 个样本), "
                              f"数据集与训练时不一致", field="dataset")
        if sorted(int(i) for i in indices) != sorted(int(i) for i in getattr(dataset, f"{split}_indices")):
            logger.info(f"🔄 使用检查点记录的 {split} 划分 ({len(indices)} 个样本)")
    else:
        indices = getattr(dataset, f"{split}_indices")
    indices = [int(i) for i in indices]
    return [dataset.samples[i] for i in indices], indices


# ---------------------------------------------------------------------------
# generate
# ---------------------------------------------------------------------------

def cmd_generate(cfg: RunConfig, out: PathLike, num_workers: int = 1) -> PoissonDataset:
    """生成数据集容器并打印摘要"""
    dataset = generate_dataset(cfg.to_datagen_config(num_workers=num_workers))
    manifest = write_dataset(dataset, out)
    if len(dataset):
        lo, hi = dataset.query_count_range()
        print(f"samples={len(dataset)} min_queries={lo} max_queries={hi} path={manifest}")
    else:
        print(f"samples=0 path={manifest}")
    return dataset


# ---------------------------------------------------------------------------
# train
# ---------------------------------------------------------------------------

def cmd_train(cfg: RunConfig, dataset_path: PathLike, run_dir: PathLike, resume: bool = False) -> TrainResult:
    """训练并把配置快照、指标、检查点写入运行目录"""
    dataset = apply_split(read_dataset(dataset_path), cfg)
    store = RunStore(run_dir)
    if resume:
        snapshot = store.load_config()
        if snapshot is not None and snapshot.get("seed") != cfg.seed:
            raise ConfigError(f"续训种子 {cfg.seed} 与运行目录记录的 {snapshot.get('seed')} 不一致", field="seed")
    else:
        store.save_config(cfg.model_dump(mode="json"))
    store.update_manifest(dataset=str(Path(dataset_path).resolve()))
    result = train(cfg.to_model_config(), cfg.to_train_config(), dataset, store, resume=resume)
    print(f"epochs={len(result.history)} best_epoch={result.best_epoch} "
          f"best_val_mse={result.best_val_mse:.6e} run_dir={store.run_dir}")
    return result


# ---------------------------------------------------------------------------
# eval
# ---------------------------------------------------------------------------

def cmd_eval(dataset_path: PathLike, out_dir: PathLike, checkpoint: Optional[PathLike] = None,
             split: str = "test", oracle: bool = False, batch_size: int = 32) -> EvaluationReport:
    """逐样本 L2 写入 eval_<split>.csv, 汇总写入 eval_<split>_summary.json

    oracle=True 时直接返回存储的参考解 (测试钩子), 不需要检查点。
    """
    ckpt = None
    if oracle:
        predictor = OraclePredictor()
    else:
        if checkpoint is None:
            raise CheckpointError("eval 需要 --checkpoint (或 --oracle)")
        ckpt = resolve_checkpoint(checkpoint)
        predictor = ModelPredictor(ckpt.model, ckpt.norm_stats, batch_size)

    samples, indices = _split_samples(read_dataset(dataset_path), split, ckpt)
    report = evaluate_predictor(predictor, samples, indices)

    store = RunStore(out_dir)
    store.write_table(f"eval_{split}.csv", report.per_sample)
    summary_path = store.path(f"eval_{split}_summary.json")
    summary_path.write_text(json.dumps(report.summary, indent=2, sort_keys=True), encoding="utf-8")
    s = report.summary
    print(f"n={s['n']} mean_l2={s['mean_l2']:.6f} std_l2={s['std_l2']:.6f} "
          f"median_l2={s['median_l2']:.6f} worst_l2={s['worst_l2']:.6f} worst_sample={s['worst_sample']}")
    return report


# ---------------------------------------------------------------------------
# infer
# ---------------------------------------------------------------------------

def read_points_csv(path: PathLike, dim: int = 2) -> np.ndarray:
    """读取每行一个点的 CSV; 允许一行表头, 允许 # 注释

    Raises:
        ConfigError: 文件缺失、列数不对或存在非数值
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"点文件不存在: {path}", field="points")
    frame = pd.read_csv(path, header=None, comment="#", skipinitialspace=True)
    numeric = frame.apply(pd.to_numeric, errors="coerce")
    if len(numeric) and numeric.iloc[0].isna().all():
        numeric = numeric.iloc[1:]
    if numeric.shape[1] != dim:
        raise ConfigError(f"{path.name} 每行应有 {dim} 列, 实际 {numeric.shape[1]}", field="points")
    if numeric.isna().to_numpy().any():
        raise ConfigError(f"{path.name} 含有非数值项", field="points")
    if numeric.empty:
        raise ConfigError(f"{path.name} 中没有点", field="points")
    return numeric.to_numpy(dtype=np.float64)


def cmd_infer(checkpoint: PathLike, boundary_csv: PathLike, query_csv: PathLike, out_csv: PathLike,
              load: float = 1.0) -> pd.DataFrame:
    """对单个几何在任意查询点上推理, 写出 x,y,u 列"""
    ckpt = resolve_checkpoint(checkpoint)
    dim = ckpt.model.config.coord_dim
    boundary = read_points_csv(boundary_csv, dim)
    queries = read_points_csv(query_csv, dim)
    values = ModelPredictor(ckpt.model, ckpt.norm_stats).predict_points(boundary, queries, load)

    coord_names = ["x", "y", "z"][:dim] if dim <= 3 else [f"x{i}" for i in range(dim)]
    value_names = ["u"] if values.shape[1] == 1 else [f"u{i}" for i in range(values.shape[1])]
    frame = pd.DataFrame(np.hstack([queries, values]), columns=coord_names + value_names)

    out_csv = Path(out_csv)
    target = SecureFileManager.get_safe_path(out_csv.name, out_csv.parent)
    frame.to_csv(target, index=False)
    logger.info(f"✅ 推理完成: {len(frame)} 个查询点 → {target}")
    print(f"queries={len(frame)} path={target}")
    return frame


# ---------------------------------------------------------------------------
# robustness / ablation
# ---------------------------------------------------------------------------

def cmd_robustness(checkpoint: PathLike, dataset_path: PathLike, out_dir: PathLike,
                   modes: Sequence[str], densities: Sequence[float] = DEFAULT_DENSITIES,
                   seed: int = 0, sweep_seeds: int = DEFAULT_SWEEP_SEEDS,
                   split: str = "test", batch_size: int = 32) -> pd.DataFrame:
    """每个模式一行, 写出 robustness.csv"""
    ckpt = resolve_checkpoint(checkpoint)
    samples, indices = _split_samples(read_dataset(dataset_path), split, ckpt)
    predictor = ModelPredictor(ckpt.model, ckpt.norm_stats, batch_size)
    table = run_robustness(predictor, samples, indices, modes, densities, seed, sweep_seeds,
                           sweep_predictor=predictor)
    RunStore(out_dir).write_table("robustness.csv", table)
    print(table.to_string(index=False))
    return table


def cmd_ablation(cfg: RunConfig, dataset_path: PathLike, out_dir: PathLike, axis: str,
                 values: Sequence[str]) -> pd.DataFrame:
    dataset = apply_split(read_dataset(dataset_path), cfg)
    table = run_ablation(cfg, dataset, axis, values, out_dir)
    print(table.to_string(index=False))
    return table
