# ginot_operator/utils/run_store.py
"""
运行目录管理器 - 负责一次训练/评估运行的产物持久化

目录结构:
    <run_dir>/config.json        配置快照
    <run_dir>/run_manifest.json  数据划分、种子、数据集路径、最近 epoch
    <run_dir>/metrics.csv        每个 epoch 一行
    <run_dir>/best.{json,bin}    验证集最优检查点
    <run_dir>/last.{json,bin}    最近一次检查点
    <run_dir>/*.csv              评估 / 鲁棒性 / 消融结果表
"""

import json
import logging
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Optional, Union

import pandas as pd

from .errors import CheckpointError
from .paths import SecureFileManager

logger = logging.getLogger(__name__)


class RunStore:
    CONFIG_FILE = "config.json"
    MANIFEST_FILE = "run_manifest.json"
    METRICS_FILE = "metrics.csv"

    def __init__(self, run_dir: Union[str, Path]):
        self.run_dir = SecureFileManager.ensure_dir(run_dir)
        logger.debug(f"RunStore 初始化完成 | 运行目录: {self.run_dir}")

    def path(self, filename: str) -> Path:
        """运行目录内的安全路径"""
        return SecureFileManager.get_safe_path(filename, self.run_dir)

    # ------------------------------------------------------------------
    # JSON 文件
    # ------------------------------------------------------------------
    def _write_json(self, filename: str, data: Dict[str, Any]) -> Path:
        file_path = self.path(filename)
        with open(file_path, "w", encoding="utf-8") as f:
            json.dump(data, f, indent=2, ensure_ascii=False, sort_keys=True)
        return file_path

    def _read_json(self, filename: str) -> Optional[Dict[str, Any]]:
        file_path = self.path(filename)
        if not file_path.exists():
            return None
        with open(file_path, "r", encoding="utf-8") as f:
            return json.load(f)

    def save_config(self, config: Dict[str, Any]) -> Path:
        file_path = self._write_json(self.CONFIG_FILE, config)
        logger.info(f"✅ 配置快照已保存: {file_path}")
        return file_path

    def load_config(self) -> Optional[Dict[str, Any]]:
        return self._read_json(self.CONFIG_FILE)

    def default_manifest(self) -> Dict[str, Any]:
        return {"created_at": datetime.now().isoformat(), "last_epoch": -1}

    def load_manifest(self) -> Dict[str, Any]:
        return self._read_json(self.MANIFEST_FILE) or self.default_manifest()

    def update_manifest(self, **fields: Any) -> Dict[str, Any]:
        manifest = self.load_manifest()
        manifest.update(fields)
        self._write_json(self.MANIFEST_FILE, manifest)
        return manifest

    # ------------------------------------------------------------------
    # 表格
    # ------------------------------------------------------------------
    def append_metrics(self, row: Dict[str, Any]) -> None:
        file_path = self.path(self.METRICS_FILE)
        frame = pd.DataFrame([row])
        frame.to_csv(file_path, mode="a", header=not file_path.exists(), index=False)

    def load_metrics(self) -> pd.DataFrame:
        file_path = self.path(self.METRICS_FILE)
        if not file_path.exists():
            return pd.DataFrame(columns=["epoch", "train_mse", "val_mse", "val_l2", "lr"])
        return pd.read_csv(file_path)

    def truncate_metrics(self, last_epoch: int) -> None:
        """续训时丢弃检查点之后的指标行"""
        metrics = self.load_metrics()
        if metrics.empty:
            return
        kept = metrics[metrics["epoch"] <= last_epoch]
        if len(kept) != len(metrics):
            logger.info(f"🔄 丢弃 epoch > {last_epoch} 的 {len(metrics) - len(kept)} 行指标")
        kept.to_csv(self.path(self.METRICS_FILE), index=False)

    def write_table(self, filename: str, frame: pd.DataFrame) -> Path:
        file_path = self.path(filename)
        frame.to_csv(file_path, index=False)
        logger.info(f"✅ 结果表已写出: {file_path} ({len(frame)} 行)")
        return file_path

    # ------------------------------------------------------------------
    # 检查点
    # ------------------------------------------------------------------
    def checkpoint_stem(self, name: str) -> Path:
        return self.path(name)

    def has_checkpoint(self, name: str) -> bool:
        stem = self.checkpoint_stem(name)
        return stem.with_name(stem.name + ".json").exists()

    def require_checkpoint(self, name: str) -> Path:
        if not self.has_checkpoint(name):
            raise CheckpointError(f"运行目录 {self.run_dir} 中没有检查点 {name}")
        return self.checkpoint_stem(name)
