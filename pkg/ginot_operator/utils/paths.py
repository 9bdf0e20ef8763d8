# ginot_operator/utils/paths.py
"""
输出路径守卫 - 保证所有产物都写在各自的运行目录里

功能:
1. 路径白名单验证 (防止 ../ 越界写文件)
2. 文件名清理 (由样本编号、模式名等生成的文件名)
"""

import re
import logging
from pathlib import Path
from typing import Union

from .errors import PathSecurityError

logger = logging.getLogger(__name__)


class SecureFileManager:
    """以某个根目录为白名单的文件路径管理器"""

    @classmethod
    def ensure_dir(cls, base_dir: Union[str, Path]) -> Path:
        """确保目录存在并返回其绝对路径

        Raises:
            PathSecurityError: 路径存在但不是目录, 或无法创建
        """
        base = Path(base_dir).resolve()
        if base.exists() and not base.is_dir():
            raise PathSecurityError(f"输出路径不是目录: {base}")
        try:
            base.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise PathSecurityError(f"无法创建输出目录 {base}: {e}") from e
        logger.debug(f"目录已确保存在: {base}")
        return base

    @classmethod
    def validate_path(cls, file_path: Union[str, Path], base_dir: Union[str, Path]) -> Path:
        """验证文件路径位于 base_dir 之内

        Args:
            file_path: 待验证路径 (相对路径基于 base_dir 解析)
            base_dir: 允许的根目录

        Returns:
            规范化后的绝对路径

        Raises:
            PathSecurityError: 路径越界或包含 '..'
        """
        allowed_base = cls.ensure_dir(base_dir)
        if ".." in Path(file_path).parts:
            raise PathSecurityError(f"路径 '{file_path}' 包含非法片段 '..'")

        candidate = Path(file_path)
        target = candidate.resolve() if candidate.is_absolute() else (allowed_base / candidate).resolve()
        try:
            target.relative_to(allowed_base)
        except ValueError:
            raise PathSecurityError(
                f"路径 '{file_path}' 不在允许目录内; 目标: {target}; 允许: {allowed_base}"
            )
        return target

    @classmethod
    def sanitize_filename(cls, filename: str, max_length: int = 120) -> str:
        """清理文件名中的危险字符

        Args:
            filename: 原始文件名
            max_length: 最大长度

        Returns:
            安全文件名
        """
        safe_name = re.sub(r'[^\w\-.]', '_', filename)
        safe_name = re.sub(r'\.{2,}', '.', safe_name)
        safe_name = safe_name.lstrip('.')

        if len(safe_name) > max_length:
            name, ext = safe_name.rsplit('.', 1) if '.' in safe_name else (safe_name, '')
            name = name[:max_length - len(ext) - 1]
            safe_name = f"{name}.{ext}" if ext else name

        if not safe_name:
            safe_name = "unnamed"

        if safe_name != filename:
            logger.debug(f"文件名清理: '{filename}' → '{safe_name}'")
        return safe_name

    @classmethod
    def get_safe_path(cls, filename: str, base_dir: Union[str, Path]) -> Path:
        """生成 base_dir 内的安全文件路径"""
        return cls.validate_path(cls.sanitize_filename(filename), base_dir)
