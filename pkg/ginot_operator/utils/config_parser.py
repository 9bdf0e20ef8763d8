# ginot_operator/utils/config_parser.py
"""
鲁棒的配置文本解析工具 - 处理手写配置文件的各种格式问题

功能:
1. 移除Markdown代码块 (从文档中直接复制的配置)
2. 清理注释 (// 和 /* */)
3. 提取第一个JSON对象
4. 修复末尾逗号
5. 清理非法控制字符
"""

import re
import json
import logging
from pathlib import Path
from typing import Any, Dict, Union

from .errors import ConfigError

logger = logging.getLogger(__name__)


class RobustConfigParser:
    """鲁棒的配置解析器, 输出扁平的 key -> value 字典"""

    @staticmethod
    def clean_markdown(text: str) -> str:
        """移除Markdown代码块标记"""
        text = re.sub(r'```(?:json|jsonc)?\s*', '', text, flags=re.IGNORECASE)
        return text.strip()

    @staticmethod
    def remove_comments(text: str) -> str:
        """移除注释 (// 和 /* */)

        Args:
            text: 配置文本

        Returns:
            移除注释后的文本
        """
        # 单行注释; 排除 "http://" 这类出现在字符串里的写法
        text = re.sub(r'(?<![:"\'\w])//.*?$', '', text, flags=re.MULTILINE)
        text = re.sub(r'/\*.*?\*/', '', text, flags=re.DOTALL)
        return text

    @staticmethod
    def extract_object(text: str) -> str:
        """提取第一个 {...} 对象

        Raises:
            ConfigError: 文本中没有对象
        """
        match = re.search(r'\{.*\}', text, re.DOTALL)
        if not match:
            raise ConfigError(f"配置文本中未找到 JSON 对象: {text[:80]!r}")
        return match.group(0)

    @staticmethod
    def fix_common_errors(text: str) -> str:
        """修复末尾逗号 (trailing comma)"""
        return re.sub(r',\s*([}\]])', r'\1', text)

    @staticmethod
    def remove_control_characters(text: str) -> str:
        """移除除换行/制表符以外的 ASCII 控制字符"""
        return re.sub(r'[\x00-\x08\x0B\x0C\x0E-\x1F\x7F]', '', text)

    @classmethod
    def parse(cls, text: str) -> Dict[str, Any]:
        """解析配置文本

        Args:
            text: 可能带注释/Markdown的配置文本

        Returns:
            扁平字典

        Raises:
            ConfigError: 文本为空、不是对象或存在嵌套结构
        """
        if not text or not text.strip():
            raise ConfigError("配置文本为空")

        text = cls.clean_markdown(text)
        text = cls.remove_comments(text)
        body = cls.extract_object(text)
        body = cls.remove_control_characters(body)
        body = cls.fix_common_errors(body)

        try:
            result = json.loads(body)
        except json.JSONDecodeError as e:
            logger.error(f"❌ 配置解析失败: {e}")
            raise ConfigError(f"配置解析失败 (行 {e.lineno}, 列 {e.colno}): {e.msg}") from e

        nested = [k for k, v in result.items() if isinstance(v, dict)]
        if nested:
            raise ConfigError(f"配置必须是扁平键集合, 嵌套字段: {nested[0]}", field=nested[0])

        logger.debug(f"配置解析成功, 共 {len(result)} 个字段")
        return result

    @classmethod
    def load(cls, path: Union[str, Path]) -> Dict[str, Any]:
        """从文件读取并解析配置"""
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"配置文件不存在: {path}", field="config")
        return cls.parse(path.read_text(encoding="utf-8"))
