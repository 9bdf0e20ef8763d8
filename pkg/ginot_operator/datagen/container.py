# ginot_operator/datagen/container.py
"""
张量归档容器: `<stem>.json` (manifest) + `<stem>.bin` (payload)

- payload 中每个数组按 64 字节对齐, 小端 float64 ('<f8') 或 int64 ('<i8')
- manifest 记录每个数组的 name / dtype / shape / offset / nbytes 以及任意元数据
- 读取时校验 offset 不重叠、大小与形状一致、不越过 payload 末尾
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from ..utils.errors import ContainerError

logger = logging.getLogger(__name__)

FORMAT_NAME = "ginot-archive"
FORMAT_VERSION = 1
_ALIGNMENT = 64
_DTYPES = {"<f8": np.float64, "<i8": np.int64}


class ArrayEntry(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str
    dtype: str
    shape: List[int]
    offset: int = Field(ge=0)
    nbytes: int = Field(ge=0)


class Manifest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    format: str = FORMAT_NAME
    version: int = FORMAT_VERSION
    arrays: List[ArrayEntry] = Field(default_factory=list)
    meta: Dict[str, Any] = Field(default_factory=dict)


def container_paths(path: Union[str, Path]) -> Tuple[Path, Path]:
    """把 `x`, `x.json`, `x.bin` 统一解析为 (manifest, payload) 路径"""
    path = Path(path)
    if path.suffix in (".json", ".bin"):
        path = path.with_suffix("")
    return path.with_name(path.name + ".json"), path.with_name(path.name + ".bin")


def _encode_dtype(array: np.ndarray) -> str:
    if np.issubdtype(array.dtype, np.floating):
        return "<f8"
    if np.issubdtype(array.dtype, np.integer) or array.dtype == np.bool_:
        return "<i8"
    raise ContainerError(f"不支持的数组类型 {array.dtype}")


class ContainerWriter:
    """单写者; close() 时写出 manifest"""

    def __init__(self, path: Union[str, Path]):
        self.manifest_path, self.payload_path = container_paths(path)
        try:
            self.manifest_path.parent.mkdir(parents=True, exist_ok=True)
            self._file = open(self.payload_path, "wb")
        except OSError as e:
            raise ContainerError(f"无法写出容器 {self.payload_path}: {e}") from e
        self._entries: List[ArrayEntry] = []
        self._names = set()
        self._closed = False

    def __enter__(self) -> "ContainerWriter":
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc_type is None:
            self.close()
        else:
            self._file.close()
            self._closed = True

    def _write_pad(self) -> None:
        offset = self._file.tell()
        pad = (offset + _ALIGNMENT - 1) // _ALIGNMENT * _ALIGNMENT - offset
        if pad:
            self._file.write(b"\x00" * pad)

    def write(self, name: str, array: np.ndarray) -> None:
        if name in self._names:
            raise ContainerError(f"数组名重复: {name}")
        array = np.asarray(array)
        dtype = _encode_dtype(array)
        data = np.ascontiguousarray(array, dtype=dtype).tobytes()
        self._write_pad()
        offset = self._file.tell()
        self._file.write(data)
        self._entries.append(ArrayEntry(name=name, dtype=dtype, shape=list(array.shape),
                                        offset=offset, nbytes=len(data)))
        self._names.add(name)

    def close(self, meta: Optional[Dict[str, Any]] = None) -> None:
        if self._closed:
            return
        self._file.close()
        manifest = Manifest(arrays=self._entries, meta=meta or {})
        self.manifest_path.write_text(
            json.dumps(manifest.model_dump(), ensure_ascii=False, indent=2, sort_keys=True),
            encoding="utf-8")
        self._closed = True
        logger.debug(f"容器写出: {self.manifest_path.name}, {len(self._entries)} 个数组")


class ContainerReader:
    """读取并校验容器; 数组按名访问"""

    def __init__(self, path: Union[str, Path]):
        self.manifest_path, self.payload_path = container_paths(path)
        if not self.manifest_path.exists():
            raise ContainerError(f"manifest 不存在: {self.manifest_path}")
        if not self.payload_path.exists():
            raise ContainerError(f"payload 不存在: {self.payload_path}")
        try:
            raw = json.loads(self.manifest_path.read_text(encoding="utf-8"))
            self.manifest = Manifest.model_validate(raw)
        except (json.JSONDecodeError, ValidationError) as e:
            raise ContainerError(f"manifest 无法解析: {e}") from e
        if self.manifest.format != FORMAT_NAME or self.manifest.version != FORMAT_VERSION:
            raise ContainerError(f"不支持的容器格式 {self.manifest.format} v{self.manifest.version}")

        self._payload = self.payload_path.read_bytes()
        self._table: Dict[str, ArrayEntry] = {}
        self._validate()

    def _validate(self) -> None:
        size = len(self._payload)
        end_prev = 0
        for entry in sorted(self.manifest.arrays, key=lambda e: e.offset):
            if entry.dtype not in _DTYPES:
                raise ContainerError(f"数组 {entry.name} 的 dtype {entry.dtype} 不受支持")
            if any(d < 0 for d in entry.shape):
                raise ContainerError(f"数组 {entry.name}: 形状 {entry.shape} 含有负维度")
            expected = int(np.prod(entry.shape, dtype=np.int64)) * 8
            if expected != entry.nbytes:
                raise ContainerError(f"数组 {entry.name}: 形状 {entry.shape} 需要 {expected} 字节, manifest 记录 {entry.nbytes}")
            if entry.offset < end_prev:
                raise ContainerError(f"数组 {entry.name}: offset {entry.offset} 与前一个数组重叠")
            if entry.offset + entry.nbytes > size:
                raise ContainerError(
                    f"数组 {entry.name}: offset {entry.offset} + {entry.nbytes} 字节超出 payload 长度 {size}")
            if entry.name in self._table:
                raise ContainerError(f"数组名重复: {entry.name}")
            self._table[entry.name] = entry
            end_prev = entry.offset + entry.nbytes

    @property
    def meta(self) -> Dict[str, Any]:
        return self.manifest.meta

    def __len__(self) -> int:
        return len(self._table)

    def __contains__(self, name: str) -> bool:
        return name in self._table

    def __iter__(self) -> Iterator[str]:
        return iter(self._table)

    def __getitem__(self, name: str) -> np.ndarray:
        entry = self._table.get(name)
        if entry is None:
            raise ContainerError(f"容器中没有数组 {name}")
        if entry.nbytes == 0:
            return np.zeros(entry.shape, dtype=_DTYPES[entry.dtype])
        array = np.frombuffer(self._payload, dtype=entry.dtype, count=entry.nbytes // 8, offset=entry.offset)
        logger.debug(f"读取数组 {name}: shape={entry.shape}")
        return array.reshape(entry.shape).astype(_DTYPES[entry.dtype])
