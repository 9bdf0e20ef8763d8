# ginot_operator/model/encoding.py
"""
频率 (Nerf 式) 位置编码

每个标量坐标 p 依次输出:
    [p (可选), sin(b^0·π·p), cos(b^0·π·p), ..., sin(b^(L-1)·π·p), cos(b^(L-1)·π·p)]
各坐标的输出块按坐标顺序拼接 (坐标优先)。
"""

import numpy as np

from .config import FrequencyEncodingConfig


def frequency_encode(x: np.ndarray, cfg: FrequencyEncodingConfig) -> np.ndarray:
    """[..., d] -> [..., d·(include_input + 2L)]"""
    x = np.asarray(x, dtype=np.float64)
    freqs = cfg.base ** np.arange(cfg.num_frequencies) * np.pi
    angles = x[..., None] * freqs
    parts = []
    if cfg.include_input:
        parts.append(x[..., None])
    # [..., d, L, 2] -> [..., d, 2L]: sin/cos 交替
    trig = np.stack([np.sin(angles), np.cos(angles)], axis=-1).reshape(*angles.shape[:-1], -1)
    parts.append(trig)
    per_coord = np.concatenate(parts, axis=-1)
    return per_coord.reshape(*x.shape[:-1], -1)
