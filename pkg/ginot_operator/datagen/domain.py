# ginot_operator/datagen/domain.py
"""
星形二维区域

边界半径 r(θ) = clip(μ + Σ_k a_k·cos(kθ) + b_k·sin(kθ), r_min, r_max),
系数 a_k, b_k ~ N(0, (amplitude / k^smoothness)²), θ_i = 2πi / n_b。
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..pointcloud import PointCloud
from ..utils.errors import ConfigError

logger = logging.getLogger(__name__)

R_MIN = 0.2
R_MAX = 0.8
MEAN_RADIUS = 0.5


@dataclass
class StarDomain:
    radii: np.ndarray  # [n_b]
    angles: np.ndarray  # [n_b]
    seed: Optional[int] = None

    @property
    def num_boundary(self) -> int:
        return self.radii.shape[0]

    @property
    def boundary_points(self) -> np.ndarray:
        return np.stack([self.radii * np.cos(self.angles), self.radii * np.sin(self.angles)], axis=1)

    def as_point_cloud(self) -> PointCloud:
        return PointCloud.from_points(self.boundary_points)

    def contains(self, points: np.ndarray) -> np.ndarray:
        """射线法判断点是否位于边界多边形内部 (偶数-奇数规则)"""
        points = np.asarray(points, dtype=np.float64)
        px, py = points[:, 0], points[:, 1]
        verts = self.boundary_points
        inside = np.zeros(points.shape[0], dtype=bool)
        x0, y0 = verts[:, 0], verts[:, 1]
        x1, y1 = np.roll(x0, -1), np.roll(y0, -1)
        for i in range(verts.shape[0]):
            crosses = (y0[i] > py) != (y1[i] > py)
            if not crosses.any():
                continue
            x_at = x0[i] + (py[crosses] - y0[i]) * (x1[i] - x0[i]) / (y1[i] - y0[i])
            hit = np.zeros_like(inside)
            hit[crosses] = px[crosses] < x_at
            inside ^= hit
        return inside


def boundary_angles(n_b: int) -> np.ndarray:
    return 2.0 * np.pi * np.arange(n_b) / n_b


def sample_domain(seed: int, n_b: int = 144, n_modes: int = 6, smoothness: float = 1.0,
                  amplitude: float = 0.12) -> StarDomain:
    """按种子生成星形区域; amplitude=0 时退化为半径 0.5 的圆

    Raises:
        ConfigError: n_b < 8 或 n_modes < 0
    """
    if n_b < 8:
        raise ConfigError(f"n_b 必须 ≥ 8, 当前 {n_b}", field="n_b")
    if n_modes < 0:
        raise ConfigError(f"n_modes 不能为负, 当前 {n_modes}", field="n_modes")

    rng = np.random.default_rng(seed)
    theta = boundary_angles(n_b)
    k = np.arange(1, n_modes + 1)
    scale = amplitude / k ** smoothness
    a = rng.normal(size=n_modes) * scale
    b = rng.normal(size=n_modes) * scale
    raw = MEAN_RADIUS + np.cos(np.outer(theta, k)) @ a + np.sin(np.outer(theta, k)) @ b
    clipped = int(((raw < R_MIN) | (raw > R_MAX)).sum())
    if clipped:
        logger.debug(f"seed={seed}: {clipped}/{n_b} 个半径被截断到 [{R_MIN}, {R_MAX}]")
    return StarDomain(radii=np.clip(raw, R_MIN, R_MAX), angles=theta, seed=seed)


def circle_domain(radius: float = MEAN_RADIUS, n_b: int = 144) -> StarDomain:
    return StarDomain(radii=np.full(n_b, float(radius)), angles=boundary_angles(n_b))
