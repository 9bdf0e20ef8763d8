# ginot_operator/datagen/poisson.py
"""
星形区域上的 Poisson 问题 -∇²u = λ, u|∂Ω = 0

在 [-1, 1]² 的均匀网格上, 位于边界多边形内部的节点为未知量;
5 点差分格式, 区域外 (或边界上) 的邻点取 u = 0 (一阶边界处理);
稀疏矩阵用 scipy.sparse 组装, 共轭梯度求解到相对残差 1e-10。
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import cg

from .domain import StarDomain
from ..pointcloud import PointCloud
from ..utils.errors import ConfigError, DegenerateDomainError, SolverError

logger = logging.getLogger(__name__)

CG_RTOL = 1e-10


@dataclass
class PoissonSample:
    """一个样本: 边界点云 + 内部网格节点 + 解"""
    boundary: np.ndarray  # [n_b, 2]
    queries: np.ndarray  # [N_q, 2]
    solution: np.ndarray  # [N_q, 1]
    load: float
    radii: np.ndarray  # [n_b]
    seed: int = -1
    grid_n: int = 0

    @property
    def num_queries(self) -> int:
        return self.queries.shape[0]

    def boundary_cloud(self) -> PointCloud:
        return PointCloud.from_points(self.boundary)


def laplacian_system(inside: np.ndarray, h: float) -> sparse.csr_matrix:
    """内部节点上的 5 点 Laplace 矩阵 (已乘以 h²), 区域外邻点按 0 处理"""
    n = int(inside.sum())
    index = np.full(inside.shape, -1, dtype=np.int64)
    index[inside] = np.arange(n)
    rows_i, cols_j = np.nonzero(inside)
    own = np.arange(n)

    rows, cols, vals = [own], [own], [np.full(n, 4.0)]
    for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        neighbour = index[rows_i + di, cols_j + dj]
        keep = neighbour >= 0
        rows.append(own[keep])
        cols.append(neighbour[keep])
        vals.append(np.full(int(keep.sum()), -1.0))
    matrix = sparse.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n))
    return matrix


def solve_poisson(domain: StarDomain, grid_n: int, load: float = 1.0,
                  seed: Optional[int] = None) -> PoissonSample:
    """求解一个区域上的 Poisson 问题

    Args:
        domain: 星形区域
        grid_n: 每个方向的网格节点数 (≥ 16)
        load: 源项缩放 λ (f = λ)
        seed: 仅用于溯源, 写入样本

    Raises:
        ConfigError: grid_n < 16
        DegenerateDomainError: 区域内没有网格节点
        SolverError: 共轭梯度未收敛
    """
    if grid_n < 16:
        raise ConfigError(f"grid_n 必须 ≥ 16, 当前 {grid_n}", field="grid_n")

    h = 2.0 / (grid_n - 1)
    axis = np.linspace(-1.0, 1.0, grid_n)
    xx, yy = np.meshgrid(axis, axis, indexing="ij")
    nodes = np.stack([xx.ravel(), yy.ravel()], axis=1)
    inside = domain.contains(nodes).reshape(grid_n, grid_n)
    inside[0, :] = inside[-1, :] = inside[:, 0] = inside[:, -1] = False

    n = int(inside.sum())
    if n == 0:
        raise DegenerateDomainError(f"degenerate domain: 网格 {grid_n}×{grid_n} 上没有内部节点")

    matrix = laplacian_system(inside, h)
    rhs = np.full(n, load * h * h)
    u, info = cg(matrix, rhs, rtol=CG_RTOL, atol=0.0, maxiter=20 * n)
    if info != 0:
        raise SolverError(f"共轭梯度未收敛 (info={info}, 未知量 {n})")

    rhs_norm = np.linalg.norm(rhs)
    residual = np.linalg.norm(rhs - matrix @ u) / rhs_norm if rhs_norm > 0 else 0.0
    logger.debug(f"Poisson 求解完成: 未知量 {n}, 相对残差 {residual:.2e}")

    return PoissonSample(
        boundary=domain.boundary_points,
        queries=nodes[inside.ravel()],
        solution=u[:, None],
        load=float(load),
        radii=domain.radii.copy(),
        seed=-1 if seed is None else int(seed),
        grid_n=int(grid_n),
    )
