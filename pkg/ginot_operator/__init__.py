"""
ginot_operator - 几何感知的神经算子 Transformer (桌面规模实现)

子包:
- numerics: 反向模式自动微分与网络层
- pointcloud: 最远点采样与球查询分组
- model: 几何编码器 / 解场解码器 / 载荷融合
- datagen: 星形区域 Poisson 数据集工厂
- training: 训练循环与评估
- cli: 命令行入口
"""

__version__ = "0.1.0"
