"""pytest 公共配置: --runslow 开关与小型数据集夹具"""

import pytest

from ginot_operator.datagen import DataGenConfig, generate_dataset
from ginot_operator.model import ModelConfig


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="运行耗时的实验性测试")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: 耗时的端到端实验, 需要 --runslow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="需要 --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(scope="session")
def tiny_dataset():
    """10 个样本、20×20 网格、λ ∈ [0.5, 2.0]"""
    return generate_dataset(DataGenConfig(n_samples=10, grid_n=20, seed=1, lambda_min=0.5, lambda_max=2.0))


@pytest.fixture
def tiny_model_config():
    return ModelConfig(
        embedding_dim=8, num_frequencies=3, n_s=8, n_p=4,
        attention_heads_encoder=2, att_heads_decoder=2,
        cross_att_layers_encoder=1, self_att_layers_encoder=1, cross_att_layers_decoder=1,
    )
