# ginot_operator/datagen/test_datagen.py
"""区域采样、Poisson 求解与容器读写测试"""

import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ginot_operator.datagen import (
    ContainerReader,
    ContainerWriter,
    DataGenConfig,
    NormStats,
    PoissonDataset,
    circle_domain,
    container_paths,
    generate_dataset,
    read_dataset,
    sample_domain,
    solve_poisson,
    split_indices,
    write_dataset,
)
from ginot_operator.utils.errors import ConfigError, ContainerError, DegenerateDomainError

DISK_MAX = 0.0625


# ---------------------------------------------------------------------------
# 区域
# ---------------------------------------------------------------------------

def test_zero_coefficients_give_circle():
    domain = sample_domain(5, amplitude=0.0)
    radius = np.linalg.norm(domain.boundary_points, axis=1)
    np.testing.assert_allclose(radius, 0.5, atol=1e-12)


@pytest.mark.parametrize("seed", range(10))
def test_radii_are_clamped(seed):
    domain = sample_domain(seed, amplitude=0.5)
    assert domain.radii.min() >= 0.2 and domain.radii.max() <= 0.8
    assert domain.num_boundary == 144


def test_different_seeds_differ():
    a, b = sample_domain(1), sample_domain(2)
    assert np.abs(a.radii - b.radii).max() > 0


def test_too_few_boundary_points():
    with pytest.raises(ConfigError) as info:
        sample_domain(0, n_b=4)
    assert info.value.field == "n_b"


def test_contains_matches_radius_test_for_circle():
    domain = circle_domain(0.5, n_b=720)
    pts = np.random.default_rng(0).uniform(-1, 1, size=(2000, 2))
    rho = np.linalg.norm(pts, axis=1)
    clear = np.abs(rho - 0.5) > 1e-3
    np.testing.assert_array_equal(domain.contains(pts)[clear], (rho < 0.5)[clear])


# ---------------------------------------------------------------------------
# Poisson
# ---------------------------------------------------------------------------

def _disk_error(grid_n):
    sample = solve_poisson(circle_domain(0.5), grid_n)
    return abs(sample.solution.max() - DISK_MAX)


def test_disk_maximum_close_to_analytic():
    assert _disk_error(64) <= 0.1 * DISK_MAX


def test_disk_error_shrinks_with_refinement():
    assert _disk_error(128) / _disk_error(64) < 0.7


@pytest.mark.parametrize("seed", range(3))
def test_solution_is_linear_in_load(seed):
    domain = sample_domain(seed)
    u1 = solve_poisson(domain, 40, load=1.0).solution
    u2 = solve_poisson(domain, 40, load=2.0).solution
    assert np.linalg.norm(u2 - 2.0 * u1) <= 1e-9 * np.linalg.norm(u2)


@pytest.mark.parametrize("seed", range(5))
def test_solution_is_positive_and_queries_inside(seed):
    domain = sample_domain(seed)
    sample = solve_poisson(domain, 40)
    assert np.all(sample.solution > 0)
    assert np.all(domain.contains(sample.queries))
    assert sample.queries.shape[0] == sample.solution.shape[0]


def test_query_counts_vary_across_domains():
    counts = {solve_poisson(sample_domain(seed), 48).num_queries for seed in range(100)}
    assert len(counts) > 1


def test_same_seed_same_sample():
    a = solve_poisson(sample_domain(7), 32, seed=7)
    b = solve_poisson(sample_domain(7), 32, seed=7)
    assert a.solution.tobytes() == b.solution.tobytes()
    assert a.queries.tobytes() == b.queries.tobytes()


def test_tiny_domain_is_degenerate():
    with pytest.raises(DegenerateDomainError, match="degenerate domain"):
        solve_poisson(circle_domain(0.01), 16)


def test_grid_too_coarse():
    with pytest.raises(ConfigError):
        solve_poisson(circle_domain(), 8)


# ---------------------------------------------------------------------------
# 容器
# ---------------------------------------------------------------------------

def _small_dataset(n, tmp_seed=0):
    cfg = DataGenConfig(n_samples=n, grid_n=20, seed=tmp_seed, lambda_min=0.5, lambda_max=2.0)
    return generate_dataset(cfg)


def test_empty_dataset_round_trip(tmp_path):
    dataset = _small_dataset(0)
    write_dataset(dataset, tmp_path / "empty")
    back = read_dataset(tmp_path / "empty")
    assert len(back) == 0
    assert back.norm_stats is None


def test_three_sample_round_trip_is_bitwise(tmp_path):
    dataset = _small_dataset(3)
    write_dataset(dataset, tmp_path / "three")
    back = read_dataset(tmp_path / "three.json")
    assert len(back) == 3
    for a, b in zip(dataset.samples, back.samples):
        for name in ("boundary", "queries", "solution", "radii"):
            assert getattr(a, name).tobytes() == getattr(b, name).tobytes()
        assert a.load == b.load and a.seed == b.seed and a.grid_n == b.grid_n
    np.testing.assert_array_equal(back.train_indices, dataset.train_indices)
    np.testing.assert_array_equal(back.norm_stats.output_std, dataset.norm_stats.output_std)


def test_truncated_payload_reports_offset(tmp_path):
    write_dataset(_small_dataset(2), tmp_path / "cut")
    _, payload = container_paths(tmp_path / "cut")
    data = payload.read_bytes()
    payload.write_bytes(data[: len(data) // 2])
    with pytest.raises(ContainerError, match="offset"):
        read_dataset(tmp_path / "cut")


def test_overlapping_offsets_rejected(tmp_path):
    with ContainerWriter(tmp_path / "arr") as writer:
        writer.write("a", np.arange(4.0))
        writer.write("b", np.arange(4.0))
    manifest, _ = container_paths(tmp_path / "arr")
    raw = json.loads(manifest.read_text())
    raw["arrays"][1]["offset"] = raw["arrays"][0]["offset"] + 8
    manifest.write_text(json.dumps(raw))
    with pytest.raises(ContainerError, match="offset"):
        ContainerReader(tmp_path / "arr")


def test_shape_size_mismatch_rejected(tmp_path):
    with ContainerWriter(tmp_path / "arr") as writer:
        writer.write("a", np.arange(6.0).reshape(2, 3))
    manifest, _ = container_paths(tmp_path / "arr")
    raw = json.loads(manifest.read_text())
    raw["arrays"][0]["shape"] = [4, 3]
    manifest.write_text(json.dumps(raw))
    with pytest.raises(ContainerError):
        ContainerReader(tmp_path / "arr")


def test_negative_shape_with_matching_size_rejected(tmp_path):
    with ContainerWriter(tmp_path / "arr") as writer:
        writer.write("a", np.arange(6.0).reshape(2, 3))
    manifest, _ = container_paths(tmp_path / "arr")
    raw = json.loads(manifest.read_text())
    raw["arrays"][0]["shape"] = [-2, -3]
    manifest.write_text(json.dumps(raw))
    with pytest.raises(ContainerError, match="负维度"):
        ContainerReader(tmp_path / "arr")


@pytest.mark.parametrize("norm_stats", [
    {"input_mean": [0.0, 0.0]},
    {"input_mean": [0.0, 0.0], "input_std": "wide", "output_mean": [0.0], "output_std": [1.0]},
    {"input_mean": [0.0, 0.0], "input_std": [1.0, 0.0], "output_mean": [0.0], "output_std": [1.0]},
    {"input_mean": [0.0, 0.0], "input_std": [1.0], "output_mean": [0.0], "output_std": [1.0]},
])
def test_malformed_norm_stats_rejected(tmp_path, norm_stats):
    write_dataset(_small_dataset(2), tmp_path / "ds")
    manifest, _ = container_paths(tmp_path / "ds")
    raw = json.loads(manifest.read_text())
    raw["meta"]["norm_stats"] = norm_stats
    manifest.write_text(json.dumps(raw))
    with pytest.raises(ContainerError, match="归一化统计"):
        read_dataset(tmp_path / "ds")


def test_garbage_manifest_rejected(tmp_path):
    manifest, payload = container_paths(tmp_path / "bad")
    manifest.write_text("{not json")
    payload.write_bytes(b"")
    with pytest.raises(ContainerError):
        ContainerReader(tmp_path / "bad")


def test_integer_arrays_round_trip(tmp_path):
    with ContainerWriter(tmp_path / "ints") as writer:
        writer.write("idx", np.array([[1, -2], [3, 2 ** 40]]))
    back = ContainerReader(tmp_path / "ints")["idx"]
    assert back.dtype == np.int64
    np.testing.assert_array_equal(back, [[1, -2], [3, 2 ** 40]])


# ---------------------------------------------------------------------------
# 数据集
# ---------------------------------------------------------------------------

def test_split_is_seeded_and_disjoint():
    a_train, a_test = split_indices(50, seed=3)
    b_train, b_test = split_indices(50, seed=3)
    np.testing.assert_array_equal(a_train, b_train)
    assert len(a_train) == 40 and len(a_test) == 10
    assert not set(a_train) & set(a_test)


def test_norm_stats_use_training_split_only():
    dataset = _small_dataset(5)
    train = dataset.split("train")
    expected = np.concatenate([s.solution for s in train]).mean(axis=0)
    np.testing.assert_allclose(dataset.norm_stats.output_mean, expected, rtol=1e-12)


def test_loads_within_range():
    dataset = _small_dataset(6)
    loads = np.array([s.load for s in dataset.samples])
    assert np.all((loads >= 0.5) & (loads <= 2.0))


def test_parallel_generation_matches_serial():
    serial = generate_dataset(DataGenConfig(n_samples=4, grid_n=20, seed=9))
    parallel = generate_dataset(DataGenConfig(n_samples=4, grid_n=20, seed=9, num_workers=2))
    for a, b in zip(serial.samples, parallel.samples):
        assert a.solution.tobytes() == b.solution.tobytes()


def test_unknown_split_name():
    with pytest.raises(ContainerError):
        PoissonDataset(samples=[], train_indices=np.zeros(0), test_indices=np.zeros(0)).split("val")


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=2, max_size=40))
def test_normalization_round_trip(values):
    y = np.array(values)[:, None]
    stats = NormStats.fit([np.zeros((1, 2))], [y], [1.0])
    np.testing.assert_allclose(stats.denormalize_output(stats.normalize_output(y)), y, atol=1e-12 * max(1.0, np.abs(y).max()))
    assert np.all(stats.output_std > 0)


def test_constant_load_keeps_unit_scale():
    stats = NormStats.fit([np.zeros((1, 2))], [np.arange(3.0)[:, None]], [1.0, 1.0, 1.0])
    assert stats.load_std == 1.0
    assert abs(float(stats.normalize_load(2.0))) == pytest.approx(1.0)


def test_varying_load_uses_spread():
    stats = NormStats.fit([np.zeros((1, 2))], [np.arange(3.0)[:, None]], [0.5, 1.5])
    assert stats.load_std == pytest.approx(0.5)
