# ginot_operator/cli/test_cli.py
"""运行配置、子命令、鲁棒性与消融测试"""

import hashlib
import json
import logging

import numpy as np
import pandas as pd
import pytest

from ginot_operator.cli import (
    RunConfig,
    build_parser,
    cmd_train,
    load_run_config,
    main,
    read_points_csv,
    resolve_checkpoint,
    run_robustness,
)
from ginot_operator.cli.ablation import axis_updates, run_ablation
from ginot_operator.cli.robustness import check_densities, density_cloud, mode_clouds
from ginot_operator.datagen import PoissonDataset, write_dataset
from ginot_operator.training import ModelPredictor, OraclePredictor
from ginot_operator.utils.errors import CheckpointError, ConfigError

TINY = {
    "embedding_dim": 8, "num_frequencies": 3, "n_s": 8, "n_p": 4,
    "attention_heads_encoder": 2, "att_heads_decoder": 2,
    "cross_att_layers_encoder": 1, "self_att_layers_encoder": 1, "cross_att_layers_decoder": 1,
    "batch_size": 4, "epochs": 1,
}


def digest(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


@pytest.fixture(scope="module")
def dataset_path(tiny_dataset, tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "poisson"
    write_dataset(tiny_dataset, path)
    return path


@pytest.fixture(scope="module")
def trained_run(dataset_path, tmp_path_factory):
    run_dir = tmp_path_factory.mktemp("run")
    cmd_train(RunConfig(**TINY), dataset_path, run_dir)
    return run_dir


@pytest.fixture
def config_file(tmp_path):
    def write(**updates):
        path = tmp_path / "config.json"
        path.write_text(json.dumps({**TINY, **updates}), encoding="utf-8")
        return str(path)
    return write


# ---------------------------------------------------------------------------
# RunConfig
# ---------------------------------------------------------------------------

def test_run_config_defaults_match_published_column():
    cfg = RunConfig()
    assert (cfg.batch_size, cfg.initial_learning_rate, cfg.scheduler_patience, cfg.scheduler_factor) == (32, 1e-3, 40, 0.7)
    assert (cfg.epochs, cfg.training_dataset, cfg.testing_dataset) == (500, 0.8, 0.2)
    assert (cfg.n_s, cfg.n_p, cfg.grouping_r) == (64, 18, 0.2)
    assert (cfg.attention_heads_encoder, cfg.att_heads_decoder) == (8, 8)
    assert (cfg.cross_att_layers_encoder, cfg.self_att_layers_encoder, cfg.cross_att_layers_decoder) == (1, 3, 4)
    assert cfg.optimizer.value == "adam"


def test_run_config_splits_into_component_configs():
    cfg = RunConfig(**TINY)
    assert cfg.to_model_config().n_s == 8
    assert cfg.to_train_config().batch_size == 4
    assert cfg.to_datagen_config(num_workers=3).num_workers == 3


@pytest.mark.parametrize("updates,field", [
    ({"n_s": 0}, "n_s"),
    ({"scheduler_factor": 1.5}, "scheduler_factor"),
    ({"unknown_key": 1}, "unknown_key"),
    ({"training_dataset": 0.7}, "testing_dataset"),
])
def test_invalid_field_is_named(updates, field):
    with pytest.raises(ConfigError) as exc:
        load_run_config(overrides={**TINY, **updates})
    assert exc.value.field == field
    assert field in exc.value.message


def test_heads_must_divide_embedding():
    with pytest.raises(ConfigError) as exc:
        load_run_config(overrides={**TINY, "attention_heads_encoder": 3})
    assert "attention_heads_encoder" in exc.value.message


def test_config_file_with_comments(tmp_path):
    path = tmp_path / "cfg.jsonc"
    path.write_text('{\n  // 小模型\n  "n_s": 16,\n  "epochs": 3,\n}\n', encoding="utf-8")
    cfg = load_run_config(path, {"seed": 9, "epochs": None})
    assert (cfg.n_s, cfg.epochs, cfg.seed) == (16, 3, 9)


# ---------------------------------------------------------------------------
# generate
# ---------------------------------------------------------------------------

def test_generate_prints_summary(tmp_path, capsys):
    out = tmp_path / "ds"
    assert main(["generate", "--out", str(out), "--n-samples", "4", "--grid-n", "16"]) == 0
    text = capsys.readouterr().out
    assert "samples=4" in text and "min_queries=" in text and "max_queries=" in text
    assert (tmp_path / "ds.json").exists() and (tmp_path / "ds.bin").exists()


def test_generate_is_deterministic(tmp_path):
    for name in ("a", "b"):
        assert main(["--seed", "5", "generate", "--out", str(tmp_path / name), "--n-samples", "3",
                     "--grid-n", "16"]) == 0
    assert digest(tmp_path / "a.bin") == digest(tmp_path / "b.bin")
    assert digest(tmp_path / "a.json") == digest(tmp_path / "b.json")


def test_generate_empty_dataset(tmp_path, capsys):
    assert main(["generate", "--out", str(tmp_path / "empty"), "--n-samples", "0"]) == 0
    assert "samples=0" in capsys.readouterr().out


def test_generate_unwritable_path(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["generate", "--out", str(blocker / "ds"), "--n-samples", "1", "--grid-n", "16"]) == 2
    assert "code=CORRUPT_CONTAINER" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# train / eval / infer
# ---------------------------------------------------------------------------

def test_train_writes_metric_log_and_resumes(dataset_path, tmp_path, config_file):
    run_dir = tmp_path / "run"
    cfg = config_file(epochs=2)
    assert main(["train", "--config", cfg, "--dataset", str(dataset_path), "--out", str(run_dir)]) == 0
    assert len(pd.read_csv(run_dir / "metrics.csv")) == 2

    assert main(["train", "--config", cfg, "--dataset", str(dataset_path), "--out", str(run_dir),
                 "--epochs", "3", "--resume"]) == 0
    assert pd.read_csv(run_dir / "metrics.csv")["epoch"].tolist() == [0, 1, 2]


def test_train_invalid_config_exits_with_field(dataset_path, tmp_path, config_file, capsys):
    cfg = config_file(grouping_r=-1.0)
    code = main(["train", "--config", cfg, "--dataset", str(dataset_path), "--out", str(tmp_path / "run")])
    lines = [l for l in capsys.readouterr().err.splitlines() if l.startswith("ERROR ")]
    assert code == 2
    assert len(lines) == 1
    assert lines[0].startswith("ERROR code=INVALID_CONFIG") and "grouping_r" in lines[0]


def test_eval_oracle_reports_zero(dataset_path, tmp_path, capsys):
    assert main(["eval", "--oracle", "--dataset", str(dataset_path), "--out", str(tmp_path)]) == 0
    summary = json.loads((tmp_path / "eval_test_summary.json").read_text(encoding="utf-8"))
    assert summary["mean_l2"] == 0.0
    per_sample = pd.read_csv(tmp_path / "eval_test.csv")
    assert list(per_sample.columns) == ["sample", "l2", "n_queries", "n_boundary"]


def test_eval_trained_checkpoint(dataset_path, trained_run, tmp_path):
    assert main(["eval", "--checkpoint", str(trained_run), "--dataset", str(dataset_path),
                 "--split", "train", "--out", str(tmp_path)]) == 0
    summary = json.loads((tmp_path / "eval_train_summary.json").read_text(encoding="utf-8"))
    assert np.isfinite(summary["mean_l2"]) and summary["n"] == 8


def test_eval_uses_run_split_not_dataset_split(dataset_path, tmp_path):
    run_dir = tmp_path / "half"
    cmd_train(RunConfig(**{**TINY, "training_dataset": 0.5, "testing_dataset": 0.5}), dataset_path, run_dir)
    manifest = json.loads((run_dir / "run_manifest.json").read_text(encoding="utf-8"))
    trained_on = set(manifest["train_indices"])

    assert main(["eval", "--checkpoint", str(run_dir), "--dataset", str(dataset_path),
                 "--split", "test", "--out", str(tmp_path / "eval")]) == 0
    evaluated = set(pd.read_csv(tmp_path / "eval" / "eval_test.csv")["sample"])
    assert not (evaluated & trained_on)
    assert evaluated == set(manifest["test_indices"]) and len(evaluated) == 5

    assert main(["robustness", "--checkpoint", str(run_dir), "--dataset", str(dataset_path),
                 "--out", str(tmp_path / "robust"), "--modes", "original"]) == 0
    assert pd.read_csv(tmp_path / "robust" / "robustness.csv")["n"].tolist() == [5]


def test_eval_recorded_split_outside_dataset(trained_run, tiny_dataset, tmp_path, capsys):
    small = tmp_path / "small"
    write_dataset(PoissonDataset(samples=tiny_dataset.samples[:3], train_indices=np.array([0, 1]),
                                 test_indices=np.array([2]), norm_stats=tiny_dataset.norm_stats,
                                 generator=tiny_dataset.generator), small)
    code = main(["eval", "--checkpoint", str(trained_run), "--dataset", str(small),
                 "--split", "train", "--out", str(tmp_path)])
    assert code == 2
    assert "code=INVALID_CONFIG" in capsys.readouterr().err


def test_eval_missing_checkpoint(dataset_path, tmp_path, capsys):
    code = main(["eval", "--checkpoint", str(tmp_path / "nope"), "--dataset", str(dataset_path),
                 "--out", str(tmp_path)])
    assert code == 2
    assert "code=MISSING_CHECKPOINT" in capsys.readouterr().err


def test_resolve_checkpoint_accepts_stem(trained_run):
    assert resolve_checkpoint(trained_run / "last").epoch == 0
    with pytest.raises(CheckpointError):
        resolve_checkpoint(trained_run / "other")


def test_infer_writes_predictions(tiny_dataset, trained_run, tmp_path):
    sample = tiny_dataset.samples[0]
    boundary_csv = tmp_path / "boundary.csv"
    pd.DataFrame(sample.boundary, columns=["x", "y"]).to_csv(boundary_csv, index=False)
    query_csv = tmp_path / "queries.csv"
    np.savetxt(query_csv, sample.queries[:7], delimiter=",")
    out = tmp_path / "pred.csv"

    assert main(["infer", "--checkpoint", str(trained_run), "--boundary", str(boundary_csv),
                 "--queries", str(query_csv), "--load", str(sample.load), "--out", str(out)]) == 0
    frame = pd.read_csv(out)
    assert list(frame.columns) == ["x", "y", "u"]
    np.testing.assert_allclose(frame[["x", "y"]].to_numpy(), sample.queries[:7])

    ckpt = resolve_checkpoint(trained_run)
    expected = ModelPredictor(ckpt.model, ckpt.norm_stats).predict([sample])[0][:7, 0]
    np.testing.assert_allclose(frame["u"].to_numpy(), expected, atol=1e-10)


@pytest.mark.parametrize("content", ["1.0\n2.0\n", "x,y\na,b\n", "x,y\n"])
def test_read_points_csv_rejects_bad_files(tmp_path, content):
    path = tmp_path / "pts.csv"
    path.write_text(content, encoding="utf-8")
    with pytest.raises(ConfigError):
        read_points_csv(path)


def test_read_points_csv_header_and_comments(tmp_path):
    path = tmp_path / "pts.csv"
    path.write_text("# 边界\nx,y\n0.1, 0.2\n0.3,0.4\n", encoding="utf-8")
    np.testing.assert_allclose(read_points_csv(path), [[0.1, 0.2], [0.3, 0.4]])


# ---------------------------------------------------------------------------
# robustness
# ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def trained_predictor(trained_run):
    ckpt = resolve_checkpoint(trained_run)
    return ModelPredictor(ckpt.model, ckpt.norm_stats, batch_size=4)


def test_padded_matches_original(tiny_dataset, trained_predictor):
    samples = tiny_dataset.split("test")
    table = run_robustness(trained_predictor, samples, list(tiny_dataset.test_indices),
                           modes=["original", "padded", "shuffled_anchored"]).set_index("mode")
    assert abs(table.loc["padded", "mean_l2"] - table.loc["original", "mean_l2"]) <= 1e-6
    assert abs(table.loc["shuffled_anchored", "mean_l2"] - table.loc["original", "mean_l2"]) <= 1e-9


def test_mode_clouds_shapes(tiny_dataset):
    sample = tiny_dataset.samples[0]
    shuffled = mode_clouds([sample], "shuffled", seed=0)[0]
    assert shuffled.num_points == 116  # ceil(0.8 · 144)
    padded = mode_clouds([sample], "padded", seed=0)[0]
    assert padded.num_points == 144 + 199 and padded.num_valid == 144
    assert np.all(padded.points[~padded.valid] == -1000.0)
    mixed = mode_clouds([sample], "shuffled_padded", seed=0)[0]
    assert mixed.num_valid == 144
    assert not np.array_equal(mixed.valid, padded.valid)
    anchored = mode_clouds([sample], "shuffled_anchored", seed=0)[0]
    np.testing.assert_array_equal(anchored.points[0], sample.boundary[0])
    assert sorted(map(tuple, anchored.points)) == sorted(map(tuple, sample.boundary))


def test_density_subsets_are_nested():
    points = np.random.default_rng(0).normal(size=(144, 2))
    order = np.random.default_rng(1).permutation(144)
    previous = None
    for d in (100, 80, 60, 40, 20):
        cloud = density_cloud(points, d, order)
        rows = {tuple(p) for p in cloud.points}
        if previous is not None:
            assert rows <= previous
        previous = rows
    assert len(previous) == 29


@pytest.mark.parametrize("densities", [[0], [-10], [100, 0], [150]])
def test_density_out_of_range(densities):
    with pytest.raises(ConfigError) as exc:
        check_densities(densities)
    assert exc.value.field == "density"


def test_density_mode_rows(tiny_dataset):
    table = run_robustness(OraclePredictor(), tiny_dataset.samples, list(range(len(tiny_dataset))),
                           modes=["density"], densities=[100, 50])
    assert table["mode"].tolist() == ["density_100", "density_50"]
    assert (table["mean_l2"] == 0.0).all()


def test_seed_sweep_row(tiny_dataset, trained_predictor):
    samples = tiny_dataset.split("test")
    table = run_robustness(trained_predictor, samples, list(tiny_dataset.test_indices), modes=["seed_sweep"],
                           sweep_seeds=2, sweep_predictor=trained_predictor)
    row = table.iloc[0]
    assert row["mode"] == "seed_sweep" and row["n"] == 2
    assert row["std_l2"] >= 0.0


def test_robustness_command_writes_table(dataset_path, trained_run, tmp_path):
    assert main(["robustness", "--checkpoint", str(trained_run), "--dataset", str(dataset_path),
                 "--out", str(tmp_path), "--modes", "original", "shuffled"]) == 0
    table = pd.read_csv(tmp_path / "robustness.csv")
    assert table["mode"].tolist() == ["original", "shuffled"]


def test_robustness_command_rejects_zero_density(dataset_path, trained_run, tmp_path, capsys):
    code = main(["robustness", "--checkpoint", str(trained_run), "--dataset", str(dataset_path),
                 "--out", str(tmp_path), "--modes", "density", "--densities", "50", "0"])
    assert code == 2
    assert "code=INVALID_CONFIG" in capsys.readouterr().err


def test_robustness_default_modes_include_density_sweep(dataset_path, trained_run, tmp_path):
    args = build_parser().parse_args(["robustness", "--checkpoint", "c", "--dataset", "d"])
    assert "density" in args.modes

    assert main(["robustness", "--checkpoint", str(trained_run), "--dataset", str(dataset_path),
                 "--out", str(tmp_path)]) == 0
    modes = pd.read_csv(tmp_path / "robustness.csv")["mode"].tolist()
    assert modes[:4] == ["original", "shuffled", "padded", "shuffled_padded"]
    assert modes[4:] == ["density_100", "density_80", "density_60", "density_40", "density_20"]


def test_domain_error_logs_without_traceback(dataset_path, tmp_path, capsys, caplog):
    caplog.set_level(logging.ERROR)
    code = main(["eval", "--checkpoint", str(tmp_path / "nope"), "--dataset", str(dataset_path),
                 "--out", str(tmp_path)])
    assert code == 2
    assert "Traceback" not in capsys.readouterr().err
    assert caplog.records and all(r.exc_info is None for r in caplog.records)


# ---------------------------------------------------------------------------
# ablation
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("variant,expected", [
    ("full", (1, 3)), ("no_cross", (0, 3)), ("no_self", (1, 0)), ("none", (0, 0)),
])
def test_attention_axis_variants(variant, expected):
    updates = axis_updates(RunConfig(), "attention", variant)
    assert (updates["cross_att_layers_encoder"], updates["self_att_layers_encoder"]) == expected


def test_unknown_axis():
    with pytest.raises(ConfigError):
        axis_updates(RunConfig(), "depth", 3)


def test_ablation_writes_table(tiny_dataset, tmp_path):
    table = run_ablation(RunConfig(**TINY), tiny_dataset, "n_s", ["4", "8"], tmp_path)
    assert len(table) == 2
    written = pd.read_csv(tmp_path / "ablation_n_s.csv")
    assert written["value"].tolist() == [4, 8]
    assert (tmp_path / "n_s_4" / "best.json").exists()


def test_density_ablation_reports_full_density(tiny_dataset, tmp_path):
    table = run_ablation(RunConfig(**TINY), tiny_dataset, "train_density", ["0.5"], tmp_path)
    assert np.isfinite(table.loc[0, "mean_l2_full_density"])
