import json
import math

import numpy as np
import pytest

from iwal.errors import ConfigError
from iwal.harness import (ExperimentConfig, aggregate_reports, build_data,
                          emit_curves, run_experiment, run_replicates)


def base_config(**overrides):
    payload = {
        "dataset": {"kind": "sphere", "dim": 3, "noise": 0.05},
        "strategy": "passive",
        "train_size": 120,
        "test_size": 80,
        "seed": 7,
        "loss_kind": "logistic",
        "class_spec": {"kind": "linear", "norm_bound": 1.0},
    }
    payload.update(overrides)
    return ExperimentConfig.from_dict(payload)


class TestConfig:
    def test_unknown_keys_rejected(self):
        with pytest.raises(ConfigError, match="unknown config keys"):
            ExperimentConfig.from_dict({"dataset": {"kind": "sphere"},
                                        "strategy": "passive",
                                        "train_size": 10, "test_size": 10,
                                        "seed": 1, "bogus": 3})

    def test_missing_keys_rejected(self):
        with pytest.raises(ConfigError, match="missing config keys"):
            ExperimentConfig.from_dict({"strategy": "passive"})

    def test_bad_strategy_rejected(self):
        with pytest.raises(ConfigError):
            base_config(strategy="quantum")

    def test_bad_probability_ranges(self):
        with pytest.raises(ConfigError):
            base_config(confidence=0.0)
        with pytest.raises(ConfigError):
            base_config(p_min=1.5)

    def test_checkpoint_default_cadence(self):
        config = base_config(train_size=1000)
        assert config.checkpoint_interval() == 10

    def test_config_echo_round_trips(self):
        config = base_config()
        clone = ExperimentConfig.from_dict(config.to_dict())
        assert clone.to_dict() == config.to_dict()


class TestBuildData:
    def test_sphere_split_sizes(self, rng):
        config = base_config()
        X_train, y_train, X_test, y_test, support = build_data(config, rng)
        assert X_train.shape == (120, 3)
        assert X_test.shape == (80, 3)
        assert support == (-1.0, 1.0)

    def test_file_dataset(self, tmp_path, rng):
        from iwal.datasets import save_csv

        X = rng.normal(size=(60, 2))
        y = rng.choice([-1.0, 1.0], size=60)
        path = tmp_path / "d.csv"
        save_csv(path, X, y)
        config = base_config(dataset={"kind": "file", "path": str(path)},
                             train_size=40, test_size=20)
        X_train, _, X_test, _, _ = build_data(config, rng)
        assert X_train.shape == (40, 2)
        assert X_test.shape == (20, 2)

    def test_file_too_small_rejected(self, tmp_path, rng):
        from iwal.datasets import save_csv

        path = tmp_path / "d.csv"
        save_csv(path, rng.normal(size=(10, 2)), np.ones(10))
        config = base_config(dataset={"kind": "file", "path": str(path)},
                             train_size=40, test_size=20)
        with pytest.raises(ConfigError, match="rows"):
            build_data(config, rng)

    def test_unknown_dataset_options_rejected(self, rng):
        config = base_config(dataset={"kind": "sphere", "wobble": 1})
        with pytest.raises(ConfigError, match="unknown dataset options"):
            build_data(config, rng)


class TestRunExperiment:
    def test_passive_queries_everything(self):
        report = run_experiment(base_config())
        assert report.active.queries == 120
        assert report.query_fraction() == 1.0
        assert report.passive.queries == 120

    def test_identical_config_identical_reports(self):
        a = run_experiment(base_config(strategy="loss-weighting-finite"))
        b = run_experiment(base_config(strategy="loss-weighting-finite"))
        assert a.summary_dict() == b.summary_dict()
        assert a.curve_rows() == b.curve_rows()

    def test_checkpoints_are_paired(self):
        report = run_experiment(base_config(strategy="loss-weighting-finite"))
        active_ts = [t for t, *_ in report.active.checkpoints]
        passive_ts = [t for t, *_ in report.passive.checkpoints]
        assert active_ts == passive_ts
        rows = report.curve_rows()
        assert not any(math.isnan(row[3]) for row in rows)

    def test_cumulative_queries_monotone(self):
        report = run_experiment(base_config(strategy="loss-weighting-finite"))
        cums = [cum for _, cum, *_ in report.active.checkpoints]
        assert cums == sorted(cums)

    def test_linear_strategy_smoke(self):
        config = base_config(strategy="loss-weighting-linear",
                             train_size=60, test_size=40)
        report = run_experiment(config)
        assert 0 < report.active.queries <= 60
        assert report.active.final_loss is not None
        assert "interval_solves" in report.active.diagnostics

    def test_bootstrap_pipeline(self):
        config = base_config(strategy="bootstrap", loss_kind="zero-one",
                             train_size=200, test_size=100)
        report = run_experiment(config)
        prefix = report.active.diagnostics["prefix"]
        assert prefix == 20
        assert prefix <= report.active.queries <= 200
        assert report.passive.queries == 200
        assert report.active.final_error is not None

    def test_point_mass_faithful_labels_skip_error_metric(self):
        config = base_config(
            dataset={"kind": "point-mass", "beta": 0.3,
                     "binary_labels": False},
            strategy="passive", loss_kind="squared", train_size=60,
            test_size=40)
        report = run_experiment(config)
        assert report.active.final_error is None
        assert report.active.final_loss is not None


class TestReplicatesAndEmission:
    def test_aggregate_is_order_independent(self):
        config = base_config(strategy="loss-weighting-finite", replicates=3,
                             train_size=60, test_size=30)
        reports, aggregate = run_replicates(config)
        assert aggregate["replicates"] == 3
        reversed_aggregate = aggregate_reports(list(reversed(reports)))
        for key, value in aggregate.items():
            if key == "seeds":
                continue
            assert reversed_aggregate[key] == pytest.approx(value)

    def test_emit_curves_files(self, tmp_path):
        report = run_experiment(base_config(strategy="loss-weighting-finite",
                                            train_size=60, test_size=30))
        paths = emit_curves(report, tmp_path)
        curve_lines = open(paths["curve"]).read().strip().splitlines()
        assert curve_lines[0] == "t,cum_queries,active_test_loss,passive_test_loss"
        assert len(curve_lines) == len(report.active.checkpoints) + 1
        summary = json.load(open(paths["summary"]))
        assert summary == report.summary_dict()
        trace_lines = open(paths["trace"]).read().strip().splitlines()
        assert len(trace_lines) == 61

    def test_emission_is_bit_stable(self, tmp_path):
        report = run_experiment(base_config(train_size=40, test_size=20))
        a = emit_curves(report, tmp_path / "a")
        b = emit_curves(report, tmp_path / "b")
        assert open(a["curve"]).read() == open(b["curve"]).read()
        assert open(a["summary"]).read() == open(b["summary"]).read()
