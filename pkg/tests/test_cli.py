import json

import pytest

from iwal.cli import main


def write_config(tmp_path, **overrides):
    payload = {
        "dataset": {"kind": "sphere", "dim": 3, "noise": 0.05},
        "strategy": "loss-weighting-finite",
        "train_size": 60,
        "test_size": 40,
        "seed": 3,
    }
    payload.update(overrides)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(payload))
    return path


class TestRun:
    def test_successful_run_writes_outputs(self, tmp_path, capsys):
        config = write_config(tmp_path)
        out = tmp_path / "out"
        assert main(["run", str(config), "--out", str(out)]) == 0
        assert (out / "curve.csv").exists()
        assert (out / "summary.json").exists()
        assert (out / "trace.csv").exists()
        summary = json.loads((out / "summary.json").read_text())
        assert summary["strategy"] == "loss-weighting-finite"

    def test_overrides_apply(self, tmp_path):
        config = write_config(tmp_path)
        out = tmp_path / "out"
        assert main(["run", str(config), "--out", str(out),
                     "--strategy", "passive", "--seed", "11"]) == 0
        summary = json.loads((out / "summary.json").read_text())
        assert summary["strategy"] == "passive"
        assert summary["seed"] == 11
        assert summary["active"]["query_fraction"] == 1.0

    def test_replicates_write_aggregate(self, tmp_path):
        config = write_config(tmp_path, replicates=2, train_size=40,
                              test_size=20)
        out = tmp_path / "out"
        assert main(["run", str(config), "--out", str(out)]) == 0
        assert (out / "aggregate.json").exists()
        assert (out / "summary_seed3.json").exists()
        assert (out / "summary_seed4.json").exists()

    def test_config_error_exit_code(self, tmp_path, capsys):
        config = write_config(tmp_path, strategy="nonsense")
        assert main(["run", str(config), "--out", str(tmp_path / "o")]) == 1
        assert "config error" in capsys.readouterr().err

    def test_missing_config_file(self, tmp_path):
        assert main(["run", str(tmp_path / "nope.json")]) == 1


class TestCompare:
    def test_prints_paired_table(self, tmp_path, capsys):
        config = write_config(tmp_path)
        assert main(["compare", str(config)]) == 0
        out = capsys.readouterr().out
        assert "passive" in out
        assert "query fraction" in out


class TestProbe:
    def test_rho_json(self, capsys):
        assert main(["probe", "rho", "--dim", "3", "--mc", "2000",
                     "--seed", "1"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["distance"] >= 0.0
        assert payload["stderr"] >= 0.0

    def test_theta_json(self, capsys):
        assert main(["probe", "theta", "--dim", "2", "--mc", "1500",
                     "--samples", "40", "--seed", "1"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["within_bound"] is True
        assert payload["supremum"] <= payload["sphere_bound"]

    def test_lower_bound_gen_json(self, tmp_path):
        out = tmp_path / "hard.json"
        assert main(["probe", "lower-bound-gen", "--atoms", "5",
                     "--eta", "0.2", "--eps", "0.05", "--out", str(out)]) == 0
        payload = json.loads(out.read_text())
        assert payload["beta"] == pytest.approx(0.6)
        assert sum(payload["masses"]) == pytest.approx(1.0, abs=1e-15)
        assert payload["optimal_error"] == pytest.approx(0.2)

    def test_bounds_json(self, capsys):
        assert main(["probe", "bounds", "--pmin", "0.5", "--class-size", "8",
                     "--delta", "0.2", "--steps", "500",
                     "--theta", "1.0", "--asymmetry", "1.0",
                     "--best-loss", "0.1"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["deviation_bound"] > 0
        assert payload["expected_query_bound"]["linear_term"] == 200.0
