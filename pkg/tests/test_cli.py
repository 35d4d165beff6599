"""End-to-end CLI pipelines and their exit-code contract."""

import json
import os

import numpy as np
import pytest
from click.testing import CliRunner

from nqst.bell import curve_from_csv
from nqst.cli import main, parse_state
from nqst.data import load_dataset, save_dataset
from nqst.linalg import bell_projector, density_matrix_from_json, werner_state


@pytest.fixture
def runner():
    return CliRunner()


def _run(runner, args):
    result = runner.invoke(main, args, catch_exceptions=False)
    assert result.exit_code == 0, result.output
    return result


class TestParseState:
    def test_named_states(self):
        assert np.allclose(parse_state("bell"), bell_projector())
        assert np.allclose(parse_state("werner:0.5"), werner_state(0.5))
        assert np.allclose(parse_state("mixed-bell"), werner_state(0.93))
        assert np.allclose(parse_state("mixed-bell:0.8"), werner_state(0.8))

    def test_bad_specs(self):
        import click
        for spec in ("ghz", "werner:x"):
            with pytest.raises(click.UsageError):
                parse_state(spec)


class TestSynth:
    def test_pauli6_dataset(self, runner, tmp_path):
        out = str(tmp_path / "d.json")
        _run(runner, ["synth", "--state", "bell", "--povm", "pauli6",
                      "--n", "9000", "--out", out])
        ds = load_dataset(out)
        assert ds.total == 9000

    def test_default_counts_per_povm(self, runner, tmp_path):
        out = str(tmp_path / "t.json")
        _run(runner, ["synth", "--povm", "tetra", "--out", out])
        assert load_dataset(out).total == 27_000

    def test_no_shot_noise_counts_are_exact(self, runner, tmp_path):
        out = str(tmp_path / "e.json")
        _run(runner, ["synth", "--povm", "tetra", "--n", "1000",
                      "--no-shot-noise", "--out", out])
        ds = load_dataset(out)
        assert not np.allclose(ds.counts, np.round(ds.counts))

    def test_synth_deterministic(self, runner, tmp_path):
        a, b = str(tmp_path / "a.json"), str(tmp_path / "b.json")
        args = ["synth", "--povm", "pauli6", "--n", "6000", "--sigma-angle",
                "0.02", "--seed", "5", "--noise-seed", "2"]
        _run(runner, args + ["--out", a])
        _run(runner, args + ["--out", b])
        assert open(a).read() == open(b).read()


class TestReconstruct:
    @pytest.mark.parametrize("method", ["linear", "mle"])
    def test_reconstruction_accuracy(self, runner, tmp_path, method):
        data = str(tmp_path / "d.json")
        out = str(tmp_path / "rho.json")
        _run(runner, ["synth", "--povm", "pauli6", "--out", data])
        result = _run(runner, ["reconstruct", "--dataset", data,
                               "--method", method, "--out", out])
        rho = density_matrix_from_json(json.load(open(out)))
        # linear output can be slightly indefinite; score by pure overlap
        from nqst.linalg import bell_state, pure_state_overlap
        assert pure_state_overlap(rho, bell_state()) > 0.99
        report = json.loads(result.output.strip().splitlines()[-1])
        assert "eigenvalues" in report
        assert os.path.exists(out + ".report.json")

    def test_missing_dataset_is_usage_error(self, runner, tmp_path):
        result = runner.invoke(main, ["reconstruct", "--dataset",
                                      str(tmp_path / "nope.json"),
                                      "--method", "linear", "--out",
                                      str(tmp_path / "o.json")])
        assert result.exit_code == 2


class TestTrainAndBell:
    def test_train_povm_and_bell_curve(self, runner, tmp_path):
        data = str(tmp_path / "d.json")
        model = str(tmp_path / "m.json")
        trace = str(tmp_path / "loss.csv")
        curve_path = str(tmp_path / "bell.csv")
        _run(runner, ["synth", "--povm", "pauli6", "--n", "60000", "--out", data])
        _run(runner, ["train", "--dataset", data, "--ansatz", "povm",
                      "--epochs", "2000", "--out", model,
                      "--loss-trace", trace])
        obj = json.load(open(model))
        assert obj["ansatz"] == "povm"
        assert obj["train_meta"]["final_loss"] < 1e-2
        assert open(trace).readline().strip() == "epoch,loss"
        _run(runner, ["bell", "--input", model, "--points", "20",
                      "--out", curve_path])
        curve = curve_from_csv(open(curve_path).read())
        assert np.max(np.abs(curve.values)) == pytest.approx(2 * np.sqrt(2),
                                                             abs=0.1)

    def test_train_positive_real(self, runner, tmp_path):
        data = str(tmp_path / "d.json")
        model = str(tmp_path / "m.json")
        _run(runner, ["synth", "--povm", "pauli6", "--n", "20000", "--out", data])
        _run(runner, ["train", "--dataset", data, "--ansatz", "positive_real",
                      "--epochs", "1500", "--out", model])
        assert json.load(open(model))["ansatz"] == "positive_real"

    def test_wavefunction_ansatz_needs_multibasis(self, runner, tmp_path):
        data = str(tmp_path / "t.json")
        _run(runner, ["synth", "--povm", "tetra", "--n", "1000", "--out", data])
        result = runner.invoke(main, ["train", "--dataset", data, "--ansatz",
                                      "pure", "--out", str(tmp_path / "m.json")])
        assert result.exit_code == 2

    def test_bell_from_density_matrix(self, runner, tmp_path):
        from nqst.data import atomic_write_json
        from nqst.linalg import density_matrix_to_json
        rho_path = str(tmp_path / "rho.json")
        out = str(tmp_path / "c.csv")
        atomic_write_json(rho_path, density_matrix_to_json(bell_projector()))
        result = _run(runner, ["bell", "--input", rho_path, "--out", out])
        assert "max |S| = 2.82" in result.output


class TestCompare:
    def test_compare_pipeline(self, runner, tmp_path):
        config = {"scenario": "synthetic_exact", "state": "mixed-bell",
                  "n_total": 30_000, "methods": ["linear", "mle"],
                  "seed": 1, "theta_points": 20}
        cfg_path = str(tmp_path / "cfg.json")
        outdir = str(tmp_path / "out")
        with open(cfg_path, "w") as f:
            json.dump(config, f)
        result = _run(runner, ["compare", "--config", cfg_path, "--out", outdir])
        report = json.loads(result.output)
        assert set(report) == {"linear", "mle"}
        for name in ("dataset.json", "bell_linear.csv", "bell_mle.csv",
                     "bell_reference.csv", "manifest.json", "report.json"):
            assert os.path.exists(os.path.join(outdir, name))

    def test_compare_deterministic_reruns(self, runner, tmp_path):
        config = {"scenario": "experiment_sim", "state": "bell",
                  "n_total": 12_000, "sigma_angle": 0.02,
                  "methods": ["linear"], "seed": 3, "theta_points": 15}
        cfg_path = str(tmp_path / "cfg.json")
        with open(cfg_path, "w") as f:
            json.dump(config, f)
        out1, out2 = str(tmp_path / "r1"), str(tmp_path / "r2")
        _run(runner, ["compare", "--config", cfg_path, "--out", out1])
        _run(runner, ["compare", "--config", cfg_path, "--out", out2])
        for name in sorted(os.listdir(out1)):
            assert open(os.path.join(out1, name)).read() == \
                open(os.path.join(out2, name)).read(), name

    def test_unknown_method_is_usage_error(self, runner, tmp_path):
        cfg_path = str(tmp_path / "cfg.json")
        with open(cfg_path, "w") as f:
            json.dump({"methods": ["magic"]}, f)
        result = runner.invoke(main, ["compare", "--config", cfg_path,
                                      "--out", str(tmp_path / "o")])
        assert result.exit_code == 2

    def test_from_files_scenario(self, runner, tmp_path, bell_rho):
        from nqst.data import NoiseModel, simulate_experiment
        ds = simulate_experiment(bell_rho, "pauli6", 9000, NoiseModel(0.0, 0), 0)
        data_path = str(tmp_path / "d.json")
        save_dataset(data_path, ds)
        cfg_path = str(tmp_path / "cfg.json")
        with open(cfg_path, "w") as f:
            json.dump({"scenario": "from_files", "dataset": data_path,
                       "methods": ["linear"]}, f)
        result = _run(runner, ["compare", "--config", cfg_path,
                               "--out", str(tmp_path / "o")])
        assert "linear" in json.loads(result.output)
