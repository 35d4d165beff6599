"""Command-line pipelines: synth, reconstruct, train, bell, compare.

Every pipeline is a pure function of its configuration and seeds; rerunning
with the same arguments produces byte-identical output files.  Outputs are
written atomically (temp file + rename).  Exit codes: 0 ok, 2 bad
configuration, 3 numerical failure.
"""

from __future__ import annotations

import json
import sys

import click
import numpy as np

from . import __version__
from .bell import bell_curve, curve_to_csv, default_theta_grid
from .benchmark import compare_estimators
from .data import (
    CountsDataset,
    MultiBasisDataset,
    NoiseModel,
    atomic_write_json,
    atomic_write_text,
    load_dataset,
    save_dataset,
    simulate_experiment,
)
from .estimators import (
    LinearInversionEstimator,
    MaximumLikelihoodEstimator,
    PositiveRealEstimator,
    PovmRbmEstimator,
    PureStateEstimator,
    PurificationEstimator,
)
from .linalg import (
    bell_projector,
    density_matrix_from_json,
    density_matrix_to_json,
    werner_state,
)
from .rbm import TrainingDivergedError, model_from_json, model_to_json, rho_from_model

DEFAULT_N = {"pauli6": 60_000, "pauli4": 60_000, "tetra": 27_000}

_ESTIMATORS = {
    "linear": lambda cfg: LinearInversionEstimator(),
    "mle": lambda cfg: MaximumLikelihoodEstimator(seed=cfg.get("seed", 0)),
    "povm": lambda cfg: PovmRbmEstimator(**cfg),
    "purification": lambda cfg: PurificationEstimator(**cfg),
    "pure": lambda cfg: PureStateEstimator(**cfg),
    "positive_real": lambda cfg: PositiveRealEstimator(**cfg),
}


def parse_state(spec: str) -> np.ndarray:
    """Built-in target states: "bell", "werner:<p>" or "mixed-bell[:<p>]"."""
    if spec == "bell":
        return bell_projector()
    if spec == "mixed-bell":
        return werner_state(0.93)
    for prefix in ("werner:", "mixed-bell:"):
        if spec.startswith(prefix):
            try:
                return werner_state(float(spec[len(prefix):]))
            except ValueError as exc:
                raise click.UsageError(f"bad state spec {spec!r}: {exc}")
    raise click.UsageError(f"unknown state spec {spec!r}")


@click.group()
@click.version_option(__version__)
def main():
    """Quantum state tomography benchmarks for two-qubit systems."""


@main.command()
@click.option("--state", default="bell", show_default=True,
              help="bell | werner:<p> | mixed-bell[:<p>]")
@click.option("--povm", type=click.Choice(["pauli6", "pauli4", "tetra"]),
              default="pauli6", show_default=True)
@click.option("--n", "n_total", type=int, default=None,
              help="total coincidence counts (default per POVM: 60000 / 27000)")
@click.option("--sigma-angle", type=float, default=0.0, show_default=True,
              help="std-dev of the systematic detection-axis tilt [rad]")
@click.option("--noise-seed", type=int, default=0, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--no-shot-noise", is_flag=True,
              help="write expected counts instead of a multinomial sample")
@click.option("--out", required=True, type=click.Path())
def synth(state, povm, n_total, sigma_angle, noise_seed, seed, no_shot_noise, out):
    """Generate a simulated measurement dataset."""
    rho = parse_state(state)
    n = n_total if n_total is not None else DEFAULT_N[povm]
    ds = simulate_experiment(rho, povm, n, NoiseModel(sigma_angle, noise_seed),
                             seed, shot_noise=not no_shot_noise)
    save_dataset(out, ds)
    click.echo(f"wrote {povm} dataset ({n} counts) to {out}")


@main.command()
@click.option("--dataset", required=True, type=click.Path(exists=True))
@click.option("--method", type=click.Choice(["linear", "mle"]), required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", required=True, type=click.Path(),
              help="density-matrix JSON output")
@click.option("--report", "report_path", type=click.Path(), default=None,
              help="eigenvalue/fit report JSON (default: <out>.report.json)")
def reconstruct(dataset, method, seed, out, report_path):
    """Reconstruct a density matrix by linear inversion or MLE."""
    ds = load_dataset(dataset)
    try:
        if method == "linear":
            est = LinearInversionEstimator().fit(ds)
            report = {"eigenvalues": est.eigenvalues_.tolist(),
                      "min_eig": est.min_eig_, "physical": est.physical_}
        else:
            est = MaximumLikelihoodEstimator(seed=seed).fit(ds)
            report = est.report_.to_json()
            report["eigenvalues"] = np.sort(
                np.linalg.eigvalsh(est.density_matrix_))[::-1].tolist()
    except (ValueError, FloatingPointError) as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        sys.exit(3)
    atomic_write_json(out, density_matrix_to_json(est.density_matrix_))
    atomic_write_json(report_path or out + ".report.json", report)
    click.echo(json.dumps(report))


@main.command()
@click.option("--dataset", required=True, type=click.Path(exists=True))
@click.option("--ansatz", required=True,
              type=click.Choice(["povm", "purification", "pure", "positive_real"]))
@click.option("--n-hidden", type=int, default=3, show_default=True)
@click.option("--n-anc", type=int, default=2, show_default=True)
@click.option("--lr", type=float, default=0.05, show_default=True)
@click.option("--epochs", type=int, default=20_000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", required=True, type=click.Path())
@click.option("--loss-trace", type=click.Path(), default=None,
              help="optional CSV of the training loss")
def train(dataset, ansatz, n_hidden, n_anc, lr, epochs, seed, out, loss_trace):
    """Train one of the four RBM ansaetze on a dataset."""
    ds = load_dataset(dataset)
    kwargs = dict(n_hidden=n_hidden, learning_rate=lr, epochs=epochs, seed=seed)
    if ansatz in ("purification", "pure"):
        kwargs["n_anc"] = n_anc
    if ansatz in ("purification", "pure", "positive_real") and not isinstance(
            ds, MultiBasisDataset):
        raise click.UsageError(f"{ansatz} ansatz needs a pauli6 multi-basis dataset")
    try:
        est = _ESTIMATORS[ansatz](kwargs).fit(ds)
    except TrainingDivergedError as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        sys.exit(3)
    meta = {"dataset": dataset, "seed": seed, "epochs": epochs,
            "learning_rate": lr, "final_loss": float(est.loss_trace_[-1])}
    atomic_write_json(out, model_to_json(est.model_, ansatz, meta))
    if loss_trace:
        lines = ["epoch,loss"] + [f"{i},{v!r}" for i, v in enumerate(est.loss_trace_)]
        atomic_write_text(loss_trace, "\n".join(lines) + "\n")
    click.echo(f"final loss {est.loss_trace_[-1]:.3e} -> {out}")


@main.command("bell")
@click.option("--input", "input_path", required=True, type=click.Path(exists=True),
              help="density-matrix JSON or trained model JSON")
@click.option("--points", type=int, default=60, show_default=True)
@click.option("--out", required=True, type=click.Path())
def bell_cmd(input_path, points, out):
    """Predicted CHSH Bell curve S(theta) as CSV."""
    with open(input_path) as f:
        obj = json.load(f)
    if "ansatz" in obj:
        ansatz, model = model_from_json(obj)
        if ansatz == "povm":
            from .povm import dual_frame, linear_reconstruct, make_product_povm
            from .rbm import povm_rbm_distribution
            dist = povm_rbm_distribution(model)
            frame = dual_frame(make_product_povm(dist.kind, dist.n_qubits))
            rho = linear_reconstruct(dist, frame).rho
        else:
            rho = rho_from_model(model)
        source = ansatz
    else:
        rho = density_matrix_from_json(obj)
        source = "density_matrix"
    curve = bell_curve(rho, default_theta_grid(points), source=source)
    atomic_write_text(out, curve_to_csv(curve))
    click.echo(f"max |S| = {np.max(np.abs(curve.values)):.4f} -> {out}")


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--out", "outdir", required=True, type=click.Path())
def compare(config_path, outdir):
    """Run a full benchmark pipeline from a JSON config."""
    with open(config_path) as f:
        config = json.load(f)
    try:
        report = run_compare(config, outdir)
    except click.UsageError:
        raise
    except (ValueError, TrainingDivergedError) as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        sys.exit(3)
    click.echo(json.dumps(report, indent=2, sort_keys=True))


def run_compare(config: dict, outdir: str) -> dict:
    """Benchmark pipeline: data -> fits -> scorecards + Bell curve CSVs.

    Config keys: scenario (experiment_sim | synthetic_exact | from_files),
    state, n_total, sigma_angle, methods, train (per-ansatz overrides),
    seed, theta_points, dataset (from_files only).
    """
    import os

    scenario = config.get("scenario", "experiment_sim")
    methods = config.get("methods", ["linear", "mle"])
    bad = [m for m in methods if m not in _ESTIMATORS]
    if bad:
        raise click.UsageError(f"unknown methods: {bad}")
    seed = int(config.get("seed", 0))
    thetas = default_theta_grid(int(config.get("theta_points", 60)))
    os.makedirs(outdir, exist_ok=True)

    reference_rho = None
    if scenario == "from_files":
        data = load_dataset(config["dataset"])
    elif scenario in ("experiment_sim", "synthetic_exact"):
        rho = parse_state(config.get("state", "bell"))
        reference_rho = rho
        sigma = float(config.get("sigma_angle", 0.0)) if scenario == "experiment_sim" else 0.0
        n = int(config.get("n_total", DEFAULT_N["pauli6"]))
        data = simulate_experiment(rho, "pauli6", n, NoiseModel(sigma, seed),
                                   seed, shot_noise=config.get("shot_noise", True))
        save_dataset(os.path.join(outdir, "dataset.json"), data)
    else:
        raise click.UsageError(f"unknown scenario {scenario!r}")
    if not isinstance(data, MultiBasisDataset):
        raise click.UsageError("compare needs pauli6 multi-basis data")

    train_cfg = config.get("train", {})
    fitted = {}
    for name in methods:
        kwargs = dict(train_cfg.get(name, train_cfg.get("default", {})))
        if name not in ("linear",):
            kwargs.setdefault("seed", seed)
        fitted[name] = _ESTIMATORS[name](kwargs).fit(data)

    report = compare_estimators(fitted, data, reference_rho, thetas)
    for name, est in fitted.items():
        curve = bell_curve(est.density_matrix_, thetas, source=name)
        atomic_write_text(os.path.join(outdir, f"bell_{name}.csv"),
                          curve_to_csv(curve))
    if reference_rho is not None:
        atomic_write_text(os.path.join(outdir, "bell_reference.csv"),
                          curve_to_csv(bell_curve(reference_rho, thetas,
                                                  source="reference")))
    manifest = {"package": "nqst", "version": __version__, "config": config,
                "scenario": scenario, "seed": seed}
    atomic_write_json(os.path.join(outdir, "manifest.json"), manifest)
    atomic_write_json(os.path.join(outdir, "report.json"), report)
    return report


if __name__ == "__main__":
    main()
