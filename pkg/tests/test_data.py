"""Measurement simulation, noise model and dataset serialization."""

import json
import os

import numpy as np
import pytest

from nqst.data import (
    CountsDataset,
    MultiBasisDataset,
    NoiseModel,
    atomic_write_json,
    atomic_write_text,
    bootstrap_resample,
    coarse_grain_counts_pauli6_to_pauli4,
    counts_from_json,
    counts_to_distribution,
    counts_to_json,
    expected_counts,
    load_dataset,
    multibasis_from_json,
    multibasis_to_json,
    multibasis_to_pauli6,
    sample_outcomes,
    save_dataset,
    simulate_experiment,
)
from nqst.linalg import bell_projector, random_density_matrix
from nqst.povm import (
    coarse_grain_pauli6_to_pauli4,
    make_product_povm,
    outcome_probabilities,
    pauli_basis_probabilities,
)


class TestSampling:
    def test_counts_sum_to_n(self, bell_rho):
        povm = make_product_povm("tetra", 2)
        c = sample_outcomes(bell_rho, povm, 5000, seed=3)
        assert c.counts.sum() == 5000
        assert c.counts.shape == (16,)

    def test_sampling_deterministic(self, bell_rho):
        povm = make_product_povm("pauli4", 2)
        a = sample_outcomes(bell_rho, povm, 1000, seed=11)
        b = sample_outcomes(bell_rho, povm, 1000, seed=11)
        assert np.array_equal(a.counts, b.counts)
        c = sample_outcomes(bell_rho, povm, 1000, seed=12)
        assert not np.array_equal(a.counts, c.counts)

    def test_empirical_frequencies_converge(self, rng):
        rho = random_density_matrix(4, rng)
        povm = make_product_povm("tetra", 2)
        p = outcome_probabilities(rho, povm).probs
        c = sample_outcomes(rho, povm, 200_000, seed=0)
        # multinomial std is sqrt(p(1-p)/n) ~ 1e-3; allow 5 sigma
        assert np.max(np.abs(c.counts / c.total - p)) < 5e-3

    def test_expected_counts_exact(self, bell_rho):
        povm = make_product_povm("pauli4", 2)
        c = expected_counts(bell_rho, povm, 60_000)
        p = outcome_probabilities(bell_rho, povm).probs
        assert np.allclose(c.counts, 60_000 * p, atol=1e-9)

    def test_counts_to_distribution_normalizes(self, bell_rho):
        povm = make_product_povm("tetra", 2)
        c = sample_outcomes(bell_rho, povm, 4000, seed=5)
        d = counts_to_distribution(c)
        assert d.kind == "tetra"
        assert d.probs.sum() == pytest.approx(1.0, abs=1e-12)

    def test_bootstrap_preserves_total(self, bell_rho):
        povm = make_product_povm("tetra", 2)
        c = sample_outcomes(bell_rho, povm, 4000, seed=5)
        b = bootstrap_resample(c, seed=1)
        assert b.counts.sum() == c.counts.sum()
        assert not np.array_equal(b.counts, c.counts)
        assert np.array_equal(bootstrap_resample(c, seed=1).counts, b.counts)


class TestSimulateExperiment:
    def test_pauli6_returns_multibasis(self, bell_rho):
        ds = simulate_experiment(bell_rho, "pauli6", 9000, NoiseModel(0.0, 0), 0)
        assert isinstance(ds, MultiBasisDataset)
        assert len(ds.settings) == 9
        assert ds.total == 9000

    @pytest.mark.parametrize("kind", ["pauli4", "tetra"])
    def test_counts_kinds(self, bell_rho, kind):
        ds = simulate_experiment(bell_rho, kind, 5000, NoiseModel(0.0, 0), 0)
        assert isinstance(ds, CountsDataset)
        assert ds.povm_kind == kind
        assert ds.counts.sum() == 5000

    def test_no_noise_no_shot_noise_is_exact(self, bell_rho):
        ds = simulate_experiment(bell_rho, "tetra", 27_000, NoiseModel(0.0, 0),
                                 0, shot_noise=False)
        povm = make_product_povm("tetra", 2)
        p = outcome_probabilities(bell_rho, povm).probs
        assert np.allclose(ds.counts, 27_000 * p, atol=1e-8)

    def test_exact_multibasis_matches_born_rule(self, mixed_rho):
        ds = simulate_experiment(mixed_rho, "pauli6", 9, NoiseModel(0.0, 0),
                                 0, shot_noise=False)
        for basis, counts in ds.settings.items():
            p = pauli_basis_probabilities(mixed_rho, basis)
            assert np.allclose(counts, p, atol=1e-12)

    def test_deterministic(self, bell_rho):
        kw = dict(noise=NoiseModel(0.02, 4), seed=9)
        a = simulate_experiment(bell_rho, "pauli6", 6000, **kw)
        b = simulate_experiment(bell_rho, "pauli6", 6000, **kw)
        for basis in a.settings:
            assert np.array_equal(a.settings[basis], b.settings[basis])

    def test_tilt_is_systematic_not_resampled(self, bell_rho):
        # same noise seed, different shot seeds: same expected distribution
        a = simulate_experiment(bell_rho, "tetra", 100, NoiseModel(0.05, 7), 0,
                                shot_noise=False)
        b = simulate_experiment(bell_rho, "tetra", 100, NoiseModel(0.05, 7), 1,
                                shot_noise=False)
        assert np.allclose(a.counts, b.counts, atol=1e-12)
        c = simulate_experiment(bell_rho, "tetra", 100, NoiseModel(0.05, 8), 0,
                                shot_noise=False)
        assert not np.allclose(a.counts, c.counts, atol=1e-9)

    def test_tilt_perturbation_scales_with_sigma(self, bell_rho):
        base = simulate_experiment(bell_rho, "tetra", 1, NoiseModel(0.0, 0), 0,
                                   shot_noise=False).counts
        small = simulate_experiment(bell_rho, "tetra", 1, NoiseModel(1e-3, 3), 0,
                                    shot_noise=False).counts
        large = simulate_experiment(bell_rho, "tetra", 1, NoiseModel(0.2, 3), 0,
                                    shot_noise=False).counts
        assert np.max(np.abs(small - base)) < np.max(np.abs(large - base))
        assert np.max(np.abs(small - base)) < 2e-3

    def test_rejects_unphysical_state(self):
        with pytest.raises(ValueError):
            simulate_experiment(np.diag([1.5, -0.5, 0, 0]), "tetra", 100,
                                NoiseModel(0.0, 0), 0)


class TestConversions:
    def test_multibasis_to_pauli6_index_map(self, bell_rho):
        ds = simulate_experiment(bell_rho, "pauli6", 18_000, NoiseModel(0.0, 0), 2)
        c = multibasis_to_pauli6(ds)
        assert c.povm_kind == "pauli6"
        assert c.counts.sum() == pytest.approx(ds.total)
        # setting "xz", outcome (up, down) lands at pauli6 index (2*0+0, 2*2+1)
        assert c.counts[(2 * 0 + 0) * 6 + (2 * 2 + 1)] == ds.settings["xz"][1]

    def test_coarse_grain_counts_consistency(self, mixed_rho):
        ds = simulate_experiment(mixed_rho, "pauli6", 36_000, NoiseModel(0.0, 0), 1)
        c6 = multibasis_to_pauli6(ds)
        c4 = coarse_grain_counts_pauli6_to_pauli4(c6)
        assert c4.povm_kind == "pauli4"
        assert c4.counts.sum() == pytest.approx(c6.counts.sum())
        # distributions commute with coarse graining
        d1 = coarse_grain_pauli6_to_pauli4(counts_to_distribution(c6))
        d2 = counts_to_distribution(c4)
        assert np.allclose(d1.probs, d2.probs, atol=1e-13)


class TestSerialization:
    def test_counts_json_round_trip(self, bell_rho):
        povm = make_product_povm("tetra", 2)
        c = sample_outcomes(bell_rho, povm, 3000, seed=2)
        back = counts_from_json(counts_to_json(c))
        assert back.povm_kind == c.povm_kind
        assert np.array_equal(back.counts, c.counts)

    def test_multibasis_json_round_trip(self, bell_rho):
        ds = simulate_experiment(bell_rho, "pauli6", 9000, NoiseModel(0.01, 1), 3)
        back = multibasis_from_json(multibasis_to_json(ds))
        assert set(back.settings) == set(ds.settings)
        for basis in ds.settings:
            assert np.array_equal(back.settings[basis], ds.settings[basis])

    def test_save_load_dispatch(self, bell_rho, tmp_path):
        p6 = simulate_experiment(bell_rho, "pauli6", 900, NoiseModel(0.0, 0), 0)
        tet = simulate_experiment(bell_rho, "tetra", 900, NoiseModel(0.0, 0), 0)
        f1, f2 = str(tmp_path / "a.json"), str(tmp_path / "b.json")
        save_dataset(f1, p6)
        save_dataset(f2, tet)
        assert isinstance(load_dataset(f1), MultiBasisDataset)
        loaded = load_dataset(f2)
        assert isinstance(loaded, CountsDataset)
        assert np.array_equal(loaded.counts, tet.counts)

    def test_atomic_writes_are_stable(self, tmp_path):
        path = str(tmp_path / "x.json")
        atomic_write_json(path, {"b": 1, "a": [1.5, 2]})
        first = open(path).read()
        atomic_write_json(path, {"a": [1.5, 2], "b": 1})
        assert open(path).read() == first
        assert json.loads(first) == {"a": [1.5, 2], "b": 1}
        assert not [f for f in os.listdir(tmp_path) if f != "x.json"]

    def test_atomic_text(self, tmp_path):
        path = str(tmp_path / "t.csv")
        atomic_write_text(path, "theta,S\n0,0\n")
        assert open(path).read() == "theta,S\n0,0\n"
