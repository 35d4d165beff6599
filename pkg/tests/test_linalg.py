"""Density-matrix utilities: constructors, metrics, serialization."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nqst.linalg import (
    NotHermitianError,
    UnphysicalStateError,
    bell_projector,
    bell_state,
    check_density_matrix,
    check_hermitian,
    check_pure_state,
    density_matrix_from_json,
    density_matrix_to_json,
    eig_herm,
    fidelity,
    kron_all,
    min_eigenvalue,
    partial_trace_ancilla,
    pure_state_overlap,
    purity,
    random_density_matrix,
    random_pure_state,
    tensor_product,
    trace_distance,
    werner_state,
)

SEEDED_STATES = st.integers(min_value=0, max_value=10_000)


def _random_rho(seed):
    return random_density_matrix(4, np.random.default_rng(seed))


class TestChecks:
    def test_hermitian_accepts_pauli(self):
        sy = np.array([[0, -1j], [1j, 0]])
        assert check_hermitian(sy) is not None

    def test_hermitian_rejects_asymmetric(self):
        with pytest.raises(NotHermitianError):
            check_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_density_matrix_rejects_trace(self):
        with pytest.raises(ValueError):
            check_density_matrix(2 * np.eye(2))

    def test_density_matrix_rejects_non_hermitian(self):
        with pytest.raises(NotHermitianError):
            check_density_matrix(np.array([[0.5, 0.3], [0.1, 0.5]]))

    def test_pure_state_normalization(self):
        with pytest.raises(ValueError):
            check_pure_state(np.array([1.0, 1.0]))


class TestTensorAlgebra:
    def test_tensor_product_is_kron(self, rng):
        a = rng.normal(size=(2, 2))
        b = rng.normal(size=(2, 2))
        assert np.allclose(tensor_product(a, b), np.kron(a, b))

    def test_kron_all_associative(self, rng):
        mats = [rng.normal(size=(2, 2)) for _ in range(3)]
        expect = np.kron(np.kron(mats[0], mats[1]), mats[2])
        assert np.allclose(kron_all(mats), expect)

    def test_partial_trace_of_product_state(self, rng):
        psi_s = random_pure_state(4, rng)
        psi_a = random_pure_state(4, rng)
        psi = np.kron(psi_s, psi_a)
        rho = partial_trace_ancilla(psi, n_sys=2, n_anc=2)
        assert np.allclose(rho, np.outer(psi_s, psi_s.conj()), atol=1e-12)

    def test_partial_trace_yields_density_matrix(self, rng):
        psi = random_pure_state(16, rng)
        rho = partial_trace_ancilla(psi, n_sys=2, n_anc=2)
        check_density_matrix(rho)

    def test_bell_purification(self):
        # tracing half of |Bell> leaves the maximally mixed qubit
        rho = partial_trace_ancilla(bell_state(), n_sys=1, n_anc=1)
        assert np.allclose(rho, np.eye(2) / 2, atol=1e-14)


class TestSpectra:
    def test_eig_herm_descending(self, random_states):
        for rho in random_states:
            w, _ = eig_herm(rho)
            assert np.all(np.diff(w) <= 1e-14)
            assert abs(w.sum() - 1.0) < 1e-12

    def test_min_eigenvalue_matches_numpy(self, random_states):
        for rho in random_states:
            assert min_eigenvalue(rho) == pytest.approx(
                np.linalg.eigvalsh(rho).min(), abs=1e-13)


class TestMetrics:
    def test_fidelity_self_is_one(self, random_states):
        for rho in random_states:
            assert fidelity(rho, rho) == pytest.approx(1.0, abs=1e-10)

    def test_fidelity_symmetric(self, rng):
        a = random_density_matrix(4, rng)
        b = random_density_matrix(4, rng)
        assert fidelity(a, b) == pytest.approx(fidelity(b, a), abs=1e-10)

    def test_fidelity_orthogonal_pure(self):
        a = np.diag([1.0, 0, 0, 0])
        b = np.diag([0, 1.0, 0, 0])
        assert fidelity(a, b) == pytest.approx(0.0, abs=1e-10)

    def test_fidelity_pure_mixed_formula(self, rng):
        # squared convention: F(rho, |psi><psi|) = <psi|rho|psi>
        rho = random_density_matrix(4, rng)
        psi = random_pure_state(4, rng)
        proj = np.outer(psi, psi.conj())
        overlap = np.real(psi.conj() @ rho @ psi)
        assert fidelity(rho, proj) == pytest.approx(overlap, abs=1e-7)

    def test_fidelity_rejects_far_from_physical(self):
        with pytest.raises(UnphysicalStateError):
            fidelity(np.diag([1.5, -0.5, 0, 0]), np.eye(4) / 4)

    def test_pure_state_overlap_tolerates_indefinite(self):
        rho = np.diag([1.001, -0.001, 0.0, 0.0])
        psi = np.array([1.0, 0, 0, 0])
        assert pure_state_overlap(rho, psi) == pytest.approx(1.001, abs=1e-12)

    def test_purity_bounds(self, random_states):
        for rho in random_states:
            assert 0.25 - 1e-12 <= purity(rho) <= 1.0 + 1e-12

    def test_trace_distance_maximally_distinguishable(self):
        a = np.diag([1.0, 0.0])
        b = np.diag([0.0, 1.0])
        assert trace_distance(a, b) == pytest.approx(1.0, abs=1e-12)

    @given(seed=SEEDED_STATES)
    @settings(max_examples=25, deadline=None)
    def test_trace_distance_triangle(self, seed):
        r = np.random.default_rng(seed)
        a, b, c = (random_density_matrix(4, r) for _ in range(3))
        assert trace_distance(a, c) <= (
            trace_distance(a, b) + trace_distance(b, c) + 1e-12)


class TestNamedStates:
    def test_bell_state_vector(self):
        assert np.allclose(bell_state(),
                           np.array([1, 0, 0, 1]) / np.sqrt(2))

    def test_bell_projector_is_pure(self):
        rho = bell_projector()
        check_density_matrix(rho)
        assert purity(rho) == pytest.approx(1.0, abs=1e-14)

    def test_werner_interpolates(self):
        assert np.allclose(werner_state(1.0), bell_projector())
        assert np.allclose(werner_state(0.0), np.eye(4) / 4)

    def test_werner_purity(self):
        # purity of p Bell + (1-p) I/4 is p^2 + (1 - p^2)/4
        p = 0.93
        assert purity(werner_state(p)) == pytest.approx(
            p * p + (1 - p * p) / 4, abs=1e-12)

    @given(seed=SEEDED_STATES)
    @settings(max_examples=50, deadline=None)
    def test_random_density_matrix_is_physical(self, seed):
        rho = random_density_matrix(4, np.random.default_rng(seed))
        check_density_matrix(rho)


class TestSerialization:
    def test_json_round_trip(self, random_states):
        for rho in random_states:
            back = density_matrix_from_json(density_matrix_to_json(rho))
            assert np.array_equal(back, rho)

    def test_json_fields(self, bell_rho):
        obj = density_matrix_to_json(bell_rho)
        assert obj["dim"] == 4
        assert len(obj["re"]) == 4 and len(obj["im"]) == 4
