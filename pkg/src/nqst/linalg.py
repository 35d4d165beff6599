"""Dense complex linear algebra for few-qubit states.

Everything here works on plain numpy arrays: operators are complex
``(d, d)`` matrices and pure states are complex ``(d,)`` vectors with
``d = 2**n_qubits``.  Density matrices are validated to be Hermitian with
unit trace; positivity is deliberately *not* enforced because linear
tomographic reconstruction can legitimately produce indefinite matrices.
"""

from __future__ import annotations

import numpy as np

# Pauli matrices and the single-qubit identity.
SI = np.eye(2, dtype=complex)
SX = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SY = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SZ = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
PAULIS = (SX, SY, SZ)

# Construction-time tolerance for Hermiticity / trace, and the looser one
# used when verifying inputs that went through longer numerical pipelines.
CONSTRUCT_TOL = 1e-12
VERIFY_TOL = 1e-10


class NotHermitianError(ValueError):
    pass


class UnphysicalStateError(ValueError):
    """A state failed a positivity requirement beyond rounding noise."""


def check_square(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m.view(float))):
        raise ValueError("matrix has non-finite entries")
    return m


def check_hermitian(m: np.ndarray, tol: float = VERIFY_TOL) -> np.ndarray:
    m = check_square(m)
    dev = np.max(np.abs(m - m.conj().T))
    if dev > tol:
        raise NotHermitianError(f"matrix is not Hermitian (max deviation {dev:.3e})")
    return m


def check_density_matrix(rho: np.ndarray, tol: float = CONSTRUCT_TOL) -> np.ndarray:
    """Validate Hermiticity and unit trace. Positivity is not required."""
    rho = check_hermitian(rho, tol)
    tr = np.trace(rho)
    if abs(tr - 1.0) > tol:
        raise ValueError(f"trace is {tr}, expected 1 within {tol}")
    d = rho.shape[0]
    if d & (d - 1) != 0:
        raise ValueError(f"dimension {d} is not a power of two")
    return rho


def check_pure_state(psi: np.ndarray, tol: float = CONSTRUCT_TOL) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1:
        raise ValueError("pure state must be a vector")
    nrm = np.linalg.norm(psi)
    if abs(nrm - 1.0) > tol:
        raise ValueError(f"state norm is {nrm}, expected 1 within {tol}")
    return psi


def tensor_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product of two operators."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def kron_all(mats) -> np.ndarray:
    """Kronecker product of a sequence of operators, left to right."""
    out = np.asarray(mats[0], dtype=complex)
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


def partial_trace_ancilla(psi: np.ndarray, n_sys: int, n_anc: int) -> np.ndarray:
    """Trace the trailing ``n_anc`` qubits out of a pure state.

    rho[s, s'] = sum_a psi[s, a] * conj(psi[s', a]) with the state reshaped
    as a (system, ancilla) matrix.  The result is PSD with unit trace by
    construction.
    """
    psi = np.asarray(psi, dtype=complex)
    ds, da = 2**n_sys, 2**n_anc
    if psi.shape != (ds * da,):
        raise ValueError(
            f"state has dimension {psi.shape}, expected ({ds * da},) "
            f"for {n_sys}+{n_anc} qubits"
        )
    m = psi.reshape(ds, da)
    return m @ m.conj().T


def eig_herm(m: np.ndarray, tol: float = VERIFY_TOL):
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    Returns ``(w, v)`` with ``m = v @ diag(w) @ v.conj().T``.
    """
    m = check_hermitian(m, tol)
    w, v = np.linalg.eigh(m)
    order = np.argsort(w)[::-1]
    return w[order], v[:, order]


def min_eigenvalue(m: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(check_square(m))[0])


def _psd_sqrt(rho: np.ndarray, neg_tol: float = 1e-6) -> np.ndarray:
    w, v = eig_herm(rho)
    if w[-1] < -neg_tol:
        raise UnphysicalStateError(
            f"matrix has eigenvalue {w[-1]:.3e} < -{neg_tol:.0e}; "
            "not a physical state"
        )
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Uhlmann fidelity F = (tr sqrt(sqrt(rho) sigma sqrt(rho)))**2.

    Both inputs must be positive semi-definite up to rounding noise;
    eigenvalues in [-1e-10, 0) are clipped, anything below -1e-6 raises
    :class:`UnphysicalStateError`.
    """
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    if rho.shape != sigma.shape:
        raise ValueError("dimension mismatch")
    sr = _psd_sqrt(rho)
    inner = sr @ sigma @ sr
    w = np.linalg.eigvalsh((inner + inner.conj().T) / 2.0)
    if w[0] < -1e-6:
        raise UnphysicalStateError("second argument is not positive semi-definite")
    f = float(np.sum(np.sqrt(np.clip(w, 0.0, None))) ** 2)
    return min(f, 1.0) if f <= 1.0 + 1e-9 else f


def pure_state_overlap(rho: np.ndarray, psi: np.ndarray) -> float:
    """<psi|rho|psi>, valid even for indefinite rho (unlike fidelity)."""
    psi = np.asarray(psi, dtype=complex)
    return float(np.real(psi.conj() @ np.asarray(rho, dtype=complex) @ psi))


def purity(rho: np.ndarray) -> float:
    rho = np.asarray(rho, dtype=complex)
    return float(np.real(np.trace(rho @ rho)))


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    w = np.linalg.eigvalsh(np.asarray(rho) - np.asarray(sigma))
    return float(0.5 * np.sum(np.abs(w)))


# --- reference states -------------------------------------------------------

def bell_state() -> np.ndarray:
    """(|00> + |11>)/sqrt(2)."""
    psi = np.zeros(4, dtype=complex)
    psi[0] = psi[3] = 1.0 / np.sqrt(2.0)
    return psi


def bell_projector() -> np.ndarray:
    psi = bell_state()
    return np.outer(psi, psi.conj())


def werner_state(p: float) -> np.ndarray:
    """p * |Bell><Bell| + (1-p) * I/4."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("mixing parameter must be in [0, 1]")
    return p * bell_projector() + (1.0 - p) * np.eye(4, dtype=complex) / 4.0


def random_pure_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    psi = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return psi / np.linalg.norm(psi)


def random_density_matrix(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Full-rank random state from the Ginibre ensemble, G G^dag / tr."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    m = g @ g.conj().T
    return m / np.trace(m).real


# --- serialization ----------------------------------------------------------

def density_matrix_to_json(rho: np.ndarray) -> dict:
    rho = np.asarray(rho, dtype=complex)
    return {
        "dim": rho.shape[0],
        "re": rho.real.tolist(),
        "im": rho.imag.tolist(),
    }


def density_matrix_from_json(obj: dict) -> np.ndarray:
    d = int(obj["dim"])
    rho = np.array(obj["re"], dtype=float) + 1j * np.array(obj["im"], dtype=float)
    if rho.shape != (d, d):
        raise ValueError("dim field inconsistent with matrix shape")
    return rho
