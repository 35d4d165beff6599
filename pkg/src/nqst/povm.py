"""Tomographically complete POVMs, outcome probabilities and linear inversion.

Three single-qubit measurements are supported, addressed by the exact kind
strings ``"pauli6"``, ``"pauli4"`` and ``"tetra"``:

* pauli6 — the six sub-normalized Pauli eigenprojectors (1/3)|s_alpha><s_alpha|
  in canonical order (+x, -x, +y, -y, +z, -z),
* pauli4 — the minimal variant obtained by merging the three -1 outcomes
  into a single element M_3 = I - M_0 - M_1 - M_2,
* tetra — sub-normalized projectors (I + s_a.sigma)/4 onto the corners of a
  regular tetrahedron on the Bloch sphere.

Multi-qubit POVMs are products of a single-qubit POVM; outcomes are indexed
lexicographically with qubit 1 as the slowest index.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .linalg import SI, SX, SY, SZ, check_hermitian, kron_all

POVM_KINDS = ("pauli6", "pauli4", "tetra")

# Bloch vectors of the tetrahedral POVM.
TETRA_VECTORS = np.array(
    [
        [0.0, 0.0, 1.0],
        [2.0 * np.sqrt(2.0) / 3.0, 0.0, -1.0 / 3.0],
        [-np.sqrt(2.0) / 3.0, np.sqrt(2.0 / 3.0), -1.0 / 3.0],
        [-np.sqrt(2.0) / 3.0, -np.sqrt(2.0 / 3.0), -1.0 / 3.0],
    ]
)


class SingularOverlapError(ValueError):
    pass


def _bloch_projector(v) -> np.ndarray:
    """Projector onto the +1 eigenstate of v.sigma for a unit vector v."""
    return (SI + v[0] * SX + v[1] * SY + v[2] * SZ) / 2.0


@dataclass(frozen=True)
class SingleQubitPovm:
    kind: str
    elements: np.ndarray  # (n_outcomes, 2, 2) complex

    @property
    def n_outcomes(self) -> int:
        return self.elements.shape[0]


@dataclass(frozen=True)
class ProductPovm:
    """N-fold tensor product of a single-qubit POVM."""

    single: SingleQubitPovm
    n_qubits: int
    elements: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("need at least one qubit")
        k = self.single.n_outcomes
        elems = np.empty((k**self.n_qubits, 2**self.n_qubits, 2**self.n_qubits),
                         dtype=complex)
        for i, idx in enumerate(itertools.product(range(k), repeat=self.n_qubits)):
            elems[i] = kron_all([self.single.elements[a] for a in idx])
        object.__setattr__(self, "elements", elems)

    @property
    def kind(self) -> str:
        return self.single.kind

    @property
    def n_outcomes(self) -> int:
        return self.single.n_outcomes**self.n_qubits

    @property
    def dim(self) -> int:
        return 2**self.n_qubits

    def outcome_tuples(self):
        return itertools.product(range(self.single.n_outcomes), repeat=self.n_qubits)

    def index_of(self, outcome) -> int:
        """Flat index of an outcome tuple; qubit 1 is the slowest index."""
        k = self.single.n_outcomes
        i = 0
        for a in outcome:
            i = i * k + a
        return i


@dataclass(frozen=True)
class OutcomeDistribution:
    """P(a) = tr[rho M_a] over all outcome tuples, lexicographic order.

    ``clipped_mass`` records negative probability mass that was clipped at
    -1e-12; larger negatives (from badly unphysical states) are preserved
    in ``probs`` and flagged via ``unphysical``.
    """

    kind: str
    n_qubits: int
    probs: np.ndarray
    unphysical: bool = False
    clipped_mass: float = 0.0

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        object.__setattr__(self, "probs", p)
        if not self.unphysical and abs(p.sum() - 1.0) > 1e-9:
            raise ValueError(f"probabilities sum to {p.sum()}, expected 1")


def make_single_povm(kind: str) -> SingleQubitPovm:
    """Build one of the three canonical single-qubit POVMs."""
    if kind == "pauli6":
        elems = []
        for vec in ([1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]):
            elems.append(_bloch_projector(np.array(vec, dtype=float)) / 3.0)
        return SingleQubitPovm(kind, np.array(elems))
    if kind == "pauli4":
        m0 = _bloch_projector(np.array([1.0, 0.0, 0.0])) / 3.0
        m1 = _bloch_projector(np.array([0.0, 1.0, 0.0])) / 3.0
        m2 = _bloch_projector(np.array([0.0, 0.0, 1.0])) / 3.0
        m3 = SI - m0 - m1 - m2
        return SingleQubitPovm(kind, np.array([m0, m1, m2, m3]))
    if kind == "tetra":
        elems = [(SI + s[0] * SX + s[1] * SY + s[2] * SZ) / 4.0 for s in TETRA_VECTORS]
        return SingleQubitPovm(kind, np.array(elems))
    raise ValueError(f"unknown POVM kind {kind!r}; expected one of {POVM_KINDS}")


def make_product_povm(kind: str, n_qubits: int) -> ProductPovm:
    return ProductPovm(make_single_povm(kind), n_qubits)


def outcome_probabilities(rho: np.ndarray, povm: ProductPovm) -> OutcomeDistribution:
    """P(a) = tr[rho M_a].

    Tiny negatives (>= -1e-12, rounding noise) are clipped to zero.  Larger
    negatives signal an unphysical rho; they are kept and the distribution
    is flagged so the linear-reconstruction pathway can still consume it.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (povm.dim, povm.dim):
        raise ValueError("dimension mismatch between state and POVM")
    p = np.real(np.einsum("aij,ji->a", povm.elements, rho))
    unphysical = bool(np.any(p < -1e-9))
    clip_mask = (p < 0) & (p >= -1e-12)
    clipped = float(-p[clip_mask].sum())
    p = np.where(clip_mask, 0.0, p)
    return OutcomeDistribution(povm.kind, povm.n_qubits, p,
                               unphysical=unphysical, clipped_mass=clipped)


def overlap_matrix(povm: SingleQubitPovm) -> np.ndarray:
    """Gram matrix T[a, a'] = tr[M_a M_a'] of a single-qubit POVM."""
    if povm.kind == "pauli6":
        raise SingularOverlapError(
            "overinformative POVM has singular overlap; coarse-grain to pauli4 first"
        )
    e = povm.elements
    t = np.real(np.einsum("aij,bji->ab", e, e))
    return t


@dataclass(frozen=True)
class DualFrame:
    """Dual operators Q_a with sum_a tr[X Q_a] M_a = X for Hermitian X.

    Built on the single-qubit level as Q_a = sum_a' inv(T)[a, a'] M_a' and
    tensor-factored across qubits (the overlap matrix of a product POVM
    factorizes).
    """

    povm: ProductPovm
    single_duals: np.ndarray  # (k, 2, 2)
    duals: np.ndarray         # (k**n, d, d)
    condition_number: float


def dual_frame(povm: ProductPovm) -> DualFrame:
    t = overlap_matrix(povm.single)
    cond = float(np.linalg.cond(t))
    tinv = np.linalg.inv(t)
    sd = np.einsum("ab,bij->aij", tinv, povm.single.elements)
    k = povm.single.n_outcomes
    duals = np.empty_like(povm.elements)
    for i, idx in enumerate(itertools.product(range(k), repeat=povm.n_qubits)):
        duals[i] = kron_all([sd[a] for a in idx])
    return DualFrame(povm, sd, duals, cond)


@dataclass(frozen=True)
class LinearReconstruction:
    rho: np.ndarray
    eigenvalues: np.ndarray  # descending
    min_eig: float

    @property
    def physical(self) -> bool:
        return self.min_eig >= -1e-10


def linear_reconstruct(p: OutcomeDistribution, frame: DualFrame) -> LinearReconstruction:
    """rho = sum_a P(a) Q_a.

    The result is Hermitian with unit trace but may be indefinite for noisy
    data; it is returned unmodified together with its spectrum.
    """
    povm = frame.povm
    if p.kind != povm.kind or p.n_qubits != povm.n_qubits:
        raise ValueError("distribution does not match the frame's outcome space")
    rho = np.einsum("a,aij->ij", p.probs, frame.duals)
    rho = (rho + rho.conj().T) / 2.0  # remove rounding-level anti-Hermitian part
    w = np.sort(np.linalg.eigvalsh(rho))[::-1]
    return LinearReconstruction(rho, w, float(w[-1]))


# Per-qubit map from pauli6 outcome index to pauli4 outcome index:
# +x, +y, +z keep their basis slot; all three down outcomes merge into 3.
_P6_TO_P4 = np.array([0, 3, 1, 3, 2, 3])


def coarse_grain_pauli6_to_pauli4(p: OutcomeDistribution) -> OutcomeDistribution:
    """Merge the three per-qubit -1 outcomes of pauli6 into pauli4's M_3."""
    if p.kind != "pauli6":
        raise ValueError(f"expected a pauli6 distribution, got {p.kind!r}")
    n = p.n_qubits
    out = np.zeros(4**n)
    for i, idx in enumerate(itertools.product(range(6), repeat=n)):
        j = 0
        for a in idx:
            j = j * 4 + _P6_TO_P4[a]
        out[j] += p.probs[i]
    return OutcomeDistribution("pauli4", n, out,
                               unphysical=p.unphysical, clipped_mass=p.clipped_mass)


def expectation_from_distribution(obs: np.ndarray, p: OutcomeDistribution,
                                  frame: DualFrame) -> float:
    """<O> = sum_a P(a) tr[O Q_a] for a Hermitian observable O."""
    obs = check_hermitian(obs)
    povm = frame.povm
    if obs.shape != (povm.dim, povm.dim):
        raise ValueError("observable dimension does not match the frame")
    if p.kind != povm.kind or p.n_qubits != povm.n_qubits:
        raise ValueError("distribution does not match the frame's outcome space")
    coeff = np.real(np.einsum("ij,aji->a", obs, frame.duals))
    return float(coeff @ p.probs)


# --- Pauli product-basis probabilities ---------------------------------------

# Rows are the measurement-basis bras: x -> (|0>+|1>)/sqrt2, (|0>-|1>)/sqrt2;
# y -> (|0>+i|1>)/sqrt2 conjugated, z -> computational.
_BASIS_BRAS = {
    "x": np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / np.sqrt(2.0),
    "y": np.array([[1.0, -1.0j], [1.0, 1.0j]], dtype=complex) / np.sqrt(2.0),
    "z": np.eye(2, dtype=complex),
}

PAULI_BASES_2Q = tuple(a + b for a in "xyz" for b in "xyz")


def basis_rotation(basis: str) -> np.ndarray:
    """Unitary whose rows are the product-basis bras for a string like "xz"."""
    try:
        return kron_all([_BASIS_BRAS[c] for c in basis])
    except KeyError:
        raise ValueError(f"invalid basis string {basis!r}") from None


def pauli_basis_probabilities(rho: np.ndarray, basis: str) -> np.ndarray:
    """Projective outcome probabilities of rho in a Pauli product basis.

    Outcome order is lexicographic in (up=0, down=1) per qubit, qubit 1
    slowest.  For indefinite rho the entries may be negative; callers that
    need a proper distribution must clip.
    """
    u = basis_rotation(basis)
    return np.real(np.einsum("oi,ij,oj->o", u, np.asarray(rho, dtype=complex),
                             u.conj()))
