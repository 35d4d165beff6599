"""Maximum likelihood density-matrix estimation.

The state is parameterized as rho = A^dag A / tr(A^dag A) for an
unconstrained complex matrix A, which guarantees positivity and unit trace
by construction.  The (count-weighted, normalized) log-likelihood

    L(A) = sum_a (n_a / N) * ln tr[rho M_a]

is maximized by gradient ascent with a backtracking/expanding step so that
accepted steps never decrease L.  Normalizing by the total count makes the
optimum and the stopping rule invariant under rescaling the counts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import CountsDataset
from .povm import ProductPovm

_PROB_FLOOR = 1e-15  # guards ln() against exactly-zero model probabilities


@dataclass(frozen=True)
class MleConfig:
    max_iters: int = 50_000
    tol: float = 1e-10          # on the change of the normalized log-likelihood
    init_scale: float = 1e-2    # size of the seeded perturbation around identity
    step0: float = 0.1
    step_grow: float = 1.2
    step_shrink: float = 0.5
    max_backtracks: int = 60
    seed: int = 0

    def __post_init__(self):
        if self.tol <= 0 or self.max_iters < 1:
            raise ValueError("tol must be > 0 and max_iters >= 1")


@dataclass(frozen=True)
class MleReport:
    loglik: float       # final sum_a n_a ln tr[rho M_a]
    iters: int
    converged: bool
    min_eig: float

    def to_json(self) -> dict:
        return {"loglik": self.loglik, "iters": self.iters,
                "converged": self.converged, "min_eig": self.min_eig}


def _rho_from_a(a: np.ndarray) -> np.ndarray:
    b = a.conj().T @ a
    return b / np.real(np.trace(b))


def loglik_and_grad(a: np.ndarray, mats: np.ndarray, weights: np.ndarray):
    """Normalized log-likelihood and its conjugate-Wirtinger gradient in A.

    ``weights`` are the relative frequencies n_a / N.  The returned gradient
    G satisfies dL = 2 Re tr[G^dag dA], i.e. the ascent direction for the
    real parameterization (Re A, Im A) is (2 Re G, 2 Im G).
    """
    b = a.conj().T @ a
    t = np.real(np.trace(b))
    raw = np.real(np.einsum("kij,ji->k", mats, b))  # t * p_a
    p = np.maximum(raw / t, _PROB_FLOOR)
    ll = float(weights @ np.log(p))
    # d tr[A^dag A M] / dA* = (A M); d t / dA* = A
    coeff = weights / np.maximum(raw, _PROB_FLOOR * t)
    g = np.einsum("k,kij->ij", coeff, np.einsum("il,klj->kij", a, mats))
    g -= a * (weights.sum() / t)
    return ll, g


def mle_fit(c: CountsDataset, povm: ProductPovm, cfg: MleConfig = MleConfig()):
    """Fit a physical density matrix to counts by maximum likelihood.

    Returns ``(rho, report)``.  If the optimizer does not converge within
    ``max_iters`` the best iterate is returned with ``converged=False``.
    """
    if c.total <= 0:
        raise ValueError("dataset has zero total count")
    if c.povm_kind != povm.kind or c.n_qubits != povm.n_qubits:
        raise ValueError("dataset does not match the POVM")

    weights = c.counts / c.total
    mats = povm.elements
    d = povm.dim

    rng = np.random.default_rng(cfg.seed)
    a = np.eye(d, dtype=complex) + cfg.init_scale * (
        rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)))

    ll, g = loglik_and_grad(a, mats, weights)
    step = cfg.step0
    converged = False
    iters = 0
    for iters in range(1, cfg.max_iters + 1):
        accepted = False
        for _ in range(cfg.max_backtracks):
            a_new = a + step * g
            ll_new, g_new = loglik_and_grad(a_new, mats, weights)
            if ll_new >= ll:
                accepted = True
                break
            step *= cfg.step_shrink
        if not accepted:
            converged = True  # no ascent direction at working precision
            break
        delta = ll_new - ll
        a, ll, g = a_new, ll_new, g_new
        step *= cfg.step_grow
        if delta < cfg.tol:
            converged = True
            break

    rho = _rho_from_a(a)
    min_eig = float(np.linalg.eigvalsh(rho)[0])
    report = MleReport(loglik=ll * c.total, iters=iters,
                       converged=converged, min_eig=min_eig)
    return rho, report
