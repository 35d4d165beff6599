"""Scikit-learn style estimators wrapping the tomography methods.

Every estimator consumes a measurement dataset in ``fit`` and exposes the
reconstructed state as ``density_matrix_`` afterwards, so the five methods
(linear inversion, MLE and the three RBM families plus the POVM ansatz) are
interchangeable in benchmarking code.  Hyperparameters follow sklearn
conventions (constructor args only, ``get_params``/``set_params`` work, and
fitted attributes carry a trailing underscore).
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from . import rbm
from .bell import BellCurve, bell_curve, default_theta_grid
from .data import (
    CountsDataset,
    MultiBasisDataset,
    coarse_grain_counts_pauli6_to_pauli4,
    counts_to_distribution,
    multibasis_to_pauli6,
)
from .linalg import min_eigenvalue, purity
from .mle import MleConfig, mle_fit
from .povm import (
    OutcomeDistribution,
    dual_frame,
    linear_reconstruct,
    make_product_povm,
)


def _as_counts(X, target_kind: str | None = None) -> CountsDataset:
    """Normalize the accepted dataset types down to a CountsDataset."""
    if isinstance(X, MultiBasisDataset):
        X = multibasis_to_pauli6(X)
    if not isinstance(X, CountsDataset):
        raise TypeError(f"expected a counts dataset, got {type(X).__name__}")
    if target_kind == "pauli4" and X.povm_kind == "pauli6":
        X = coarse_grain_counts_pauli6_to_pauli4(X)
    return X


class _StateEstimatorMixin:
    """Shared helpers for anything that ends up with a ``density_matrix_``."""

    def predict_bell(self, thetas=None) -> BellCurve:
        if thetas is None:
            thetas = default_theta_grid()
        return bell_curve(self.density_matrix_, thetas,
                          source=type(self).__name__)

    @property
    def min_eig_(self) -> float:
        return min_eigenvalue(self.density_matrix_)

    @property
    def purity_(self) -> float:
        return purity(self.density_matrix_)


class LinearInversionEstimator(BaseEstimator, _StateEstimatorMixin):
    """Linear tomographic reconstruction rho = sum_a P(a) Q_a.

    Pauli-6 input is coarse-grained to pauli4 first (its overlap matrix is
    singular).  The result may be indefinite; inspect ``eigenvalues_``.
    """

    def fit(self, X, y=None):
        c = _as_counts(X, target_kind="pauli4")
        povm = make_product_povm(c.povm_kind, c.n_qubits)
        frame = dual_frame(povm)
        rec = linear_reconstruct(counts_to_distribution(c), frame)
        self.povm_kind_ = c.povm_kind
        self.density_matrix_ = rec.rho
        self.eigenvalues_ = rec.eigenvalues
        self.physical_ = rec.physical
        return self


class MaximumLikelihoodEstimator(BaseEstimator, _StateEstimatorMixin):
    """MLE over physical states via the rho = A^dag A / tr parameterization."""

    def __init__(self, max_iters: int = 50_000, tol: float = 1e-10,
                 seed: int = 0):
        self.max_iters = max_iters
        self.tol = tol
        self.seed = seed

    def fit(self, X, y=None):
        c = _as_counts(X)
        povm = make_product_povm(c.povm_kind, c.n_qubits)
        cfg = MleConfig(max_iters=self.max_iters, tol=self.tol, seed=self.seed)
        rho, report = mle_fit(c, povm, cfg)
        self.density_matrix_ = rho
        self.report_ = report
        return self


class PovmRbmEstimator(BaseEstimator, _StateEstimatorMixin):
    """POVM ansatz: a multinomial RBM fit to the outcome distribution.

    ``density_matrix_`` is obtained by linear inversion of the learned
    model distribution (and is therefore not guaranteed positive).
    """

    def __init__(self, n_hidden: int = 3, mode: str = "exact_gradient",
                 k: int = 10, learning_rate: float = 0.05,
                 epochs: int = 20_000, batch_size: int = 100,
                 tol: float = 1e-9, seed: int = 0):
        self.n_hidden = n_hidden
        self.mode = mode
        self.k = k
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.batch_size = batch_size
        self.tol = tol
        self.seed = seed

    def fit(self, X, y=None):
        if isinstance(X, OutcomeDistribution):
            dist = X
        else:
            dist = counts_to_distribution(_as_counts(X, target_kind="pauli4"))
        cfg = rbm.TrainConfig(mode=self.mode, k=self.k,
                              learning_rate=self.learning_rate,
                              epochs=self.epochs, batch_size=self.batch_size,
                              seed=self.seed, tol=self.tol)
        self.model_, self.loss_trace_ = rbm.train_povm_rbm(
            dist, self.n_hidden, cfg)
        self.distribution_ = rbm.povm_rbm_distribution(self.model_)
        frame = dual_frame(make_product_povm(dist.kind, dist.n_qubits))
        self.density_matrix_ = linear_reconstruct(self.distribution_, frame).rho
        self.final_kl_ = float(self.loss_trace_[-1])
        return self


class PurificationEstimator(BaseEstimator, _StateEstimatorMixin):
    """Latent-space purification ansatz trained on 9-basis Pauli data."""

    couple_ancilla = True

    def __init__(self, n_anc: int = 2, n_hidden: int = 3,
                 learning_rate: float = 0.05, epochs: int = 20_000,
                 tol: float = 1e-9, n_restarts: int = 3, seed: int = 0):
        self.n_anc = n_anc
        self.n_hidden = n_hidden
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.tol = tol
        self.n_restarts = n_restarts
        self.seed = seed

    def fit(self, X, y=None):
        cfg = rbm.TrainConfig(learning_rate=self.learning_rate,
                              epochs=self.epochs, seed=self.seed, tol=self.tol,
                              n_restarts=self.n_restarts)
        self.model_, self.loss_trace_ = rbm.train_purification(
            X, arch=(self.n_anc, self.n_hidden), cfg=cfg,
            couple_ancilla=self.couple_ancilla)
        self.density_matrix_ = rbm.rho_from_model(self.model_)
        return self

    def predict_basis_distribution(self, basis: str) -> np.ndarray:
        return rbm.rotated_born_distribution(self.model_, basis)


class PureStateEstimator(PurificationEstimator):
    """Purification ansatz with system-ancilla couplings removed."""

    couple_ancilla = False


class PositiveRealEstimator(BaseEstimator, _StateEstimatorMixin):
    """Real non-negative wavefunction ansatz; trains on z-basis data only."""

    def __init__(self, n_hidden: int = 3, learning_rate: float = 0.05,
                 epochs: int = 20_000, tol: float = 1e-9,
                 n_restarts: int = 1, seed: int = 0):
        self.n_hidden = n_hidden
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.tol = tol
        self.n_restarts = n_restarts
        self.seed = seed

    def fit(self, X, y=None):
        cfg = rbm.TrainConfig(learning_rate=self.learning_rate,
                              epochs=self.epochs, seed=self.seed, tol=self.tol,
                              n_restarts=self.n_restarts)
        self.model_, self.loss_trace_ = rbm.train_positive_real(
            X, n_hidden=self.n_hidden, cfg=cfg)
        self.density_matrix_ = rbm.rho_from_model(self.model_)
        return self

    def predict_basis_distribution(self, basis: str) -> np.ndarray:
        return rbm.rotated_born_distribution(self.model_, basis)
