"""Cross-method scoring: per-basis KL divergences and Bell-curve deviations.

The headline figure of merit is the average KL divergence over the 9 Pauli
product bases between the measured per-setting distributions and the
distributions predicted by each reconstructed state.  For indefinite states
(linear inversion of noisy data) the predicted basis probabilities may dip
below zero; they are clipped and renormalized before entering the KL.
"""

from __future__ import annotations

import numpy as np

from .bell import BellCurve, bell_curve, default_theta_grid
from .data import (
    CountsDataset,
    MultiBasisDataset,
    coarse_grain_counts_pauli6_to_pauli4,
    counts_to_distribution,
    multibasis_to_pauli6,
)
from .linalg import bell_state, min_eigenvalue, pure_state_overlap, purity
from .povm import pauli_basis_probabilities
from .rbm import PAULI_BASES_2Q, kl_divergence, kl_from_arrays

_PROB_CLIP = 1e-12


def basis_probabilities_clipped(rho: np.ndarray, basis: str) -> np.ndarray:
    """Projective basis probabilities, clipped at zero and renormalized."""
    p = np.clip(pauli_basis_probabilities(rho, basis), 0.0, None)
    s = p.sum()
    if s <= 0:
        raise ValueError("state assigns no weight to any outcome")
    return p / s


def average_pauli_kl(predict, data: MultiBasisDataset,
                     floor: float = _PROB_CLIP) -> float:
    """Mean over the 9 bases of D_KL(measured || predicted).

    ``predict`` is either a two-qubit density matrix or a callable mapping a
    basis string to a 4-outcome distribution.  Predicted probabilities are
    floored at ``floor`` (then renormalized) so that a single empty model
    bin yields a large but finite score.
    """
    if callable(predict):
        fn = predict
    else:
        rho = np.asarray(predict, dtype=complex)
        fn = lambda basis: basis_probabilities_clipped(rho, basis)
    total = 0.0
    for basis in PAULI_BASES_2Q:
        q = np.maximum(np.asarray(fn(basis), dtype=float), floor)
        q = q / q.sum()
        total += kl_from_arrays(data.setting_distribution(basis), q)
    return total / len(PAULI_BASES_2Q)


def pauli4_kl(model_distribution, data: MultiBasisDataset) -> float:
    """KL between the empirical pauli4 distribution and a model's native one."""
    emp = counts_to_distribution(
        coarse_grain_counts_pauli6_to_pauli4(multibasis_to_pauli6(data)))
    return kl_divergence(emp, model_distribution)


def method_report(estimator, data: MultiBasisDataset,
                  reference_curve: BellCurve | None = None,
                  thetas=None) -> dict:
    """Scorecard for one fitted estimator: KL, Bell deviation, spectrum."""
    if thetas is None:
        thetas = (reference_curve.thetas if reference_curve is not None
                  else default_theta_grid())
    rho = estimator.density_matrix_
    row = {
        "avg_pauli6_kl": average_pauli_kl(rho, data),
        "min_eig": min_eigenvalue(rho),
        "purity": purity(rho),
        "bell_state_fidelity": pure_state_overlap(rho, bell_state()),
    }
    curve = bell_curve(rho, thetas)
    row["bell_max"] = float(np.max(np.abs(curve.values)))
    if reference_curve is not None:
        row["bell_max_deviation"] = curve.max_deviation(reference_curve)
    if hasattr(estimator, "distribution_"):
        # POVM ansatz: also score on its native (coarse-grained) space.
        row["pauli4_kl"] = pauli4_kl(estimator.distribution_, data)
    return row


def compare_estimators(fitted: dict, data: MultiBasisDataset,
                       reference_rho: np.ndarray | None = None,
                       thetas=None) -> dict:
    """Scorecards for a name -> fitted-estimator mapping.

    If a reference state is given its Bell curve is the deviation baseline.
    """
    if thetas is None:
        thetas = default_theta_grid()
    ref_curve = (bell_curve(reference_rho, thetas, source="reference")
                 if reference_rho is not None else None)
    return {name: method_report(est, data, ref_curve, thetas)
            for name, est in fitted.items()}
