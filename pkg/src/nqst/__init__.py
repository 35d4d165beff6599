"""Neural-network quantum state tomography benchmarks for few-qubit systems.

Builds tomographically complete POVMs, reconstructs two-qubit density
matrices by linear inversion, maximum likelihood and four RBM-based
variational ansaetze, simulates noisy two-photon measurements, and scores
every method by its predicted CHSH Bell curve and KL divergence to the data.
"""

__version__ = "0.1.0"

from .linalg import (
    bell_projector,
    bell_state,
    eig_herm,
    fidelity,
    partial_trace_ancilla,
    purity,
    random_density_matrix,
    tensor_product,
    werner_state,
)
from .povm import (
    OutcomeDistribution,
    ProductPovm,
    SingleQubitPovm,
    coarse_grain_pauli6_to_pauli4,
    dual_frame,
    expectation_from_distribution,
    linear_reconstruct,
    make_product_povm,
    make_single_povm,
    outcome_probabilities,
    overlap_matrix,
)
from .data import (
    CountsDataset,
    MultiBasisDataset,
    NoiseModel,
    bootstrap_resample,
    counts_to_distribution,
    multibasis_to_pauli6,
    sample_outcomes,
    simulate_experiment,
)
from .mle import MleConfig, mle_fit
from .rbm import (
    PovmRbmModel,
    PurificationModel,
    RbmParams,
    TrainConfig,
    gradient_check,
    kl_divergence,
    povm_rbm_distribution,
    purification_wavefunction,
    rho_from_model,
    rotated_born_distribution,
    train_positive_real,
    train_povm_rbm,
    train_purification,
)
from .bell import (
    BellCounts,
    BellCurve,
    bell_curve,
    bell_from_counts,
    bell_parameter,
    correlation,
    simulate_bell_measurement,
)
from .estimators import (
    LinearInversionEstimator,
    MaximumLikelihoodEstimator,
    PositiveRealEstimator,
    PovmRbmEstimator,
    PureStateEstimator,
    PurificationEstimator,
)
