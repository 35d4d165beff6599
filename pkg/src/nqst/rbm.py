"""RBM-based variational ansaetze for state reconstruction.

Four ansaetze are implemented on top of a shared restricted-Boltzmann-machine
building block:

* POVM ansatz — a multinomial RBM with one-hot visible blocks (4 units per
  qubit) models the POVM outcome distribution Q(a) directly,
* purification ansatz — a pure state on system + ancilla qubits whose
  partial trace is the (positive by construction) density matrix; modulus
  and phase of the wavefunction are encoded by two separate real RBMs,
* pure-state ansatz — the same with all couplings that touch the ancilla
  units removed, which forces a product across the system|ancilla cut,
* positive-real ansatz — amplitude network only, no ancillas, trained on
  computational-basis data alone.

All training at this scale uses exact full-enumeration gradients by default
(gradient descent with a backtracking/expanding step, so the loss is
non-increasing); contrastive divergence (CD-k) is available for the POVM
ansatz as the scalable alternative.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import partial_trace_ancilla
from .povm import OutcomeDistribution, basis_rotation

PAULI_BASES_2Q = tuple(a + b for a in "xyz" for b in "xyz")


class TrainingDivergedError(RuntimeError):
    """Loss became NaN; carries the offending parameter snapshot."""

    def __init__(self, message: str, params: np.ndarray):
        super().__init__(message)
        self.params = params


def _sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def _softplus(x):
    return np.logaddexp(0.0, x)


def _logsumexp(x):
    m = np.max(x)
    return m + np.log(np.sum(np.exp(x - m)))


@dataclass(frozen=True)
class RbmParams:
    """Weights and biases of a binary RBM with real parameters."""

    w: np.ndarray       # (n_visible, n_hidden)
    vbias: np.ndarray   # (n_visible,)
    hbias: np.ndarray   # (n_hidden,)

    def __post_init__(self):
        for name in ("w", "vbias", "hbias"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        if self.w.shape != (self.vbias.size, self.hbias.size):
            raise ValueError("inconsistent RBM parameter shapes")
        if not all(np.all(np.isfinite(getattr(self, n))) for n in ("w", "vbias", "hbias")):
            raise ValueError("non-finite RBM parameters")

    @property
    def n_visible(self) -> int:
        return self.vbias.size

    @property
    def n_hidden(self) -> int:
        return self.hbias.size

    @property
    def n_params(self) -> int:
        return self.vbias.size + self.hbias.size + self.w.size

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.vbias, self.hbias, self.w.ravel()])

    @staticmethod
    def from_vector(x: np.ndarray, n_visible: int, n_hidden: int) -> "RbmParams":
        nv, nh = n_visible, n_hidden
        return RbmParams(w=x[nv + nh:].reshape(nv, nh),
                         vbias=x[:nv], hbias=x[nv:nv + nh])


def init_rbm(n_visible: int, n_hidden: int, rng: np.random.Generator,
             scale: float = 0.01) -> RbmParams:
    return RbmParams(w=scale * rng.standard_normal((n_visible, n_hidden)),
                     vbias=scale * rng.standard_normal(n_visible),
                     hbias=scale * rng.standard_normal(n_hidden))


def log_marginal(p: RbmParams, v: np.ndarray) -> np.ndarray:
    """ln of the hidden-marginalized Boltzmann factor, batched over rows of v.

    F(v) = v.d + sum_j softplus(b_j + v.W_j); the unnormalized marginal is
    exp(F(v)).
    """
    v = np.atleast_2d(v)
    return v @ p.vbias + _softplus(p.hbias + v @ p.w).sum(axis=1)


def marginal_grad(p: RbmParams, v: np.ndarray) -> np.ndarray:
    """dF(v)/dtheta for each config, stacked (batch, n_params).

    Column layout matches :meth:`RbmParams.to_vector`.
    """
    v = np.atleast_2d(v)
    sig = _sigmoid(p.hbias + v @ p.w)           # (B, n_h)
    gw = v[:, :, None] * sig[:, None, :]        # (B, n_v, n_h)
    return np.concatenate([v, sig, gw.reshape(v.shape[0], -1)], axis=1)


def binary_configs(n: int) -> np.ndarray:
    """All length-n bit strings, row i = bits of i, most significant first."""
    i = np.arange(2**n)
    return ((i[:, None] >> np.arange(n - 1, -1, -1)) & 1).astype(float)


def one_hot_configs(n_qubits: int, n_values: int = 4) -> np.ndarray:
    """One-hot encodings of all outcome tuples, lexicographic, qubit 1 slowest."""
    n_out = n_values**n_qubits
    v = np.zeros((n_out, n_values * n_qubits))
    idx = np.arange(n_out)
    for q in range(n_qubits):
        a = (idx // n_values**(n_qubits - 1 - q)) % n_values
        v[np.arange(n_out), q * n_values + a] = 1.0
    return v


# --- POVM ansatz --------------------------------------------------------------

@dataclass(frozen=True)
class PovmRbmModel:
    params: RbmParams
    povm_kind: str      # pauli4 or tetra
    n_qubits: int

    def __post_init__(self):
        if self.povm_kind not in ("pauli4", "tetra"):
            raise ValueError("POVM ansatz requires a 4-outcome POVM")
        if self.params.n_visible != 4 * self.n_qubits:
            raise ValueError("visible layer must have one 4-unit block per qubit")


def povm_rbm_distribution(m: PovmRbmModel) -> OutcomeDistribution:
    """Exact model distribution Q(a), normalized over all one-hot configs."""
    if m.n_qubits > 6:
        raise ValueError("outcome space too large for exact enumeration")
    v = one_hot_configs(m.n_qubits)
    f = log_marginal(m.params, v)
    q = np.exp(f - _logsumexp(f))
    q /= q.sum()
    return OutcomeDistribution(m.povm_kind, m.n_qubits, q)


def kl_divergence(p: OutcomeDistribution, q: OutcomeDistribution) -> float:
    """D_KL(P || Q); +inf if Q vanishes anywhere P does not."""
    if p.kind != q.kind or p.n_qubits != q.n_qubits:
        raise ValueError("distributions live on different outcome spaces")
    return kl_from_arrays(p.probs, q.probs)


def kl_from_arrays(p: np.ndarray, q: np.ndarray) -> float:
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError("distributions live on different outcome spaces")
    mask = p > 0
    if np.any(q[mask] <= 0):
        return float("inf")
    return float(np.sum(p[mask] * np.log(p[mask] / q[mask])))


@dataclass(frozen=True)
class TrainConfig:
    mode: str = "exact_gradient"   # or "cd_k"
    k: int = 10
    learning_rate: float = 0.05
    epochs: int = 20_000
    batch_size: int = 100          # chain count in CD mode
    seed: int = 0
    tol: float = 1e-9              # stop when the loss change falls below this
    patience: int = 25             # ... for this many consecutive steps
    n_restarts: int = 1            # independent seeded runs, keep the best

    def __post_init__(self):
        if self.mode not in ("exact_gradient", "cd_k"):
            raise ValueError(f"unknown training mode {self.mode!r}")
        if self.learning_rate <= 0 or self.epochs < 1 or (self.mode == "cd_k" and self.k < 1):
            raise ValueError("invalid training hyperparameters")


def _descend(loss_and_grad, x0: np.ndarray, cfg: TrainConfig,
             mask: np.ndarray | None = None):
    """Gradient descent with a backtracking/expanding step.

    Accepted steps never increase the loss.  Raises
    :class:`TrainingDivergedError` on NaN.
    """
    x = x0.copy()
    loss, g = loss_and_grad(x)
    if not np.isfinite(loss):
        raise TrainingDivergedError("initial loss is not finite", x)
    if mask is not None:
        g = g * mask
    step = cfg.learning_rate
    trace = [loss]
    small_steps = 0
    for _ in range(cfg.epochs):
        accepted = False
        for _ in range(60):
            x_new = x - step * g
            loss_new, g_new = loss_and_grad(x_new)
            if np.isnan(loss_new):
                raise TrainingDivergedError("loss diverged to NaN", x_new)
            if loss_new <= loss:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break
        if mask is not None:
            g_new = g_new * mask
        delta = loss - loss_new
        x, loss, g = x_new, loss_new, g_new
        trace.append(loss)
        step *= 1.1
        # Plateaus can precede further descent; only stop once the loss
        # change has stayed below tol for a stretch of steps.
        small_steps = small_steps + 1 if delta < cfg.tol else 0
        if small_steps >= cfg.patience:
            break
    return x, loss, np.array(trace)


def povm_rbm_loss_and_grad(x: np.ndarray, target: np.ndarray, n_qubits: int,
                           n_hidden: int):
    """Exact D_KL(P || Q) and its gradient for the POVM ansatz.

    grad = E_Q[stats] - E_P[stats] with stats the per-config free-energy
    gradients.
    """
    nv = 4 * n_qubits
    params = RbmParams.from_vector(x, nv, n_hidden)
    v = one_hot_configs(n_qubits)
    f = log_marginal(params, v)
    lq = f - _logsumexp(f)
    mask = target > 0
    loss = float(np.sum(target[mask] * (np.log(target[mask]) - lq[mask])))
    stats = marginal_grad(params, v)
    q = np.exp(lq)
    grad = q @ stats - target @ stats
    return loss, grad


def _gibbs_block_sweep(v: np.ndarray, params: RbmParams, n_qubits: int,
                       rng: np.random.Generator) -> np.ndarray:
    """One block-Gibbs sweep with softmax sampling inside each one-hot block."""
    ph = _sigmoid(params.hbias + v @ params.w)
    h = (rng.random(ph.shape) < ph).astype(float)
    logits = params.vbias + h @ params.w.T          # (B, n_v)
    v_new = np.zeros_like(v)
    gumbel = -np.log(-np.log(rng.random(logits.shape)))
    for q in range(n_qubits):
        block = slice(4 * q, 4 * q + 4)
        choice = np.argmax(logits[:, block] + gumbel[:, block], axis=1)
        v_new[np.arange(v.shape[0]), 4 * q + choice] = 1.0
    return v_new


def train_povm_rbm(data: OutcomeDistribution, n_hidden: int,
                   cfg: TrainConfig = TrainConfig(), seed: int | None = None):
    """Fit the POVM-RBM to a normalized outcome distribution.

    Returns ``(model, loss_trace)`` with the trace holding the exact KL
    divergence per accepted step (exact mode) or per epoch (CD mode).
    """
    if data.kind not in ("pauli4", "tetra"):
        raise ValueError("POVM ansatz requires pauli4 or tetra data")
    target = data.probs / data.probs.sum()
    n_qubits = data.n_qubits
    nv = 4 * n_qubits
    rng = np.random.default_rng(cfg.seed if seed is None else seed)
    x0 = init_rbm(nv, n_hidden, rng).to_vector()

    if cfg.mode == "exact_gradient":
        x, _, trace = _descend(
            lambda x: povm_rbm_loss_and_grad(x, target, n_qubits, n_hidden),
            x0, cfg)
        params = RbmParams.from_vector(x, nv, n_hidden)
        return PovmRbmModel(params, data.kind, n_qubits), trace

    # CD-k: exact positive phase from the target distribution, negative phase
    # from k block-Gibbs sweeps started at configurations drawn from the data.
    x = x0
    configs = one_hot_configs(n_qubits)
    trace = []
    for _ in range(cfg.epochs):
        params = RbmParams.from_vector(x, nv, n_hidden)
        stats = marginal_grad(params, configs)
        pos = target @ stats
        idx = rng.choice(len(target), size=cfg.batch_size, p=target)
        v = configs[idx]
        for _ in range(cfg.k):
            v = _gibbs_block_sweep(v, params, n_qubits, rng)
        neg = marginal_grad(params, v).mean(axis=0)
        x = x - cfg.learning_rate * (neg - pos)
        if not np.all(np.isfinite(x)):
            raise TrainingDivergedError("CD training diverged", x)
        loss, _ = povm_rbm_loss_and_grad(x, target, n_qubits, n_hidden)
        trace.append(loss)
    params = RbmParams.from_vector(x, nv, n_hidden)
    return PovmRbmModel(params, data.kind, n_qubits), np.array(trace)


# --- purification family ------------------------------------------------------

@dataclass(frozen=True)
class PurificationModel:
    """Two-network purification: Psi = sqrt(p_amp) * exp(i ln(p_phase)/2).

    ``couple_ancilla=False`` zeroes every parameter touching the ancilla
    units, which restricts the ansatz to pure system states.
    """

    n_sys: int
    n_anc: int
    amplitude: RbmParams
    phase: RbmParams
    couple_ancilla: bool = True

    def __post_init__(self):
        nv = self.n_sys + self.n_anc
        if self.amplitude.n_visible != nv or self.phase.n_visible != nv:
            raise ValueError("networks must share the (system + ancilla) visible layout")
        if not self.couple_ancilla:
            m = _ancilla_mask(self.n_sys, self.n_anc, self.amplitude.n_hidden)
            for net in (self.amplitude, self.phase):
                if np.any(net.to_vector()[m == 0.0] != 0.0):
                    raise ValueError("couple_ancilla=False requires zero ancilla parameters")

    @property
    def n_hidden(self) -> int:
        return self.amplitude.n_hidden


def _ancilla_mask(n_sys: int, n_anc: int, n_hidden: int) -> np.ndarray:
    """1 for parameters allowed to be nonzero when the ancilla is decoupled."""
    nv = n_sys + n_anc
    vb = np.ones(nv)
    vb[n_sys:] = 0.0
    w = np.ones((nv, n_hidden))
    w[n_sys:, :] = 0.0
    return np.concatenate([vb, np.ones(n_hidden), w.ravel()])


def purification_wavefunction(m: PurificationModel) -> np.ndarray:
    """Normalized wavefunction over (system, ancilla) basis states."""
    v = binary_configs(m.n_sys + m.n_anc)
    fa = log_marginal(m.amplitude, v)
    fp = log_marginal(m.phase, v)
    psi = np.exp((fa - fa.max()) / 2.0 + 0.5j * fp)
    return psi / np.linalg.norm(psi)


def rho_from_model(m: PurificationModel) -> np.ndarray:
    """Density matrix: partial trace of the purification over the ancillas."""
    return partial_trace_ancilla(purification_wavefunction(m), m.n_sys, m.n_anc)


def rotated_born_distribution(m: PurificationModel, basis: str) -> np.ndarray:
    """Model outcome probabilities of a Pauli product-basis measurement."""
    if len(basis) != m.n_sys:
        raise ValueError("basis string length must equal the system size")
    u = basis_rotation(basis)
    psi = purification_wavefunction(m).reshape(2**m.n_sys, 2**m.n_anc)
    amp = u @ psi
    return np.sum(np.abs(amp) ** 2, axis=1)


def make_multibasis_loss(basis_dists: dict, n_sys: int, n_anc: int,
                         n_hidden: int):
    """Build the summed per-basis KL loss (with exact gradient) as a closure.

    ``basis_dists`` maps basis strings (e.g. "xz") to empirical outcome
    distributions.  Parameter vector layout: amplitude params then phase
    params, each in :meth:`RbmParams.to_vector` order.  Basis rotations,
    configurations and targets are precomputed once; the returned callable
    maps a parameter vector to ``(loss, grad)``.
    """
    nv = n_sys + n_anc
    n_each = nv + n_hidden + nv * n_hidden
    ds, da = 2**n_sys, 2**n_anc
    v = binary_configs(nv)
    bases = list(basis_dists)
    u = np.stack([basis_rotation(b) for b in bases])            # (B, ds, ds)
    targets = np.stack([np.asarray(basis_dists[b], dtype=float) for b in bases])
    tmask = targets > 0
    tlogt = np.zeros_like(targets)
    tlogt[tmask] = targets[tmask] * np.log(targets[tmask])

    def loss_and_grad(x: np.ndarray):
        amp = RbmParams.from_vector(x[:n_each], nv, n_hidden)
        pha = RbmParams.from_vector(x[n_each:], nv, n_hidden)
        fa = log_marginal(amp, v)
        fp = log_marginal(pha, v)
        psi_t = np.exp((fa - fa.max()) / 2.0 + 0.5j * fp)  # unnormalized, scaled
        z = float(np.sum(np.abs(psi_t) ** 2))
        prob_v = np.abs(psi_t) ** 2 / z

        ga = marginal_grad(amp, v)   # (D, P)
        gp = marginal_grad(pha, v)
        psi_m = psi_t.reshape(ds, da)
        # d ln Z: amplitude only (the phase factor has unit modulus).
        dlnz_a = prob_v @ ga

        at = np.einsum("boi,ia->boa", u, psi_m)             # (B, ds, da)
        qt = np.sum(np.abs(at) ** 2, axis=2)                # (B, ds)
        q = qt / z
        if np.any(q[tmask] <= 0):
            loss = float("inf")
        else:
            loss = float(np.sum(tlogt[tmask] - targets[tmask] * np.log(q[tmask])))

        # d qt(o)/dtheta via the chain rule through the unnormalized Psi.
        ba = np.einsum("boi,iap->boap", u,
                       psi_m[:, :, None] * (0.5 * ga).reshape(ds, da, n_each))
        bp = np.einsum("boi,iap->boap", u,
                       psi_m[:, :, None] * (0.5 * gp).reshape(ds, da, n_each))
        qt_safe = np.maximum(qt, 1e-300)[:, :, None]
        dlnq_a = 2.0 * np.real(np.einsum("boa,boap->bop", at.conj(), ba)) / qt_safe
        dlnq_p = -2.0 * np.imag(np.einsum("boa,boap->bop", at.conj(), bp)) / qt_safe
        grad_a = np.einsum("bo,bop->p", targets, dlnz_a[None, None, :] - dlnq_a)
        grad_p = -np.einsum("bo,bop->p", targets, dlnq_p)
        return loss, np.concatenate([grad_a, grad_p])

    return loss_and_grad


def multibasis_loss_and_grad(x: np.ndarray, basis_dists: dict, n_sys: int,
                             n_anc: int, n_hidden: int):
    """One-shot evaluation of :func:`make_multibasis_loss`."""
    return make_multibasis_loss(basis_dists, n_sys, n_anc, n_hidden)(x)


def _phase_frozen_mask(n_sys, n_anc, n_hidden):
    nv = n_sys + n_anc
    n_each = nv + n_hidden + nv * n_hidden
    return np.concatenate([np.ones(n_each), np.zeros(n_each)])


def _init_purification_vector(n_sys, n_anc, n_hidden, rng,
                              couple_ancilla=True, freeze_phase=False):
    nv = n_sys + n_anc
    x = np.concatenate([init_rbm(nv, n_hidden, rng).to_vector(),
                        init_rbm(nv, n_hidden, rng).to_vector()])
    mask = np.ones_like(x)
    if not couple_ancilla:
        m = _ancilla_mask(n_sys, n_anc, n_hidden)
        mask *= np.concatenate([m, m])
    if freeze_phase:
        mask *= _phase_frozen_mask(n_sys, n_anc, n_hidden)
    x *= mask  # frozen parameters start (and stay) at zero
    return x, mask


def _model_from_vector(x, n_sys, n_anc, n_hidden, couple_ancilla):
    nv = n_sys + n_anc
    n_each = nv + n_hidden + nv * n_hidden
    return PurificationModel(
        n_sys=n_sys, n_anc=n_anc,
        amplitude=RbmParams.from_vector(x[:n_each], nv, n_hidden),
        phase=RbmParams.from_vector(x[n_each:], nv, n_hidden),
        couple_ancilla=couple_ancilla)


def train_purification(data, arch=(2, 3), cfg: TrainConfig = TrainConfig(),
                       seed: int | None = None, couple_ancilla: bool = True):
    """Fit the purification (or, with ``couple_ancilla=False``, pure-state)
    ansatz to multi-basis measurement data.

    ``data`` is a :class:`nqst.data.MultiBasisDataset` or a dict mapping the
    9 basis strings to 4-outcome distributions.  ``arch = (n_anc, n_hidden)``.
    Returns ``(model, loss_trace)``; the loss is the equal-weight sum of the
    per-basis KL divergences.  The loss is non-convex with occasional local
    minima; ``cfg.n_restarts`` seeded runs are made and the best one kept.
    """
    n_anc, n_hidden = arch
    basis_dists = _as_basis_dists(data)
    missing = [b for b in PAULI_BASES_2Q if b not in basis_dists]
    if missing:
        raise ValueError(f"missing basis settings: {missing}")
    n_sys = 2
    loss_fn = make_multibasis_loss(basis_dists, n_sys, n_anc, n_hidden)
    rng = np.random.default_rng(cfg.seed if seed is None else seed)
    best = None
    for _ in range(max(cfg.n_restarts, 1)):
        x0, mask = _init_purification_vector(n_sys, n_anc, n_hidden, rng,
                                             couple_ancilla=couple_ancilla)
        x, loss, trace = _descend(loss_fn, x0, cfg, mask=mask)
        if best is None or loss < best[1]:
            best = (x, loss, trace)
    x, _, trace = best
    return _model_from_vector(x, n_sys, n_anc, n_hidden, couple_ancilla), trace


def train_positive_real(zdata, n_hidden: int = 3,
                        cfg: TrainConfig = TrainConfig(),
                        seed: int | None = None):
    """Fit the positive-real wavefunction ansatz to z-basis counts only.

    ``zdata`` is a length-4 counts (or probability) array over the two-qubit
    computational-basis outcomes, or a MultiBasisDataset whose "zz" setting
    is used.  The phase network stays identically zero, so all amplitudes
    are real and non-negative by construction.
    """
    if hasattr(zdata, "setting_distribution"):
        target = zdata.setting_distribution("zz")
    else:
        target = np.asarray(zdata, dtype=float)
        if target.shape != (4,) or np.any(target < 0) or target.sum() <= 0:
            raise ValueError("z-basis data must be 4 non-negative counts")
        target = target / target.sum()
    n_sys, n_anc = 2, 0
    loss_fn = make_multibasis_loss({"zz": target}, n_sys, n_anc, n_hidden)
    rng = np.random.default_rng(cfg.seed if seed is None else seed)
    best = None
    for _ in range(max(cfg.n_restarts, 1)):
        x0, mask = _init_purification_vector(n_sys, n_anc, n_hidden, rng,
                                             freeze_phase=True)
        x, loss, trace = _descend(loss_fn, x0, cfg, mask=mask)
        if best is None or loss < best[1]:
            best = (x, loss, trace)
    x, _, trace = best
    return _model_from_vector(x, n_sys, n_anc, n_hidden, True), trace


def _as_basis_dists(data) -> dict:
    if hasattr(data, "setting_distribution"):
        return {b: data.setting_distribution(b) for b in PAULI_BASES_2Q}
    return {b: np.asarray(p, dtype=float) / np.asarray(p, dtype=float).sum()
            for b, p in data.items()}


# --- gradient checking ---------------------------------------------------------

def gradient_check(loss_and_grad, x: np.ndarray, epsilon: float = 1e-5) -> float:
    """Max relative deviation between the analytic gradient and central
    finite differences at x."""
    _, g = loss_and_grad(x)
    fd = np.empty_like(g)
    for i in range(x.size):
        xp, xm = x.copy(), x.copy()
        xp[i] += epsilon
        xm[i] -= epsilon
        fd[i] = (loss_and_grad(xp)[0] - loss_and_grad(xm)[0]) / (2.0 * epsilon)
    scale = max(np.max(np.abs(g)), np.max(np.abs(fd)), 1e-12)
    return float(np.max(np.abs(g - fd)) / scale)


# --- model serialization --------------------------------------------------------

def model_to_json(model, ansatz: str, train_meta: dict | None = None) -> dict:
    if isinstance(model, PovmRbmModel):
        return {
            "ansatz": "povm",
            "arch": {"n_qubits": model.n_qubits, "n_hidden": model.params.n_hidden,
                     "povm": model.povm_kind},
            "params": {"w": model.params.w.tolist(),
                       "vbias": model.params.vbias.tolist(),
                       "hbias": model.params.hbias.tolist()},
            "train_meta": train_meta or {},
        }
    if isinstance(model, PurificationModel):
        if ansatz not in ("purification", "pure", "positive_real"):
            raise ValueError(f"bad ansatz name {ansatz!r} for a purification model")
        return {
            "ansatz": ansatz,
            "arch": {"n_sys": model.n_sys, "n_anc": model.n_anc,
                     "n_hidden": model.n_hidden,
                     "couple_ancilla": model.couple_ancilla},
            "params": {
                "amp_w": model.amplitude.w.tolist(),
                "amp_vbias": model.amplitude.vbias.tolist(),
                "amp_hbias": model.amplitude.hbias.tolist(),
                "phase_w": model.phase.w.tolist(),
                "phase_vbias": model.phase.vbias.tolist(),
                "phase_hbias": model.phase.hbias.tolist(),
            },
            "train_meta": train_meta or {},
        }
    raise TypeError(f"cannot serialize {type(model).__name__}")


def model_from_json(obj: dict):
    """Returns ``(ansatz_name, model)``."""
    ansatz = obj["ansatz"]
    arch = obj["arch"]
    p = obj["params"]
    if ansatz == "povm":
        params = RbmParams(w=np.array(p["w"]), vbias=np.array(p["vbias"]),
                           hbias=np.array(p["hbias"]))
        return ansatz, PovmRbmModel(params, arch["povm"], arch["n_qubits"])
    model = PurificationModel(
        n_sys=arch["n_sys"], n_anc=arch["n_anc"],
        amplitude=RbmParams(w=np.array(p["amp_w"]), vbias=np.array(p["amp_vbias"]),
                            hbias=np.array(p["amp_hbias"])),
        phase=RbmParams(w=np.array(p["phase_w"]), vbias=np.array(p["phase_vbias"]),
                        hbias=np.array(p["phase_hbias"])),
        couple_ancilla=arch["couple_ancilla"])
    return ansatz, model
