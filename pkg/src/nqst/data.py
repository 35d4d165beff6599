"""Counts datasets, sampling, bootstrap and the noisy two-photon simulator.

Counts are stored as float arrays so that the "no-shot-noise" mode (expected
counts instead of multinomial draws) fits the same container; sampled
datasets always hold integers.

Normalization convention: probabilities are counts divided by the *grand*
total over all settings.  With equal expected acquisition per setting this
reproduces tr[rho M_a] exactly (the per-basis projector rates sum to the
number of settings).
"""

from __future__ import annotations

import itertools
import json
import os
import tempfile
from dataclasses import dataclass, field

import numpy as np

from .linalg import SI, SX, SY, SZ, min_eigenvalue
from .povm import (
    OutcomeDistribution,
    ProductPovm,
    make_product_povm,
    outcome_probabilities,
)

PAULI6_SETTINGS = tuple(a + b for a in "xyz" for b in "xyz")

# Per-qubit pauli6 index for (basis, outcome): basis order (x, y, z),
# outcome 0 = up, 1 = down.
_BASIS_IDX = {"x": 0, "y": 1, "z": 2}


@dataclass(frozen=True)
class CountsDataset:
    povm_kind: str
    n_qubits: int
    counts: np.ndarray  # flat, lexicographic outcome order
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        c = np.asarray(self.counts, dtype=float)
        object.__setattr__(self, "counts", c)
        if np.any(c < 0):
            raise ValueError("counts must be non-negative")

    @property
    def total(self) -> float:
        return float(self.counts.sum())


@dataclass(frozen=True)
class MultiBasisDataset:
    """Counts for all 9 two-qubit Pauli basis settings, 4 outcomes each.

    Outcome order within a setting: (up,up), (up,down), (down,up),
    (down,down) for (qubit 1, qubit 2).
    """

    settings: dict  # basis string -> (4,) float array
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        missing = [b for b in PAULI6_SETTINGS if b not in self.settings]
        if missing:
            raise ValueError(f"missing settings: {missing}")
        clean = {}
        for b in PAULI6_SETTINGS:
            c = np.asarray(self.settings[b], dtype=float)
            if c.shape != (4,) or np.any(c < 0) or c.sum() <= 0:
                raise ValueError(f"bad counts for setting {b!r}")
            clean[b] = c
        object.__setattr__(self, "settings", clean)

    @property
    def total(self) -> float:
        return float(sum(c.sum() for c in self.settings.values()))

    def setting_distribution(self, basis: str) -> np.ndarray:
        c = self.settings[basis]
        return c / c.sum()


@dataclass(frozen=True)
class NoiseModel:
    """Systematic per-detector-setting tilt of the measurement axes.

    Each single-qubit POVM element's Bloch vector is rotated once, about a
    uniformly random axis by an angle ~ N(0, sigma_angle); the tilt is then
    fixed for the whole dataset (calibration error, not drift).
    """

    sigma_angle: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.sigma_angle < 0:
            raise ValueError("sigma_angle must be >= 0")


def counts_to_distribution(c: CountsDataset) -> OutcomeDistribution:
    """Normalize counts by the grand total."""
    if c.total <= 0:
        raise ValueError("dataset has zero total count")
    return OutcomeDistribution(c.povm_kind, c.n_qubits, c.counts / c.total)


def sample_outcomes(rho: np.ndarray, povm: ProductPovm, n: int,
                    seed: int) -> CountsDataset:
    """n i.i.d. multinomial draws from the exact outcome distribution."""
    p = outcome_probabilities(rho, povm)
    if p.unphysical or min_eigenvalue(np.asarray(rho)) < -1e-10:
        raise ValueError("cannot sample from an unphysical state")
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(n, p.probs / p.probs.sum())
    return CountsDataset(povm.kind, povm.n_qubits, counts,
                         meta={"seed": seed, "acquisition": "exact_sampling"})


def expected_counts(rho: np.ndarray, povm: ProductPovm, n: float) -> CountsDataset:
    """No-shot-noise mode: expected (real-valued) counts n * P(a)."""
    p = outcome_probabilities(rho, povm)
    return CountsDataset(povm.kind, povm.n_qubits, n * p.probs,
                         meta={"acquisition": "expected"})


def bootstrap_resample(c: CountsDataset, seed: int) -> CountsDataset:
    """Multinomial resample with the same total count."""
    if c.total <= 0:
        raise ValueError("dataset has zero total count")
    rng = np.random.default_rng(seed)
    n = int(round(c.total))
    counts = rng.multinomial(n, c.counts / c.total)
    meta = dict(c.meta)
    meta["bootstrap_seed"] = seed
    return CountsDataset(c.povm_kind, c.n_qubits, counts, meta=meta)


# --- noisy measurement simulation --------------------------------------------

def _bloch_decompose(m: np.ndarray):
    """Write a positive 2x2 operator as t*I + v.sigma."""
    t = float(np.real(np.trace(m))) / 2.0
    v = np.array([np.real(np.trace(m @ s)) / 2.0 for s in (SX, SY, SZ)])
    return t, v


def _bloch_compose(t: float, v: np.ndarray) -> np.ndarray:
    return t * SI + v[0] * SX + v[1] * SY + v[2] * SZ


def _random_tilt(v: np.ndarray, rng: np.random.Generator, sigma: float):
    """Rotate v about a uniformly random axis by an angle ~ N(0, sigma)."""
    u = rng.standard_normal(3)
    u /= np.linalg.norm(u)
    phi = rng.normal(0.0, sigma)
    c, s = np.cos(phi), np.sin(phi)
    v2 = v * c + np.cross(u, v) * s + u * np.dot(u, v) * (1.0 - c)
    return v2, (u, phi)


def _tilted_elements(elements: np.ndarray, rng, sigma: float):
    """Tilt each element's Bloch vector; positivity is preserved (|v| <= t)."""
    out = np.empty_like(elements)
    tilts = []
    for i, m in enumerate(elements):
        t, v = _bloch_decompose(m)
        v2, (axis, phi) = _random_tilt(v, rng, sigma)
        out[i] = _bloch_compose(t, v2)
        tilts.append({"axis": axis.tolist(), "angle": float(phi)})
    return out, tilts


def simulate_experiment(rho_true: np.ndarray, povm_kind: str, n_total: int,
                        noise: NoiseModel, seed: int, shot_noise: bool = True):
    """Simulate the two-photon coincidence measurement of a 2-qubit state.

    For pauli6 the result is a :class:`MultiBasisDataset` (9 settings with 4
    projective outcomes each, equal expected acquisition share); for pauli4
    and tetra it is a :class:`CountsDataset` over the 16 POVM outcomes.
    With ``shot_noise=False`` the expected counts are returned instead of a
    multinomial sample.
    """
    rho_true = np.asarray(rho_true, dtype=complex)
    if rho_true.shape != (4, 4):
        raise ValueError("simulator supports two qubits only")
    if min_eigenvalue(rho_true) < -1e-10:
        raise ValueError("true state must be physical")
    if n_total <= 0:
        raise ValueError("n_total must be positive")

    noise_rng = np.random.default_rng(noise.seed)
    meta = {"seed": seed, "noise_seed": noise.seed,
            "sigma_angle": noise.sigma_angle, "n_total": n_total,
            "shot_noise": shot_noise}

    if povm_kind == "pauli6":
        # Tilt the 6 full projectors (up/down per basis) per qubit.
        single = make_product_povm("pauli6", 1).single
        projs = 3.0 * single.elements  # full projectors
        tilted = []
        for q in (0, 1):
            el, tilts = _tilted_elements(projs, noise_rng, noise.sigma_angle)
            tilted.append(el)
            meta[f"tilts_qubit{q + 1}"] = tilts
        # Joint bin probabilities: 1/9 acquisition share per setting times
        # the within-setting (renormalized) projective rates.
        bins = np.empty((9, 4))
        for si, (b1, b2) in enumerate(itertools.product("xyz", repeat=2)):
            rates = np.empty(4)
            for oi, (o1, o2) in enumerate(itertools.product((0, 1), repeat=2)):
                m = np.kron(tilted[0][2 * _BASIS_IDX[b1] + o1],
                            tilted[1][2 * _BASIS_IDX[b2] + o2])
                rates[oi] = max(np.real(np.trace(rho_true @ m)), 0.0)
            bins[si] = rates / rates.sum() / 9.0
        flat = bins.ravel()
        if shot_noise:
            rng = np.random.default_rng(seed)
            counts = rng.multinomial(n_total, flat / flat.sum()).astype(float)
        else:
            counts = n_total * flat
        settings = {b1 + b2: counts[4 * si:4 * si + 4]
                    for si, (b1, b2) in enumerate(itertools.product("xyz", repeat=2))}
        return MultiBasisDataset(settings, meta=meta)

    if povm_kind in ("pauli4", "tetra"):
        single = make_product_povm(povm_kind, 1).single
        tilted = []
        for q in (0, 1):
            el, tilts = _tilted_elements(single.elements, noise_rng,
                                         noise.sigma_angle)
            tilted.append(el)
            meta[f"tilts_qubit{q + 1}"] = tilts
        rates = np.empty(16)
        for i, (a1, a2) in enumerate(itertools.product(range(4), repeat=2)):
            m = np.kron(tilted[0][a1], tilted[1][a2])
            rates[i] = max(np.real(np.trace(rho_true @ m)), 0.0)
        probs = rates / rates.sum()
        if shot_noise:
            rng = np.random.default_rng(seed)
            counts = rng.multinomial(n_total, probs).astype(float)
        else:
            counts = n_total * probs
        return CountsDataset(povm_kind, 2, counts, meta=meta)

    raise ValueError(f"unknown POVM kind {povm_kind!r}")


def multibasis_to_pauli6(d: MultiBasisDataset) -> CountsDataset:
    """Regroup the 9x4 per-setting counts into the 36 pauli6 outcome bins."""
    counts = np.zeros(36)
    for b1, b2 in itertools.product("xyz", repeat=2):
        c = d.settings[b1 + b2]
        for oi, (o1, o2) in enumerate(itertools.product((0, 1), repeat=2)):
            a1 = 2 * _BASIS_IDX[b1] + o1
            a2 = 2 * _BASIS_IDX[b2] + o2
            counts[6 * a1 + a2] += c[oi]
    return CountsDataset("pauli6", 2, counts, meta=dict(d.meta))


def coarse_grain_counts_pauli6_to_pauli4(c: CountsDataset) -> CountsDataset:
    """Counts-level analogue of the pauli6 -> pauli4 coarse-graining."""
    if c.povm_kind != "pauli6":
        raise ValueError("expected pauli6 counts")
    p6_to_p4 = np.array([0, 3, 1, 3, 2, 3])
    n = c.n_qubits
    out = np.zeros(4**n)
    for i, idx in enumerate(itertools.product(range(6), repeat=n)):
        j = 0
        for a in idx:
            j = j * 4 + p6_to_p4[a]
        out[j] += c.counts[i]
    return CountsDataset("pauli4", n, out, meta=dict(c.meta))


# --- file I/O -----------------------------------------------------------------

def atomic_write_text(path: str, text: str) -> None:
    """Write via a temp file in the same directory plus rename."""
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_json(path: str, obj) -> None:
    atomic_write_text(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def counts_to_json(c: CountsDataset) -> dict:
    k = round(len(c.counts) ** (1.0 / c.n_qubits))
    keys = {}
    for i, idx in enumerate(itertools.product(range(k), repeat=c.n_qubits)):
        v = float(c.counts[i])
        keys[",".join(str(a) for a in idx)] = int(v) if v.is_integer() else v
    return {"povm": c.povm_kind, "n_qubits": c.n_qubits, "counts": keys,
            "meta": c.meta}


def counts_from_json(obj: dict) -> CountsDataset:
    kind = obj["povm"]
    n = int(obj["n_qubits"])
    k = 6 if kind == "pauli6" else 4
    counts = np.zeros(k**n)
    for key, v in obj["counts"].items():
        idx = tuple(int(x) for x in key.split(","))
        i = 0
        for a in idx:
            i = i * k + a
        counts[i] = v
    return CountsDataset(kind, n, counts, meta=obj.get("meta", {}))


def multibasis_to_json(d: MultiBasisDataset) -> dict:
    settings = {}
    for b in PAULI6_SETTINGS:
        c = d.settings[b]
        settings[b] = {
            f"{o1}{o2}": (int(v) if v.is_integer() else v)
            for (o1, o2), v in zip(itertools.product((0, 1), repeat=2),
                                   (float(x) for x in c))
        }
    return {"settings": settings, "meta": d.meta}


def multibasis_from_json(obj: dict) -> MultiBasisDataset:
    settings = {}
    for b, rec in obj["settings"].items():
        c = np.zeros(4)
        for oi, (o1, o2) in enumerate(itertools.product((0, 1), repeat=2)):
            c[oi] = rec[f"{o1}{o2}"]
        settings[b] = c
    return MultiBasisDataset(settings, meta=obj.get("meta", {}))


def save_dataset(path: str, dataset) -> None:
    if isinstance(dataset, CountsDataset):
        atomic_write_json(path, counts_to_json(dataset))
    elif isinstance(dataset, MultiBasisDataset):
        atomic_write_json(path, multibasis_to_json(dataset))
    else:
        raise TypeError(f"cannot serialize {type(dataset).__name__}")


def load_dataset(path: str):
    with open(path) as f:
        obj = json.load(f)
    if "settings" in obj:
        return multibasis_from_json(obj)
    return counts_from_json(obj)
