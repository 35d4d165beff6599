"""CHSH Bell-parameter prediction and simulated Bell measurements.

Measurement axes live in the z-x plane: axis(theta) = cos(theta) sigma_z +
sin(theta) sigma_x.  The CHSH combination used throughout is

    S(theta) = E(0, theta) + E(0, -theta) + E(2 theta, theta) - E(2 theta, -theta)

which for the ideal Bell state evaluates to 3 cos(theta) - cos(3 theta),
peaking at 2 sqrt(2) for theta = pi/4.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .linalg import SI, SX, SZ, min_eigenvalue

# Setting pairs (theta_a, theta_b) as multiples of theta, with CHSH signs.
_SETTINGS = ((0.0, 1.0), (0.0, -1.0), (2.0, 1.0), (2.0, -1.0))
_SIGNS = (1.0, 1.0, 1.0, -1.0)


def axis_operator(theta: float) -> np.ndarray:
    """cos(theta) sigma_z + sin(theta) sigma_x."""
    return np.cos(theta) * SZ + np.sin(theta) * SX


def _projectors(theta: float):
    a = axis_operator(theta)
    return (SI + a) / 2.0, (SI - a) / 2.0


def correlation(rho: np.ndarray, theta_a: float, theta_b: float) -> float:
    """E = <axis(theta_a) (x) axis(theta_b)> for a two-qubit state."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError("correlation requires a two-qubit state")
    op = np.kron(axis_operator(theta_a), axis_operator(theta_b))
    return float(np.real(np.trace(rho @ op)))


def bell_parameter(rho: np.ndarray, theta: float) -> float:
    """CHSH parameter S(theta); unclamped, so indefinite states may exceed
    the Tsirelson bound."""
    return sum(sign * correlation(rho, a * theta, b * theta)
               for (a, b), sign in zip(_SETTINGS, _SIGNS))


@dataclass(frozen=True)
class BellCounts:
    """Joint outcome counts for the four CHSH setting pairs at one theta.

    ``counts[i]`` holds (N_uu, N_ud, N_du, N_dd) for setting pair i in the
    order of the CHSH combination.
    """

    theta: float
    counts: np.ndarray  # (4, 4)

    def __post_init__(self):
        c = np.asarray(self.counts, dtype=float)
        object.__setattr__(self, "counts", c)
        if c.shape != (4, 4) or np.any(c < 0):
            raise ValueError("need non-negative counts for 4 settings x 4 outcomes")


def bell_from_counts(c: BellCounts) -> float:
    """Empirical S from per-setting correlators (uu + dd - ud - du) / total."""
    totals = c.counts.sum(axis=1)
    if np.any(totals <= 0):
        raise ValueError("every setting needs a positive total count")
    e = (c.counts[:, 0] + c.counts[:, 3] - c.counts[:, 1] - c.counts[:, 2]) / totals
    return float(np.dot(_SIGNS, e))


def _setting_probabilities(rho: np.ndarray, theta: float) -> np.ndarray:
    """Joint projective outcome probabilities for the 4 CHSH settings."""
    probs = np.empty((4, 4))
    for i, (a, b) in enumerate(_SETTINGS):
        pa = _projectors(a * theta)
        pb = _projectors(b * theta)
        for j, (oa, ob) in enumerate(((0, 0), (0, 1), (1, 0), (1, 1))):
            op = np.kron(pa[oa], pb[ob])
            probs[i, j] = max(float(np.real(np.trace(rho @ op))), 0.0)
        probs[i] /= probs[i].sum()
    return probs


def expected_bell_counts(rho: np.ndarray, theta: float, n_per_setting: float) -> BellCounts:
    """Expected (non-sampled) counts; bell_from_counts on these equals
    bell_parameter exactly."""
    return BellCounts(theta, n_per_setting * _setting_probabilities(rho, theta))


def simulate_bell_measurement(rho: np.ndarray, theta: float,
                              n_per_setting: int = 25_000,
                              seed: int = 0) -> BellCounts:
    """Multinomial sample of the four joint outcomes per setting pair."""
    rho = np.asarray(rho, dtype=complex)
    if min_eigenvalue(rho) < -1e-10:
        raise ValueError("cannot sample from an unphysical state")
    probs = _setting_probabilities(rho, theta)
    rng = np.random.default_rng(seed)
    counts = np.array([rng.multinomial(n_per_setting, p) for p in probs], dtype=float)
    return BellCounts(theta, counts)


@dataclass(frozen=True)
class BellCurve:
    thetas: np.ndarray
    values: np.ndarray
    source: str = ""
    std: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "thetas", np.asarray(self.thetas, dtype=float))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if self.thetas.shape != self.values.shape:
            raise ValueError("theta grid and values must have the same length")
        if np.any(np.abs(self.values) > 4.0 + 1e-9):
            raise ValueError("|S| <= 4 must hold for any counts")

    def max_deviation(self, other: "BellCurve") -> float:
        if self.thetas.shape != other.thetas.shape:
            raise ValueError("curves use different grids")
        return float(np.max(np.abs(self.values - other.values)))


def default_theta_grid(n: int = 60) -> np.ndarray:
    return np.linspace(0.0, np.pi, n)


def bell_curve(rho: np.ndarray, thetas: np.ndarray | None = None,
               source: str = "") -> BellCurve:
    """S(theta) over a grid (default: 60 points on [0, pi])."""
    if thetas is None:
        thetas = default_theta_grid()
    thetas = np.asarray(thetas, dtype=float)
    if thetas.size == 0:
        raise ValueError("theta grid must be non-empty")
    values = np.array([bell_parameter(rho, t) for t in thetas])
    return BellCurve(thetas, values, source=source)


def ideal_bell_curve(thetas: np.ndarray) -> np.ndarray:
    """Closed form for the maximally entangled state: 3 cos t - cos 3t."""
    t = np.asarray(thetas, dtype=float)
    return 3.0 * np.cos(t) - np.cos(3.0 * t)


def curve_to_csv(curve: BellCurve) -> str:
    buf = io.StringIO()
    if curve.std is not None:
        buf.write("theta,S,std\n")
        for t, s, e in zip(curve.thetas, curve.values, curve.std):
            buf.write(f"{float(t)!r},{float(s)!r},{float(e)!r}\n")
    else:
        buf.write("theta,S\n")
        for t, s in zip(curve.thetas, curve.values):
            buf.write(f"{float(t)!r},{float(s)!r}\n")
    return buf.getvalue()


def curve_from_csv(text: str, source: str = "") -> BellCurve:
    lines = [ln for ln in text.strip().splitlines() if ln]
    header = lines[0].split(",")
    cols = list(zip(*(ln.split(",") for ln in lines[1:])))
    thetas = np.array([float(x) for x in cols[0]])
    values = np.array([float(x) for x in cols[1]])
    std = None
    if len(header) > 2:
        std = np.array([float(x) for x in cols[2]])
    return BellCurve(thetas, values, source=source, std=std)
