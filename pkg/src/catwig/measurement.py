"""Pointer readout: sign of the X quadrature on each lab's mode.

Three estimators of the four sign-quadrant probabilities are offered:

homodyne  the true X distribution |psi(x)|^2 (default)
husimi    the Husimi X-marginal, i.e. X smeared by vacuum noise
branch    squared coherent-branch coefficients (ideal pointer, pure two-mode states)

All three agree up to the vacuum-width leakage across X = 0, which is
~erfc(sqrt2 a) for homodyne and ~erfc(a) for the Husimi marginal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dynamics import apply_settings
from .hilbert import WeightedEnsemble, pair_terms
from .qfunc import GridError, axis_points, marginal_values, trapezoid_weights
from .states import FRState, WFState, branch_coefficients

GRID_POINTS = 801
GRID_MARGIN = 6.0
MASS_TOL = 1e-6
TIE_WIDTH = 1e-12

SIGN_LABELS = ("+", "-")
CHSH_PAIRS = (("z", "z"), ("z", "y"), ("y", "z"), ("y", "y"))


@dataclass(frozen=True)
class SettingPair:
    a_setting: str
    b_setting: str

    def __post_init__(self):
        for s in (self.a_setting, self.b_setting):
            if s not in ("z", "y"):
                raise ValueError(f"setting must be 'z' or 'y', got {s!r}")

    @classmethod
    def of(cls, pair) -> "SettingPair":
        if isinstance(pair, SettingPair):
            return pair
        a, b = tuple(pair)
        return cls(a, b)

    def __iter__(self):
        return iter((self.a_setting, self.b_setting))

    def label(self) -> str:
        return self.a_setting + self.b_setting


@dataclass(frozen=True, eq=False)
class OutcomeTable:
    """p[i, j] = P(sign_A = SIGN_LABELS[i], sign_B = SIGN_LABELS[j])."""

    p: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        if p.shape != (2, 2):
            raise ValueError("outcome table must be 2x2")
        if p.min() < -1e-12:
            raise ValueError(f"negative probability {p.min():.3e}")
        if abs(p.sum() - 1) > 1e-9:
            raise ValueError(f"probabilities sum to {p.sum()}")
        p = p.copy()
        p.flags.writeable = False
        object.__setattr__(self, "p", p)

    def __getitem__(self, signs: str) -> float:
        """Look up by a two-character key such as '++' or '-+'."""
        i, j = (SIGN_LABELS.index(s) for s in signs)
        return float(self.p[i, j])

    def moment(self) -> float:
        return float(self.p[0, 0] + self.p[1, 1] - self.p[0, 1] - self.p[1, 0])


def _unwrap(state):
    return state.state if isinstance(state, (WFState, FRState)) else state


def default_grid(state, margin: float = GRID_MARGIN, n: int = GRID_POINTS) -> tuple[float, float, int]:
    """[-L, L] with L = sqrt(max mean occupation) + margin, i.e. alpha + 6 for a cat of amplitude alpha."""
    comps = state.states if isinstance(state, WeightedEnsemble) else (state,)
    mean_n = 0.0
    for s in comps:
        for m in range(s.n_modes):
            pops = s.mode_populations(m)
            mean_n = max(mean_n, float(pops @ np.arange(len(pops))))
    half = math.sqrt(mean_n) + margin
    return (-half, half, n)


def hermite_functions(xs: np.ndarray, cutoff: int) -> np.ndarray:
    """Position wavefunctions <X|n> in units where X = (a + a^dag)/2.

    Uses q = sqrt2 X and the normalized Hermite-function recurrence, then
    rescales so that sum_x |psi|^2 dX integrates to 1.
    """
    q = math.sqrt(2) * np.asarray(xs, dtype=float)
    out = np.empty((cutoff, len(q)))
    out[0] = math.pi**-0.25 * np.exp(-(q**2) / 2)
    if cutoff > 1:
        out[1] = math.sqrt(2) * q * out[0]
    for n in range(1, cutoff - 1):
        out[n + 1] = math.sqrt(2 / (n + 1)) * q * out[n] - math.sqrt(n / (n + 1)) * out[n - 1]
    return out * 2**0.25


def homodyne_density(state, xs, ys, modes: Sequence[int] = (0, 1)) -> np.ndarray:
    """Joint density of (X_A, X_B) on the grid xs x ys."""
    terms = pair_terms(state, modes)
    d = terms[0][1].shape[0]
    ha, hb = hermite_functions(xs, d), hermite_functions(ys, d)
    out = np.zeros((len(xs), len(ys)))
    for w, c in terms:
        out += w * np.abs(ha.T @ c @ hb) ** 2
    return out


def _side_weights(xs: np.ndarray) -> np.ndarray:
    """Trapezoid weights split into (X > 0, X < 0) rows; a node at 0 is shared equally."""
    w = trapezoid_weights(xs)
    pos = np.where(xs > TIE_WIDTH, 1.0, np.where(xs < -TIE_WIDTH, 0.0, 0.5))
    return np.stack([w * pos, w * (1 - pos)])


def pointer_probabilities(
    state,
    modes: Sequence[int] = (0, 1),
    grid: tuple[float, float, int] | None = None,
    estimator: str = "homodyne",
    amps: Sequence[float] | None = None,
) -> OutcomeTable:
    """Sign-quadrant probabilities of (X_A, X_B).

    ``grid`` is (min, max, n) for both axes and defaults to
    :func:`default_grid`.  The branch estimator needs the coherent
    amplitudes ``amps`` of the two pointer modes.
    """
    state = _unwrap(state)
    if estimator == "branch":
        if amps is None:
            raise ValueError("branch estimator needs the branch amplitudes")
        return OutcomeTable(_branch_probs(state, amps))
    grid = grid or default_grid(state)
    xs = axis_points(*grid)
    if estimator == "homodyne":
        dens = homodyne_density(state, xs, xs, modes)
    elif estimator == "husimi":
        dens = marginal_values(state, xs, xs, modes)
    else:
        raise ValueError(f"unknown estimator {estimator!r}")
    sides = _side_weights(xs)
    raw = sides @ dens @ sides.T
    mass = raw.sum()
    if abs(mass - 1) > MASS_TOL:
        raise GridError(f"grid captures mass {mass:.8f}; widen or refine it")
    return OutcomeTable(np.clip(raw / mass, 0.0, None))


def _branch_probs(state, amps) -> np.ndarray:
    if isinstance(state, WeightedEnsemble):
        return sum(w * _branch_probs(s, amps) for w, s in state.components)
    if state.n_modes != 2:
        raise ValueError("branch estimator works on two-mode states")
    coeffs = branch_coefficients(state, amps, residual_tol=1e-8)
    p = np.zeros((2, 2))
    for (sa, sb), c in coeffs.items():
        p[(1 - sa) // 2, (1 - sb) // 2] = abs(c) ** 2
    return p / p.sum()


def spin_moment(state, pair, omega: float = 1.0, **kw) -> float:
    """<S_A S_B> for the given settings, rotating the y labs first."""
    pair = SettingPair.of(pair)
    rotated = apply_settings(_unwrap(state), tuple(pair), omega)
    value = pointer_probabilities(rotated, **kw).moment()
    if not -1 - 1e-9 <= value <= 1 + 1e-9:
        raise AssertionError(f"moment {value} outside [-1, 1]")
    return value


def moments(state, pairs=CHSH_PAIRS, omega: float = 1.0, **kw) -> dict[str, float]:
    return {SettingPair.of(p).label(): spin_moment(state, p, omega, **kw) for p in pairs}


def chsh(state, pairs=CHSH_PAIRS, omega: float = 1.0, **kw) -> float:
    """S = E(p1) + E(p2) + E(p3) - E(p4); with the default pairs, zz + zy + yz - yy."""
    if len(pairs) != 4:
        raise ValueError("CHSH needs four setting pairs")
    m = [spin_moment(state, p, omega, **kw) for p in pairs]
    return m[0] + m[1] + m[2] - m[3]
