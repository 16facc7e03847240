"""Husimi Q functions on phase-space grids.

Q(a_1..a_m) = pi^-m |<a_1..a_m|psi>|^2 with one coherent argument per
mode, a = X + iP.  The X-marginals integrate P numerically through a
per-mode kernel

    K[x]_{n n'} = (1/pi) int dP conj(c_n(x+iP)) c_n'(x+iP),

so a two-mode marginal is a pair of small matrix contractions per grid row.
"""

from __future__ import annotations

import io
import math
import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .dynamics import KerrParams
from .hilbert import (
    WeightedEnsemble,
    coherent_amplitudes_grid,
    pair_terms,
)
from .states import FRState, WFState

P_RANGE = 6.0
P_POINTS = 241


class GridError(ValueError):
    """Grid too small or too coarse: the integrated mass check failed."""


def axis_points(lo: float, hi: float, n: int) -> np.ndarray:
    if n < 2 or not hi > lo:
        raise ValueError(f"bad axis [{lo}, {hi}] with {n} points")
    return np.linspace(lo, hi, n)


def trapezoid_weights(x: np.ndarray) -> np.ndarray:
    w = np.empty_like(x, dtype=float)
    dx = np.diff(x)
    w[0], w[-1] = dx[0] / 2, dx[-1] / 2
    w[1:-1] = (dx[:-1] + dx[1:]) / 2
    return w


@dataclass(frozen=True, eq=False)
class QGrid:
    """Sampled Q function.  ``values`` has one axis per entry of ``axes``."""

    axes: tuple[tuple[str, float, float, int], ...]
    values: np.ndarray
    kind: str = "marginal-XX"
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        axes = tuple((str(a), float(lo), float(hi), int(n)) for a, lo, hi, n in self.axes)
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != tuple(n for *_, n in axes):
            raise ValueError(f"values shape {vals.shape} does not match axes")
        vals = vals.copy()
        vals.flags.writeable = False
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "values", vals)

    def coords(self, k: int) -> np.ndarray:
        _, lo, hi, n = self.axes[k]
        return axis_points(lo, hi, n)

    def integral(self) -> float:
        out = self.values
        for k in reversed(range(len(self.axes))):
            out = out @ trapezoid_weights(self.coords(k))
        return float(out)

    def cell_volume(self) -> float:
        return float(np.prod([(hi - lo) / (n - 1) for _, lo, hi, n in self.axes]))

    def header(self) -> str:
        return "# axes: " + " ".join(f"{a}[{lo:.17g},{hi:.17g},{n}]" for a, lo, hi, n in self.axes)

    def to_csv(self) -> str:
        if len(self.axes) != 2:
            raise ValueError("CSV export is defined for two-axis grids")
        buf = io.StringIO()
        buf.write(self.header() + "\n")
        xs, ys = self.coords(0), self.coords(1)
        for i, x in enumerate(xs):
            for j, y in enumerate(ys):
                buf.write(f"{x:.10g},{y:.10g},{self.values[i, j]:.17g}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, kind: str = "marginal-XX") -> "QGrid":
        lines = text.splitlines()
        if not lines or not lines[0].startswith("# axes:"):
            raise ValueError("missing '# axes:' header")
        axes = [
            (name, float(lo), float(hi), int(n))
            for name, lo, hi, n in re.findall(r"(\S+?)\[([^,\]]+),([^,\]]+),(\d+)\]", lines[0])
        ]
        data = np.loadtxt(lines[1:], delimiter=",", ndmin=2)
        shape = tuple(n for *_, n in axes)
        return cls(tuple(axes), data[:, -1].reshape(shape), kind)


def _coherent_row(point: complex, cutoff: int) -> np.ndarray:
    # Unnormalized truncated coefficients: <point|psi> is exact for psi in the truncated space.
    return coherent_amplitudes_grid(np.array([point]), cutoff)[0]


def _unwrap(state):
    return state.state if isinstance(state, (WFState, FRState)) else state


def q_value(state, phase_point: Sequence[complex]) -> float:
    """pi^-m |<coherent product|psi>|^2, or its weighted sum over an ensemble."""
    state = _unwrap(state)
    if isinstance(state, WeightedEnsemble):
        return sum(w * q_value(s, phase_point) for w, s in state.components)
    pts = [complex(p) for p in phase_point]
    if len(pts) != state.n_modes:
        raise ValueError(f"need {state.n_modes} phase-space points, got {len(pts)}")
    if not all(math.isfinite(p.real) and math.isfinite(p.imag) for p in pts):
        raise ValueError("phase point must be finite")
    amp = state.tensor_view()
    for p in pts:
        amp = np.tensordot(_coherent_row(p, state.cutoff).conj(), amp, axes=(0, 0))
    return float(abs(amp) ** 2 / math.pi ** len(pts))


def q_product_grid(state, x_axis, p_axis) -> QGrid:
    """Full two-mode Q on the lattice x_axis x p_axis per mode.

    Axes are (min, max, n) triples; the result has axes X_A, P_A, X_B, P_B.
    """
    state = _unwrap(state)
    xs, ps = axis_points(*x_axis), axis_points(*p_axis)
    pts = (xs[:, None] + 1j * ps[None, :]).reshape(-1)
    total = 0.0
    for w, c in pair_terms(state, (0, 1)):
        coh = coherent_amplitudes_grid(pts, c.shape[0]).conj()
        amp = coh @ c @ coh.T
        total = total + w * np.abs(amp) ** 2
    vals = (total / math.pi**2).reshape(len(xs), len(ps), len(xs), len(ps))
    axes = (("X_A", *x_axis), ("P_A", *p_axis), ("X_B", *x_axis), ("P_B", *p_axis))
    return QGrid(axes, vals, kind="full")


def x_kernel(
    xs: np.ndarray,
    cutoff: int,
    p_range: float = P_RANGE,
    p_points: int = P_POINTS,
) -> np.ndarray:
    """K[x]_{n n'} for every x; real because the P grid is symmetric."""
    xs = np.ascontiguousarray(xs, dtype=float)
    return _x_kernel_cached(xs.tobytes(), cutoff, float(p_range), int(p_points))


@lru_cache(maxsize=16)
def _x_kernel_cached(xs_bytes: bytes, cutoff: int, p_range: float, p_points: int) -> np.ndarray:
    xs = np.frombuffer(xs_bytes, dtype=float)
    ps = np.linspace(-p_range, p_range, p_points)
    wp = trapezoid_weights(ps) / math.pi
    out = np.empty((len(xs), cutoff, cutoff))
    # Chunk over x to bound memory at roughly 64 x p_points x cutoff amplitudes.
    for lo in range(0, len(xs), 64):
        chunk = xs[lo : lo + 64]
        c = coherent_amplitudes_grid(chunk[:, None] + 1j * ps[None, :], cutoff)
        ch = np.swapaxes(c.conj(), 1, 2) * wp
        out[lo : lo + 64] = (ch @ c).real
    out.flags.writeable = False
    return out


def _phased(kernel: np.ndarray, u: np.ndarray | None) -> np.ndarray:
    # Evolving psi by diag(u) is the same as K -> u_n K u_n'^*.
    if u is None:
        return kernel
    return kernel * u[None, :, None] * u.conj()[None, None, :]


def marginal_values(
    state,
    xs: np.ndarray,
    ys: np.ndarray,
    modes: Sequence[int] = (0, 1),
    phases: tuple[np.ndarray | None, np.ndarray | None] = (None, None),
    p_range: float = P_RANGE,
    p_points: int = P_POINTS,
) -> np.ndarray:
    """Q(X_A, X_B) with both P quadratures (and every other mode) integrated out."""
    terms = pair_terms(state, modes)
    d = terms[0][1].shape[0]
    ka = _phased(x_kernel(xs, d, p_range, p_points), phases[0])
    kb = _phased(x_kernel(ys, d, p_range, p_points), phases[1])
    kb_flat = kb.reshape(len(ys), -1)
    out = np.zeros((len(xs), len(ys)))
    for w, c in terms:
        # T[x] = C^T K_A[x] conj(C), then Q(x, y) = sum_{m m'} T[x]_{m m'} K_B[y]_{m m'}
        t = c.T @ ka @ c.conj()
        out += w * (t.reshape(len(xs), -1) @ kb_flat.T).real
    return out


def q_marginal_XX(
    state,
    x_axis: tuple[float, float, int],
    y_axis: tuple[float, float, int] | None = None,
    evolution: tuple[float, float] | None = None,
    omega: float = 1.0,
    modes: Sequence[int] = (0, 1),
    path: str = "kernel",
    check_mass: bool = True,
    p_range: float = P_RANGE,
    p_points: int = P_POINTS,
) -> QGrid:
    """Two-mode X-marginal of Q on a rectangular grid.

    ``evolution`` = (t_a, t_b) applies Kerr evolution to modes 0 and 1
    first.  With ``path="kernel"`` the Kerr phases are folded into the
    integration kernels; ``path="state"`` evolves the state itself.
    """
    state = _unwrap(state)
    y_axis = y_axis or x_axis
    xs, ys = axis_points(*x_axis), axis_points(*y_axis)
    phases = (None, None)
    if evolution is not None:
        ta, tb = evolution
        kerr = (KerrParams(omega, ta), KerrParams(omega, tb))
        if path == "kernel" and tuple(modes) == (0, 1):
            d = state.space.cutoff
            phases = (kerr[0].phases(d), kerr[1].phases(d))
        elif path in ("kernel", "state"):
            from .dynamics import kerr_evolve

            state = kerr_evolve(kerr_evolve(state, 0, kerr[0]), 1, kerr[1])
        else:
            raise ValueError(f"path must be 'kernel' or 'state', got {path!r}")
    vals = marginal_values(state, xs, ys, modes, phases, p_range, p_points)
    names = ("X_A", "X_B") if tuple(modes) == (0, 1) else tuple(f"X_{m}" for m in modes)
    grid = QGrid(
        ((names[0], *x_axis), (names[1], *y_axis)),
        vals,
        provenance={"modes": list(modes), "evolution": list(evolution or (0.0, 0.0)), "omega": omega},
    )
    if check_mass:
        mass = grid.integral()
        if abs(mass - 1) > 1e-3:
            raise GridError(f"marginal integrates to {mass:.6f}; widen or refine the grid")
    return grid


def q_distance(g1: QGrid, g2: QGrid) -> tuple[float, float]:
    """(sup-norm, cell-volume-weighted L1) distance between grids on identical axes."""
    if g1.axes != g2.axes:
        raise ValueError("grids have different axes")
    diff = np.abs(g1.values - g2.values)
    return float(diff.max()), float(diff.sum() * g1.cell_volume())
