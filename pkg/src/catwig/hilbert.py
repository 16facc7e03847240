"""Truncated Fock-space states for a handful of bosonic modes.

Amplitudes are dense and stored flat, row-major over modes with mode 0
varying slowest.  Mixed states are kept as small ensembles of pure
states rather than density matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

# Largest number of amplitudes we are willing to allocate (~0.5 GB complex128).
MAX_DIMENSION = 2**25

NORM_TOL = 1e-10
LEAK_TOL = 1e-10


class TruncationError(ValueError):
    """Requested amplitude does not fit the Fock cutoff."""


class DimensionError(ValueError):
    """Product space too large to store densely."""


class SpaceMismatchError(ValueError):
    pass


class DegenerateStateError(ValueError):
    """Superposition cancels (norm numerically zero)."""


def default_cutoff(alpha_max: float) -> int:
    """Cutoff keeping the Poisson tail of |alpha_max> below 1e-10."""
    a = abs(alpha_max)
    return max(2, math.ceil(a * a + 6 * a + 10))


def cutoff_admits(alpha: complex, cutoff: int) -> bool:
    a = abs(alpha)
    return a * a + 6 * a + 6 <= cutoff


@dataclass(frozen=True)
class ModeSpace:
    n_modes: int
    cutoff: int

    def __post_init__(self):
        if self.n_modes < 1:
            raise ValueError(f"n_modes must be >= 1, got {self.n_modes}")
        if self.cutoff < 2:
            raise ValueError(f"cutoff must be >= 2, got {self.cutoff}")
        if self.cutoff**self.n_modes > MAX_DIMENSION:
            raise DimensionError(
                f"{self.n_modes} modes at cutoff {self.cutoff} need "
                f"{self.cutoff**self.n_modes} amplitudes (limit {MAX_DIMENSION})"
            )

    @property
    def dim(self) -> int:
        return self.cutoff**self.n_modes

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.cutoff,) * self.n_modes

    def check_mode(self, mode: int) -> int:
        if not 0 <= mode < self.n_modes:
            raise IndexError(f"mode {mode} out of range for {self.n_modes} modes")
        return mode


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=complex)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class FockVector:
    """Pure state on a :class:`ModeSpace`.

    ``pre_norm`` is the norm the amplitudes had before the constructor
    renormalized them (1.0 when nothing was rescaled).
    """

    space: ModeSpace
    amplitudes: np.ndarray
    pre_norm: float = 1.0

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != self.space.dim:
            raise SpaceMismatchError(
                f"expected {self.space.dim} amplitudes, got {amps.size}"
            )
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @property
    def n_modes(self) -> int:
        return self.space.n_modes

    @property
    def cutoff(self) -> int:
        return self.space.cutoff

    def tensor_view(self) -> np.ndarray:
        """Amplitudes reshaped to one axis per mode."""
        return self.amplitudes.reshape(self.space.shape)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def truncation_leak(self) -> float:
        """Probability on basis states with any occupation >= cutoff - 2."""
        probs = np.abs(self.tensor_view()) ** 2
        top = self.cutoff - 2
        inside = probs[(slice(0, top),) * self.n_modes].sum()
        return float(max(probs.sum() - inside, 0.0))

    def mode_populations(self, mode: int) -> np.ndarray:
        self.space.check_mode(mode)
        probs = np.abs(self.tensor_view()) ** 2
        axes = tuple(i for i in range(self.n_modes) if i != mode)
        return probs.sum(axis=axes)

    def with_amplitudes(self, amplitudes: np.ndarray) -> "FockVector":
        return FockVector(self.space, amplitudes, self.pre_norm)

    def __repr__(self):
        return (
            f"FockVector(n_modes={self.n_modes}, cutoff={self.cutoff}, "
            f"norm={self.norm():.12f})"
        )


@dataclass(frozen=True, eq=False)
class WeightedEnsemble:
    """Convex combination of pure states sharing one mode space."""

    components: tuple[tuple[float, FockVector], ...] = field(default_factory=tuple)

    def __post_init__(self):
        comps = tuple((float(w), s) for w, s in self.components)
        if not comps:
            raise ValueError("ensemble needs at least one component")
        space = comps[0][1].space
        for w, s in comps:
            if not 0.0 < w <= 1.0:
                raise ValueError(f"weight {w} outside (0, 1]")
            if s.space != space:
                raise SpaceMismatchError("ensemble components live on different spaces")
            if abs(s.norm() - 1.0) > NORM_TOL:
                raise ValueError(f"component not normalized (norm {s.norm()})")
        total = sum(w for w, _ in comps)
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {total}, not 1")
        object.__setattr__(self, "components", comps)

    @property
    def space(self) -> ModeSpace:
        return self.components[0][1].space

    @property
    def weights(self) -> tuple[float, ...]:
        return tuple(w for w, _ in self.components)

    @property
    def states(self) -> tuple[FockVector, ...]:
        return tuple(s for _, s in self.components)

    def map(self, fn) -> "WeightedEnsemble":
        """Apply a state-to-state map to every component, keeping weights."""
        return WeightedEnsemble(tuple((w, fn(s)) for w, s in self.components))

    def density_matrix(self) -> np.ndarray:
        """Dense density matrix; only sensible for small spaces."""
        rho = np.zeros((self.space.dim, self.space.dim), dtype=complex)
        for w, s in self.components:
            rho += w * np.outer(s.amplitudes, s.amplitudes.conj())
        return rho


def coherent_amplitudes(alpha: complex, cutoff: int) -> np.ndarray:
    """Fock coefficients e^{-|a|^2/2} a^n / sqrt(n!) for n < cutoff, unnormalized.

    Computed by the ratio recursion so large |alpha| does not overflow.
    """
    alpha = complex(alpha)
    out = np.empty(cutoff, dtype=complex)
    out[0] = math.exp(-0.5 * abs(alpha) ** 2)
    for n in range(1, cutoff):
        out[n] = out[n - 1] * alpha / math.sqrt(n)
    return out


def coherent_amplitudes_grid(points: np.ndarray, cutoff: int) -> np.ndarray:
    """Vectorized :func:`coherent_amplitudes`; returns shape ``points.shape + (cutoff,)``."""
    pts = np.asarray(points, dtype=complex)
    out = np.empty(pts.shape + (cutoff,), dtype=complex)
    out[..., 0] = np.exp(-0.5 * np.abs(pts) ** 2)
    for n in range(1, cutoff):
        out[..., n] = out[..., n - 1] * pts / math.sqrt(n)
    return out


def vacuum(space: ModeSpace) -> FockVector:
    amps = np.zeros(space.dim, dtype=complex)
    amps[0] = 1.0
    return FockVector(space, amps)


def basis_state(space: ModeSpace, occupations: Sequence[int]) -> FockVector:
    if len(occupations) != space.n_modes:
        raise ValueError("one occupation per mode required")
    for n in occupations:
        if not 0 <= n < space.cutoff:
            raise TruncationError(f"occupation {n} outside cutoff {space.cutoff}")
    amps = np.zeros(space.shape, dtype=complex)
    amps[tuple(occupations)] = 1.0
    return FockVector(space, amps)


def _product(factors: Sequence[np.ndarray]) -> np.ndarray:
    out = factors[0]
    for f in factors[1:]:
        out = np.multiply.outer(out, f)
    return out


def coherent_state(space: ModeSpace, mode: int, alpha: complex) -> FockVector:
    """|alpha> on ``mode``, vacuum on every other mode."""
    return coherent_product(space, {space.check_mode(mode): alpha})


def coherent_product(space: ModeSpace, alphas) -> FockVector:
    """Product of coherent states; ``alphas`` maps mode -> amplitude (or is a sequence).

    Each single-mode factor is renormalized after truncation.  Raises
    :class:`TruncationError` when an amplitude is too large for the cutoff.
    """
    if not isinstance(alphas, dict):
        alphas = dict(enumerate(alphas))
    factors = []
    for mode in range(space.n_modes):
        alpha = complex(alphas.get(mode, 0.0))
        if not cutoff_admits(alpha, space.cutoff):
            raise TruncationError(
                f"|alpha|={abs(alpha):.3g} needs cutoff >= "
                f"{math.ceil(abs(alpha) ** 2 + 6 * abs(alpha) + 6)}, have {space.cutoff}"
            )
        c = coherent_amplitudes(alpha, space.cutoff)
        tail = float(np.sum(np.abs(c[space.cutoff - 2 :]) ** 2))
        if tail >= LEAK_TOL:
            raise TruncationError(
                f"truncation leak {tail:.2e} for |alpha|={abs(alpha):.3g} "
                f"at cutoff {space.cutoff}"
            )
        factors.append(c / np.linalg.norm(c))
    return FockVector(space, _product(factors).reshape(-1))


def inner_product(a: FockVector, b: FockVector) -> complex:
    """<a|b>, conjugate-linear in ``a``."""
    if a.space != b.space:
        raise SpaceMismatchError(f"{a.space} vs {b.space}")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def fidelity(a: FockVector, b: FockVector) -> float:
    return abs(inner_product(a, b)) ** 2


def tensor(a: FockVector, b: FockVector) -> FockVector:
    """a (x) b with the modes of ``a`` first."""
    if a.cutoff != b.cutoff:
        raise SpaceMismatchError(f"cutoffs differ: {a.cutoff} vs {b.cutoff}")
    space = ModeSpace(a.n_modes + b.n_modes, a.cutoff)
    return FockVector(space, np.multiply.outer(a.amplitudes, b.amplitudes).reshape(-1))


def superpose(terms: Iterable[tuple[complex, FockVector]], min_norm: float = 1e-8) -> FockVector:
    """Normalized linear combination; ``pre_norm`` keeps the raw norm."""
    terms = list(terms)
    if not terms:
        raise ValueError("empty superposition")
    space = terms[0][1].space
    amps = np.zeros(space.dim, dtype=complex)
    for coeff, state in terms:
        if state.space != space:
            raise SpaceMismatchError("superposed states live on different spaces")
        amps += complex(coeff) * state.amplitudes
    norm = float(np.linalg.norm(amps))
    if norm <= min_norm:
        raise DegenerateStateError(f"superposition norm {norm:.3e} below {min_norm}")
    return FockVector(space, amps / norm, pre_norm=norm)


def normalized(amplitudes: np.ndarray, space: ModeSpace) -> FockVector:
    amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
    norm = float(np.linalg.norm(amps))
    if norm <= 1e-8:
        raise DegenerateStateError(f"norm {norm:.3e} too small to normalize")
    return FockVector(space, amps / norm, pre_norm=norm)


def partial_trace(state: FockVector | WeightedEnsemble, keep: Sequence[int]) -> np.ndarray:
    """Reduced density matrix on ``keep`` (in the given order), flattened to 2-D."""
    if isinstance(state, WeightedEnsemble):
        return sum(w * partial_trace(s, keep) for w, s in state.components)
    keep = [state.space.check_mode(m) for m in keep]
    rest = [m for m in range(state.n_modes) if m not in keep]
    psi = np.transpose(state.tensor_view(), keep + rest)
    d_keep = state.cutoff ** len(keep)
    psi = psi.reshape(d_keep, -1)
    return psi @ psi.conj().T


def pair_terms(
    state: FockVector | WeightedEnsemble,
    modes: Sequence[int] = (0, 1),
    rel_cut: float = 1e-16,
) -> list[tuple[float, np.ndarray]]:
    """Reduced state on two modes as a weighted list of pure amplitude matrices.

    The reduced density matrix equals sum_k w_k vec(C_k) vec(C_k)^dagger,
    with each C_k of shape (cutoff, cutoff) and unit Frobenius norm.  Other
    modes are traced out through an SVD, so nothing of size dim^2 is formed.
    """
    if isinstance(state, WeightedEnsemble):
        out = []
        for w, s in state.components:
            out.extend((w * v, c) for v, c in pair_terms(s, modes, rel_cut))
        return out
    modes = [state.space.check_mode(m) for m in modes]
    if len(modes) != 2 or modes[0] == modes[1]:
        raise ValueError(f"need two distinct modes, got {modes}")
    d = state.cutoff
    rest = [m for m in range(state.n_modes) if m not in modes]
    psi = np.transpose(state.tensor_view(), modes + rest).reshape(d * d, -1)
    if psi.shape[1] == 1:
        return [(1.0, psi.reshape(d, d))]
    u, s, _ = np.linalg.svd(psi, full_matrices=False)
    w = s**2
    keep = w > rel_cut * w.sum()
    return [(float(wk), u[:, k].reshape(d, d)) for k, wk in zip(np.flatnonzero(keep), w[keep])]
