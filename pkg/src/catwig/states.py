"""Named cat states for the two-laboratory scenarios.

Every state here is a superposition of coherent products |s_A a>|s_B b>
with signs s = +-1.  Mode order is A, B, then meters Am, Bm, then
friend records FA, FB (only the modes in use are allocated).
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dynamics import apply_settings
from .hilbert import (
    DegenerateStateError,
    FockVector,
    ModeSpace,
    WeightedEnsemble,
    coherent_product,
    default_cutoff,
    superpose,
)

SIGNS = (1, -1)
BASES = ("z", "y")

# Below this amplitude the two branches of a lab overlap by more than e^-8.
DISTINCT_AMPLITUDE = 2.0


class BranchOverlapWarning(UserWarning):
    """Coherent branches overlap too much to count as macroscopically distinct."""


def _warn_overlap(*amps: float) -> None:
    small = [a for a in amps if abs(a) < DISTINCT_AMPLITUDE]
    if small:
        warnings.warn(
            f"amplitude {min(small, key=abs):.3g} < {DISTINCT_AMPLITUDE}: branches "
            f"overlap by e^-2a^2 = {math.exp(-2 * min(abs(a) for a in small) ** 2):.2e}",
            BranchOverlapWarning,
            stacklevel=3,
        )


def _check_pair(pair: Sequence[str]) -> tuple[str, str]:
    pair = tuple(pair)
    if len(pair) != 2 or any(b not in BASES for b in pair):
        raise ValueError(f"basis pair must be two of {BASES}, got {pair!r}")
    return pair


@dataclass(frozen=True, eq=False)
class WFState:
    theta: float
    alpha: float
    basis_pair: tuple[str, str]
    state: FockVector


@dataclass(frozen=True, eq=False)
class FRState:
    variant: str
    alpha: float
    beta: float
    gamma: float | None
    state: FockVector


def branch(space: ModeSpace, amps: Sequence[complex], signs: Sequence[int]) -> FockVector:
    """Coherent product with mode k at ``signs[k] * amps[k]``."""
    return coherent_product(space, [s * a for s, a in zip(signs, amps)])


def branch_coefficients(
    state: FockVector,
    amps: Sequence[complex],
    branches: Sequence[Sequence[int]] | None = None,
    residual_tol: float | None = None,
) -> dict[tuple[int, ...], complex]:
    """Expand ``state`` on the coherent products |s_k amps[k]>.

    The branches are not exactly orthogonal, so the coefficients come from
    solving the Gram system rather than plain projection.  With
    ``residual_tol`` set, a state outside the branch span raises.
    """
    if len(amps) != state.n_modes:
        raise ValueError("one amplitude per mode required")
    if branches is None:
        branches = list(itertools.product(SIGNS, repeat=state.n_modes))
    branches = [tuple(b) for b in branches]
    vecs = np.array([branch(state.space, amps, b).amplitudes for b in branches])
    gram = vecs.conj() @ vecs.T
    proj = vecs.conj() @ state.amplitudes
    coeffs = np.linalg.solve(gram, proj)
    if residual_tol is not None:
        resid = np.linalg.norm(state.amplitudes - coeffs @ vecs)
        if resid > residual_tol:
            raise ValueError(f"state lies outside the branch span (residual {resid:.2e})")
    return dict(zip(branches, coeffs))


def _two_mode(terms, alpha, beta, cutoff) -> FockVector:
    space = ModeSpace(2, cutoff)
    return superpose([(c, branch(space, (alpha, beta), s)) for s, c in terms])


def wf_state(theta: float, alpha: float, basis_pair=("z", "z"), cutoff: int | None = None) -> WFState:
    """Cat-state version of the Bell-Wigner family.

    In the z basis: A (|a,a> + |-a,-a>) + B (|a,-a> + |-a,a>) with
    A = -sin(theta/2)/sqrt2 and B = i cos(theta/2)/sqrt2.  Other basis
    pairs are obtained by the y-setting Kerr rotation on the y labs.
    """
    pair = _check_pair(basis_pair)
    _warn_overlap(alpha)
    cutoff = cutoff or default_cutoff(alpha)
    a = -math.sin(theta / 2) / math.sqrt(2)
    b = 1j * math.cos(theta / 2) / math.sqrt(2)
    zz = _two_mode([((1, 1), a), ((-1, -1), a), ((1, -1), b), ((-1, 1), b)], alpha, alpha, cutoff)
    return WFState(theta, alpha, pair, apply_settings(zz, pair))


FR_VARIANTS = ("zz", "yz", "zy", "yy", "zz+meters", "zz+meters+friends")

# Branch weights of the FR preparation: no |a>|b> term.
FR_ZZ_TERMS = (((1, -1), 1.0), ((-1, 1), 1.0), ((-1, -1), 1j))


def fr_state(
    variant: str,
    alpha: float,
    beta: float,
    gamma: float | None = None,
    cutoff: int | None = None,
) -> FRState:
    """(|a,-b> + |-a,b> + i|-a,-b>)/sqrt3 and its rotated or metered forms.

    ``yz`` means lab A is rotated to the y setting and lab B is left in z.
    """
    if variant not in FR_VARIANTS:
        raise ValueError(f"variant must be one of {FR_VARIANTS}, got {variant!r}")
    metered = variant.startswith("zz+")
    if metered and gamma is None:
        raise ValueError(f"variant {variant!r} needs a meter amplitude gamma")
    _warn_overlap(alpha, beta)
    cutoff = cutoff or default_cutoff(max(abs(alpha), abs(beta), abs(gamma or 0)))
    s = 1 / math.sqrt(3)
    zz = _two_mode([(b, c * s) for b, c in FR_ZZ_TERMS], alpha, beta, cutoff)
    if metered:
        friends = variant.endswith("friends")
        state = attach_meters(zz, gamma, (alpha, beta), friends=friends)
    else:
        state = apply_settings(zz, variant[:2])
    return FRState(variant, alpha, beta, gamma, state)


def _is_degenerate(a: float) -> bool:
    # |<a|-a>| = e^{-2a^2} equals 1 to double precision below this.
    return abs(a) < 1e-6


def fr_mixture(which: str, alpha: float, beta: float, cutoff: int | None = None) -> WeightedEnsemble:
    """Comparison mixtures for the FR state.

    zz:   equal mixture of the three branches.
    mixA: 1/3 |a,-b>  +  2/3 |-a> (|b> + i|-b>)/sqrt2
    mixB: 1/3 |-a,b>  +  2/3 (|a> + i|-a>)/sqrt2 |-b>
    """
    if which not in ("zz", "mixA", "mixB"):
        raise ValueError(f"mixture must be zz, mixA or mixB, got {which!r}")
    _warn_overlap(alpha, beta)
    cutoff = cutoff or default_cutoff(max(abs(alpha), abs(beta)))
    space = ModeSpace(2, cutoff)
    ab = (alpha, beta)
    if which == "zz":
        if _is_degenerate(alpha) or _is_degenerate(beta):
            raise DegenerateStateError("branches coincide: amplitude is zero")
        return WeightedEnsemble(tuple((1 / 3, branch(space, ab, b)) for b, _ in FR_ZZ_TERMS))
    if which == "mixA":
        if _is_degenerate(beta):
            raise DegenerateStateError("lab B branches coincide (beta = 0)")
        pure = branch(space, ab, (1, -1))
        cat = superpose([(1, branch(space, ab, (-1, 1))), (1j, branch(space, ab, (-1, -1)))])
    else:
        if _is_degenerate(alpha):
            raise DegenerateStateError("lab A branches coincide (alpha = 0)")
        pure = branch(space, ab, (-1, 1))
        cat = superpose([(1, branch(space, ab, (1, -1))), (1j, branch(space, ab, (-1, -1)))])
    return WeightedEnsemble(((1 / 3, pure), (2 / 3, cat)))


def _lab_indices(which_labs) -> list[int]:
    labs = sorted({"A": 0, "B": 1}[lab] for lab in which_labs)
    if not labs:
        raise ValueError("need at least one lab to meter")
    return labs


def attach_meters(
    s,
    gamma: float,
    system_amps: Sequence[float] | None = None,
    which_labs=("A", "B"),
    friends: bool = False,
):
    """Record each lab's z branch in a meter mode (and optionally a friend mode).

    The branch with sign s on lab k gains a factor |s gamma> on that lab's
    meter.  ``system_amps`` are the coherent amplitudes (a, b) of the
    system branches; they default to those stored on a WF/FR state.
    Ensembles are metered component by component.
    """
    if isinstance(s, (WFState, FRState)):
        if system_amps is None:
            system_amps = (s.alpha, s.alpha) if isinstance(s, WFState) else (s.alpha, s.beta)
        s = s.state
    if system_amps is None:
        raise ValueError("system_amps needed for a bare state")
    if isinstance(s, WeightedEnsemble):
        return s.map(lambda c: attach_meters(c, gamma, system_amps, which_labs, friends))
    if s.n_modes != 2:
        raise ValueError("meters attach to a two-mode system state")
    labs = _lab_indices(which_labs)
    layers = 2 if friends else 1
    coeffs = branch_coefficients(s, system_amps, residual_tol=1e-8)
    space = ModeSpace(2 + layers * len(labs), s.cutoff)
    amps = tuple(system_amps) + (gamma,) * (layers * len(labs))
    terms = []
    for signs, c in coeffs.items():
        tags = tuple(signs[k] for k in labs) * layers
        terms.append((c, branch(space, amps, signs + tags)))
    return superpose(terms)


def detach_meters(
    state: FockVector,
    system_amps: Sequence[float],
    gamma: float,
    which_labs=("A", "B"),
    friends: bool = False,
    tol: float = 1e-8,
) -> FockVector:
    """Undo :func:`attach_meters`, checking the meters only carry branch tags."""
    labs = _lab_indices(which_labs)
    layers = 2 if friends else 1
    if state.n_modes != 2 + layers * len(labs):
        raise ValueError("mode count does not match the requested meter layout")
    amps = tuple(system_amps) + (gamma,) * (layers * len(labs))
    sys_branches = list(itertools.product(SIGNS, repeat=2))
    tagged = [b + tuple(b[k] for k in labs) * layers for b in sys_branches]
    coeffs = branch_coefficients(state, amps, tagged, residual_tol=tol)
    return _two_mode(
        [(b, coeffs[t]) for b, t in zip(sys_branches, tagged)],
        system_amps[0],
        system_amps[1],
        state.cutoff,
    )
