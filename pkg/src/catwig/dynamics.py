"""Measurement-setting unitaries.

The Kerr evolution exp(-i Omega n^2 t) acts diagonally in the Fock basis,
so it is applied as a phase table.  Only the product Omega*t matters; it
is reduced modulo 2*pi before the table is built.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .hilbert import (
    FockVector,
    ModeSpace,
    WeightedEnsemble,
    coherent_product,
    fidelity,
)
from .qubits import QubitRegister

LAB_MODES = {"A": 0, "B": 1}

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class KerrParams:
    """Kerr strength ``omega`` and (signed) interaction time ``t``."""

    omega: float = 1.0
    t: float = 0.0

    @property
    def turns(self) -> float:
        """Omega*t in units of full periods, reduced to [0, 1)."""
        return (self.omega * self.t / TWO_PI) % 1.0

    def phases(self, cutoff: int) -> np.ndarray:
        return _phase_table(self.turns, cutoff)


@lru_cache(maxsize=64)
def _phase_table(turns: float, cutoff: int) -> np.ndarray:
    n = np.arange(cutoff)
    quarter = turns * 4
    k = round(quarter)
    if abs(quarter - k) < 1e-14:
        # Quarter periods: n^2 mod 4 is 0 or 1, so the phases are exactly 1 or (-i)^k.
        k %= 4
        table = np.where(n % 2 == 0, 1.0 + 0j, (-1j) ** k)
    else:
        # Reduce turns*n^2 to its fractional part before exponentiating.
        frac = np.mod(turns * (n * n).astype(float), 1.0)
        table = np.exp(-2j * np.pi * frac)
    table = np.ascontiguousarray(table, dtype=complex)
    table.flags.writeable = False
    return table


def _phase_mode(state: FockVector, mode: int, phases: np.ndarray) -> FockVector:
    state.space.check_mode(mode)
    shape = [1] * state.n_modes
    shape[mode] = state.cutoff
    amps = state.tensor_view() * phases.reshape(shape)
    return state.with_amplitudes(amps.reshape(-1))


def kerr_evolve(state, mode: int, p: KerrParams):
    """Apply exp(-i Omega n^2 t) to one mode of a state or every ensemble member."""
    if isinstance(state, WeightedEnsemble):
        return state.map(lambda s: kerr_evolve(s, mode, p))
    return _phase_mode(state, mode, p.phases(state.cutoff))


def lab_mode(lab) -> int:
    if isinstance(lab, str):
        try:
            return LAB_MODES[lab.upper()]
        except KeyError:
            raise ValueError(f"lab must be 'A' or 'B', got {lab!r}") from None
    return int(lab)


def y_setting(omega: float = 1.0) -> KerrParams:
    """Inverse of the quarter-period cat rotation: Omega t = -pi/2 (same as 3pi/2)."""
    return KerrParams(omega, -math.pi / (2 * omega))


def measure_setting_y(state, lab, omega: float = 1.0):
    """Rotate lab ``lab`` so that sign binning of X reads out spin y."""
    return kerr_evolve(state, lab_mode(lab), y_setting(omega))


def apply_settings(state, settings, omega: float = 1.0):
    """Apply the y rotation on every lab whose setting is 'y'; 'z' is the identity."""
    for lab, s in zip("AB", settings):
        if s == "y":
            state = measure_setting_y(state, lab, omega)
        elif s != "z":
            raise ValueError(f"setting must be 'z' or 'y', got {s!r}")
    return state


@dataclass(frozen=True, eq=False)
class QubitMeterState:
    """Qubit register entangled with one bosonic meter mode.

    ``amplitudes[b, n]`` is the coefficient of |b>|n>, with b the register's
    basis index and n the meter occupation.  ``labels[b]`` is the coherent
    amplitude the meter carries in branch b.
    """

    n_qubits: int
    amplitudes: np.ndarray
    labels: np.ndarray

    def meter_branch(self, b: int) -> np.ndarray:
        return self.amplitudes[b]

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def qubit_meter_couple(
    qubit_state: QubitRegister,
    meter: FockVector,
    G_t: float,
    gamma0: complex,
    qubit: int = 0,
) -> QubitMeterState:
    """Evolve under G sigma_z(qubit) n_meter for time t.

    The coupling is diagonal, so each branch's meter picks up the phase
    e^{-+i G_t n}: the spin-up branch rotates |gamma0> to |gamma0 e^{-i G_t}>
    and spin-down to |gamma0 e^{+i G_t}>.
    """
    if meter.n_modes != 1:
        raise ValueError("meter must be a single mode")
    if not 0 <= qubit < qubit_state.n:
        raise ValueError(f"qubit {qubit} out of range")
    ref = coherent_product(ModeSpace(1, meter.cutoff), [gamma0])
    if fidelity(ref, meter) < 1 - 1e-10:
        raise ValueError("meter is not in the coherent state gamma0")
    n = np.arange(meter.cutoff)
    spin_down = (np.arange(2**qubit_state.n) >> (qubit_state.n - 1 - qubit)) & 1
    sign = np.where(spin_down == 1, 1.0, -1.0)  # exponent sign: -i for up, +i for down
    phase = np.exp(1j * G_t * np.outer(sign, n))
    amps = qubit_state.amplitudes[:, None] * meter.amplitudes[None, :] * phase
    labels = complex(gamma0) * np.exp(1j * G_t * sign)
    return QubitMeterState(qubit_state.n, amps, labels)
