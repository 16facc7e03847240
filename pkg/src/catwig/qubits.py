"""Exact dense state vectors for a few qubits.

Used as the two-level reference for the bosonic cat-state calculations:
the Bell-Wigner state family, the four-observer paradox states and
GHZ-encoded macroscopic qubits.  Qubit 0 is the most significant bit and
|0> is spin up.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

MAX_QUBITS = 20

SQ2 = np.sqrt(2.0)

PAULI = {
    "i": np.eye(2, dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# Columns are the eigenvectors (+1, -1) of each spin component in the z basis.
EIGENBASIS = {
    "z": np.eye(2, dtype=complex),
    "x": np.array([[1, 1], [1, -1]], dtype=complex) / SQ2,
    "y": np.array([[1, 1], [1j, -1j]], dtype=complex) / SQ2,
}


@dataclass(frozen=True, eq=False)
class QubitRegister:
    n: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if not 1 <= self.n <= MAX_QUBITS:
            raise ValueError(f"register size {self.n} outside 1..{MAX_QUBITS}")
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != 2**self.n:
            raise ValueError(f"expected {2**self.n} amplitudes, got {amps.size}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"register not normalized (norm {norm})")
        amps = amps.copy()
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    def tensor_view(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * self.n)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True)
class SpinOp:
    """Two-level spin observable (Hermitian, eigenvalues +-1)."""

    which: str
    matrix: np.ndarray

    @classmethod
    def of(cls, which: str) -> "SpinOp":
        if which not in ("x", "y", "z"):
            raise ValueError(f"unknown spin component {which!r}")
        return cls(which, PAULI[which])


def zero_state(n: int) -> QubitRegister:
    amps = np.zeros(2**n, dtype=complex)
    amps[0] = 1
    return QubitRegister(n, amps)


def from_amplitudes(amps, n: int | None = None) -> QubitRegister:
    amps = np.asarray(amps, dtype=complex).reshape(-1)
    if n is None:
        n = int(round(np.log2(amps.size)))
    return QubitRegister(n, amps / np.linalg.norm(amps))


def _apply(psi: np.ndarray, op: np.ndarray, qubits: Sequence[int]) -> np.ndarray:
    """Contract a 2^k x 2^k operator into the (2,)*n tensor ``psi``."""
    qubits = list(qubits)
    k = len(qubits)
    if op.shape != (2**k, 2**k):
        raise ValueError(f"operator shape {op.shape} does not act on {k} qubits")
    if len(set(qubits)) != k or any(not 0 <= q < psi.ndim for q in qubits):
        raise ValueError(f"bad qubit indices {qubits} for {psi.ndim} qubits")
    g = op.reshape((2,) * (2 * k))
    out = np.tensordot(g, psi, axes=(list(range(k, 2 * k)), qubits))
    # tensordot puts the operator's output axes first; move them back into place.
    return np.moveaxis(out, list(range(k)), qubits)


def apply_gate(state: QubitRegister, gate: np.ndarray, qubits: Sequence[int]) -> QubitRegister:
    """Apply a k-qubit ``gate`` (first listed qubit most significant)."""
    return QubitRegister(state.n, _apply(state.tensor_view(), gate, qubits).reshape(-1))


def cnot() -> np.ndarray:
    g = np.eye(4, dtype=complex)
    g[2:, 2:] = PAULI["x"]
    return g


def phase_split(phi: float) -> np.ndarray:
    """Unitary taking |0> to (|0> + e^{i phi}|1>)/sqrt(2)."""
    e = np.exp(1j * phi)
    return np.array([[1, -np.conj(e)], [e, 1]], dtype=complex) / SQ2


def setting_unitary(t_omega: float = -np.pi / 2) -> np.ndarray:
    """Two-level image of the Kerr rotation exp(-i n^2 Omega t) on {|a>, |-a>}.

    At Omega t = pi/2 this is e^{-i pi/4}(1 + i sigma_x)/sqrt(2); the default
    (Omega t = -pi/2) is its inverse, the y-setting rotation.
    """
    quarter = t_omega / (np.pi / 2)
    k = int(round(quarter))
    if abs(quarter - k) > 1e-12:
        raise ValueError("only quarter-period Kerr rotations map the cat qubit to itself")
    one_step = np.exp(-1j * np.pi / 4) * (PAULI["i"] + 1j * PAULI["x"]) / SQ2
    return np.linalg.matrix_power(one_step, k % 4)


def basis_amplitudes(state: QubitRegister, bases: Sequence[str]) -> np.ndarray:
    """Coordinates of ``state`` in the product of per-qubit eigenbases.

    Index 0 along each axis is the +1 eigenvector of that qubit's basis.
    """
    if len(bases) != state.n:
        raise ValueError("need one basis label per qubit")
    psi = state.tensor_view()
    for q, b in enumerate(bases):
        u = EIGENBASIS[b].conj().T
        psi = np.moveaxis(np.tensordot(u, psi, axes=(1, q)), 0, q)
    return psi


def brukner_state(theta: float, variant: str = "minus") -> QubitRegister:
    """-sin(theta/2)|phi-+> + eps cos(theta/2)|psi+> with eps = 1 (plus) or i (minus)."""
    s, c = np.sin(theta / 2), np.cos(theta / 2)
    if variant == "plus":
        amps = np.array([-s, c, c, s]) / SQ2  # |phi->: |00> - |11>
    elif variant == "minus":
        amps = np.array([-s, 1j * c, 1j * c, -s]) / SQ2  # |phi+>: |00> + |11>
    else:
        raise ValueError(f"variant must be 'plus' or 'minus', got {variant!r}")
    return QubitRegister(2, amps)


# (1/sqrt3)|H>|v> + sqrt(2/3)|T>|=>>, with |=>> = (|^> + |v>)/sqrt2; H, ^ are index 0.
_FR_Z = np.array([0, 1, 1, 1], dtype=complex) / np.sqrt(3)

_FR_BASES = {"zz": "zz", "xx": "xx", "xz": "xz", "zx": "zx"}


def fr_microscopic(basis: str = "zz") -> QubitRegister:
    """The two-laboratory FR state, with amplitudes expressed in ``basis``.

    The returned register's amplitude at index (a, b) is the coefficient on
    the (a-th eigenvector of lab A's basis) x (b-th of lab B's).
    """
    if basis not in _FR_BASES:
        raise ValueError(f"basis must be one of {sorted(_FR_BASES)}")
    state = QubitRegister(2, _FR_Z)
    return QubitRegister(2, basis_amplitudes(state, tuple(basis)).reshape(-1))


def fr_y_state() -> QubitRegister:
    """Two-level image of the coherent-state FR preparation: (|01> + |10> + i|11>)/sqrt3."""
    return QubitRegister(2, np.array([0, 1, 1, 1j]) / np.sqrt(3))


def ghz_build(n_total: int, phi: float = 0.0) -> QubitRegister:
    """(|0...0> + e^{i phi}|1...1>)/sqrt2 via a phase split and a CNOT chain."""
    if not 2 <= n_total <= MAX_QUBITS:
        raise ValueError(f"n_total must be in 2..{MAX_QUBITS}, got {n_total}")
    state = apply_gate(zero_state(n_total), phase_split(phi), [0])
    for q in range(1, n_total):
        state = apply_gate(state, cnot(), [q - 1, q])
    return state


def macro_encode(state: QubitRegister, n_per_lab: int) -> QubitRegister:
    """Copy each qubit of ``state`` onto a block of ``n_per_lab`` qubits by CNOT fan-out.

    Qubit j of the input becomes the first qubit of block j; |0> -> |0...0>,
    |1> -> |1...1>.
    """
    n_in = state.n
    n = n_in * n_per_lab
    psi = np.zeros((2,) * n, dtype=complex)
    idx = [0] * n
    for bits in np.ndindex(*(2,) * n_in):
        for j, b in enumerate(bits):
            idx[j * n_per_lab] = b
        psi[tuple(idx)] = state.tensor_view()[bits]
    out = QubitRegister(n, psi.reshape(-1))
    for j in range(n_in):
        head = j * n_per_lab
        for q in range(head + 1, head + n_per_lab):
            out = apply_gate(out, cnot(), [head, q])
    return out


def macro_spin_matrix(which: str, n: int) -> np.ndarray:
    """Spin operator on span{|0...0>, |1...1>} of n qubits, zero elsewhere."""
    dim = 2**n
    m = np.zeros((dim, dim), dtype=complex)
    ends = [0, dim - 1]
    p = PAULI[which]
    for i in range(2):
        for j in range(2):
            m[ends[i], ends[j]] = p[i, j]
    return m


def qubit_moments(
    state: QubitRegister,
    ops: Sequence[SpinOp | str],
    labs: Sequence[Sequence[int]] | None = None,
) -> float:
    """<op_1 (x) op_2 (x) ...> with one spin observable per lab.

    ``labs`` partitions the qubits; by default each qubit is its own lab.  A
    lab of k > 1 qubits gets the collective two-level operator on its
    all-up/all-down span.
    """
    if labs is None:
        labs = [[q] for q in range(state.n)]
    labs = [list(lab) for lab in labs]
    if len(ops) != len(labs):
        raise ValueError(f"{len(ops)} operators for {len(labs)} labs")
    used = sorted(q for lab in labs for q in lab)
    if used != list(range(state.n)):
        raise ValueError("labs must partition the register")
    psi = state.tensor_view()
    for op, lab in zip(ops, labs):
        which = op if isinstance(op, str) else op.which
        mat = op.matrix if isinstance(op, SpinOp) else PAULI[which]
        if len(lab) > 1:
            mat = macro_spin_matrix(which, len(lab))
        psi = _apply(psi, mat, lab)
    return float(np.vdot(state.amplitudes, psi.reshape(-1)).real)


def qubit_chsh(
    state: QubitRegister,
    settings: tuple[str, str] = ("z", "y"),
    labs: Sequence[Sequence[int]] | None = None,
) -> float:
    """<A1B1> + <A1B2> + <A2B1> - <A2B2> with settings (1, 2) at both labs."""
    s1, s2 = settings
    m = {
        (a, b): qubit_moments(state, (a, b), labs)
        for a in settings
        for b in settings
    }
    return m[s1, s1] + m[s1, s2] + m[s2, s1] - m[s2, s2]
