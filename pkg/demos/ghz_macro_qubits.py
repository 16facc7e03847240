"""
GHZ registers and macroscopic qubit blocks
==========================================

A logical qubit copied into a block of n physical qubits behaves like a
macroscopic spin: block-parity readout keeps the full Bell violation.
"""

import math

from catwig import qubits

g = qubits.ghz_build(4, math.pi / 3)
print("GHZ(4) nonzero amplitudes:", g.amplitudes[[0, -1]])

pair = qubits.brukner_state(math.pi / 4)
for n in (1, 2, 3, 4):
    enc = qubits.macro_encode(pair, n)
    labs = [list(range(n)), list(range(n, 2 * n))]
    print(f"block size {n}: S = {qubits.qubit_chsh(enc, labs=labs):+.12f}")
