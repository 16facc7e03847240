"""
Bell-Wigner correlations with entangled cat states
==================================================

Two cat modes stand in for two spins.  The sign of the X quadrature is the
spin-z readout; a quarter-period Kerr rotation before readout turns it into
spin-y.  Sweeping theta traces out the CHSH value.
"""

import math

import numpy as np

from catwig import measurement, qubits
from catwig.states import wf_state

ALPHA, CUTOFF = 3.0, 40

# The qubit version is exact; use it as the reference curve.
thetas = np.linspace(0, math.pi / 2, 5)
for th in thetas:
    cat = wf_state(th, ALPHA, ("z", "z"), CUTOFF)
    s_cat = measurement.chsh(cat)
    s_qubit = qubits.qubit_chsh(qubits.brukner_state(th))
    print(f"theta={th:.3f}  S(cat)={s_cat:+.6f}  S(qubit)={s_qubit:+.6f}")

# At theta = pi/4 both hit the Tsirelson bound, 2 sqrt2 in magnitude.
m = measurement.moments(wf_state(math.pi / 4, ALPHA, ("z", "z"), CUTOFF))
print({k: round(v, 6) for k, v in m.items()})
