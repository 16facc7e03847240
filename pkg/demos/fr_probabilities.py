"""
Four observers, one contradiction
=================================

The three-branch cat state has no ++ outcome at zz, vanishing -- at yz and
zy, and yet a 1/12 chance of -- at yy.  Deterministic hidden-variable rows
cannot produce all four facts at once.
"""

from catwig import hv, measurement, qubits
from catwig.states import fr_state

ALPHA, CUTOFF = 3.0, 40

for pair in ("zz", "yz", "zy", "yy"):
    p = measurement.pointer_probabilities(fr_state(pair, ALPHA, ALPHA, cutoff=CUTOFF))
    print(pair, " ".join(f"P({k})={p[k]:.3e}" for k in ("++", "+-", "-+", "--")))

# Same statistics from the two-qubit circuit in the x basis
print("qubit P(--|xx) =", qubits.fr_microscopic("xx").probabilities()[3])

# The only row that would explain -- at yy is ruled out by the zz fact.
print(hv.dmr_table_csv())
v = hv.dmr_no_go()
print(v.verdict, "witness:", [a.as_tuple() for a in v.witness], "unexplained:", v.unexplained)
