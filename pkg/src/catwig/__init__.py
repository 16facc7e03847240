"""Cat-state simulations of two-laboratory Wigner's-friend scenarios."""

from .dynamics import KerrParams, kerr_evolve, measure_setting_y, qubit_meter_couple
from .hilbert import (
    DegenerateStateError,
    DimensionError,
    FockVector,
    ModeSpace,
    SpaceMismatchError,
    TruncationError,
    WeightedEnsemble,
    coherent_state,
    inner_product,
    superpose,
    tensor,
)
from .hv import dmr_no_go, enumerate_dmr, lhv_chsh_max, wmr_model_check
from .measurement import OutcomeTable, SettingPair, chsh, pointer_probabilities, spin_moment
from .qfunc import GridError, QGrid, q_distance, q_marginal_XX, q_value
from .qubits import QubitRegister, SpinOp, brukner_state, fr_microscopic, ghz_build, qubit_moments
from .states import attach_meters, fr_mixture, fr_state, wf_state

__version__ = "0.1.0"
