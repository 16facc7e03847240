import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from catwig.hilbert import ModeSpace, WeightedEnsemble, coherent_product, coherent_state, vacuum
from catwig.states import attach_meters
from catwig.qfunc import (
    GridError,
    QGrid,
    q_distance,
    q_marginal_XX,
    q_product_grid,
    q_value,
    x_kernel,
)
from closed_forms import q_fr_yz_marginal, q_fr_zz_marginal, q_three_peaks
from conftest import ALPHA

AXIS = (-9.0, 9.0, 91)
SP1 = ModeSpace(1, 40)


def test_vacuum_peak():
    assert abs(q_value(vacuum(SP1), [0]) - 1 / math.pi) < 1e-15


def test_coherent_state_peaks_at_itself():
    for a in (3, -2.5j, 1 + 1j):
        assert abs(q_value(coherent_state(SP1, 0, a), [a]) - 1 / math.pi) < 1e-12


def test_far_point_keeps_relative_accuracy():
    """Far from the peak Q is e^{-36}/pi; only the state's own truncation shows up."""
    q = q_value(coherent_state(SP1, 0, 3), [-3])
    assert abs(q * math.pi * math.exp(36) - 1) < 1e-5


def test_phase_point_validation(fr_zz):
    with pytest.raises(ValueError):
        q_value(fr_zz.state, [0])
    with pytest.raises(ValueError):
        q_value(fr_zz.state, [0, complex("nan")])


def test_full_grid_normalized():
    psi = coherent_product(ModeSpace(2, 20), [1.0, -0.5j])
    g = q_product_grid(psi, (-5, 5, 41), (-5, 5, 41))
    assert g.values.min() >= 0
    assert abs(g.integral() - 1) < 1e-6


def test_marginal_matches_closed_form(fr_zz):
    g = q_marginal_XX(fr_zz, AXIS)
    x, y = np.meshgrid(g.coords(0), g.coords(1), indexing="ij")
    ref = q_fr_zz_marginal(x, y, ALPHA, ALPHA)
    assert np.abs(g.values - ref).max() < 1e-8
    assert abs(g.integral() - 1) < 1e-6


def test_rotated_marginal_matches_closed_form(fr_family):
    g = q_marginal_XX(fr_family["yz"], AXIS)
    x, y = np.meshgrid(g.coords(0), g.coords(1), indexing="ij")
    assert np.abs(g.values - q_fr_yz_marginal(x, y, ALPHA, ALPHA)).max() < 1e-8


def test_evolved_zz_marginal_equals_yz(fr_zz, fr_family):
    ev = q_marginal_XX(fr_zz, AXIS, evolution=(-math.pi / 2, 0.0))
    direct = q_marginal_XX(fr_family["yz"], AXIS)
    assert q_distance(ev, direct)[0] < 1e-8


@pytest.mark.parametrize("times", [(0.3, 0.0), (1.1, -0.7), (math.pi / 2, 2.0)])
def test_kernel_path_matches_state_path(fr_zz, times):
    a = q_marginal_XX(fr_zz, AXIS, evolution=times, path="kernel", check_mass=False)
    b = q_marginal_XX(fr_zz, AXIS, evolution=times, path="state", check_mass=False)
    assert q_distance(a, b)[0] < 1e-10


def test_bad_path_rejected(fr_zz):
    with pytest.raises(ValueError):
        q_marginal_XX(fr_zz, AXIS, evolution=(0.1, 0.0), path="fast")


def test_mixture_marginal_is_three_peaks(mixtures):
    g = q_marginal_XX(mixtures["zz"], AXIS)
    x, y = np.meshgrid(g.coords(0), g.coords(1), indexing="ij")
    assert np.abs(g.values - q_three_peaks(x, y, ALPHA)).max() < 1e-10


def test_superposition_and_mixture_marginals_differ_only_by_fringe(fr_zz, mixtures):
    sup, l1 = q_distance(q_marginal_XX(fr_zz, AXIS), q_marginal_XX(mixtures["zz"], AXIS))
    # the zz fringe survives only as a tiny e^{-a^2-b^2} term near the origin
    assert sup < 1e-8 and l1 < 1e-8


def test_small_grid_raises(fr_zz):
    with pytest.raises(GridError):
        q_marginal_XX(fr_zz, (-2.0, 2.0, 21))
    g = q_marginal_XX(fr_zz, (-2.0, 2.0, 21), check_mass=False)
    assert g.integral() < 0.9


def test_marginal_on_meter_modes(fr_zz):
    """The meters carry the branch record, so their marginal is the three-peak mixture."""
    m = attach_meters(fr_zz, ALPHA)
    g = q_marginal_XX(m, AXIS, modes=(2, 3))
    assert g.axes[0][0] == "X_2"
    x, y = np.meshgrid(g.coords(0), g.coords(1), indexing="ij")
    assert np.abs(g.values - q_three_peaks(x, y, ALPHA)).max() < 1e-10


def test_csv_round_trip(fr_zz):
    g = q_marginal_XX(fr_zz, (-8.0, 8.0, 33), (-7.5, 8.0, 32))
    back = QGrid.from_csv(g.to_csv())
    assert back.axes == g.axes
    np.testing.assert_array_equal(back.values, g.values)
    assert g.to_csv().startswith("# axes: X_A[-8,8,33] X_B[-7.5,8,32]")


def test_csv_requires_header_and_two_axes():
    with pytest.raises(ValueError):
        QGrid.from_csv("1,2,3\n")
    g = q_product_grid(vacuum(ModeSpace(2, 4)), (-1, 1, 3), (-1, 1, 3))
    with pytest.raises(ValueError):
        g.to_csv()


def test_distance_rules(fr_zz):
    g = q_marginal_XX(fr_zz, AXIS)
    assert q_distance(g, g) == (0.0, 0.0)
    with pytest.raises(ValueError):
        q_distance(g, q_marginal_XX(fr_zz, (-9.0, 9.0, 89)))
    with pytest.raises(ValueError):
        QGrid(g.axes, g.values[:-1])


def test_kernel_vacuum_element():
    xs = np.linspace(-2, 2, 5)
    k = x_kernel(xs, 20)
    # (1/pi) int dP e^{-x^2 - P^2} over a wide P window
    np.testing.assert_allclose(k[:, 0, 0], np.exp(-(xs**2)) / math.sqrt(math.pi), atol=1e-12)
    assert not k.flags.writeable


@settings(max_examples=15)
@given(
    st.lists(st.tuples(st.floats(-2.5, 2.5), st.floats(-2.5, 2.5)), min_size=1, max_size=3),
    st.floats(0.05, 1.0),
)
def test_ensemble_marginal_positive_and_normalized(centres, w0):
    sp = ModeSpace(2, 30)
    states = [coherent_product(sp, list(c)) for c in centres]
    ws = [w0] + [1.0] * (len(states) - 1)
    ws = [w / sum(ws) for w in ws]
    ws[0] = 1 - sum(ws[1:])
    g = q_marginal_XX(WeightedEnsemble(tuple(zip(ws, states))), (-8.0, 8.0, 65))
    assert g.values.min() >= -1e-15
    assert abs(g.integral() - 1) < 1e-6
