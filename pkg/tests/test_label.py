import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mscf.core import InvalidArgument
from mscf.label import cruciform_label, gaussian_label, ideal_label, roll_to_origin


def support_count_oracle(rows, cols, bar_h, arm_c, arm_r, bar_w):
    """Count cells inside either centred bar by explicit membership tests."""
    def inside(i, j, h, w):
        r0, c0 = rows // 2 - h // 2, cols // 2 - w // 2
        return r0 <= i < r0 + h and c0 <= j < c0 + w
    return sum(
        inside(i, j, bar_h, arm_c) or inside(i, j, arm_r, bar_w)
        for i in range(rows) for j in range(cols)
    )


def test_gaussian_centre_and_sigma_offset():
    y1 = gaussian_label(21, 21, (4, 4), 1 / 16)
    assert y1.sigma == 0.25
    assert y1.values[10, 10] == 1.0
    wide = gaussian_label(41, 41, (16, 16), 0.5)
    assert wide.sigma == 8.0
    assert wide.values[20 + 8, 20] == pytest.approx(math.exp(-0.5), abs=1e-15)
    assert wide.values[20 + 8, 20] == pytest.approx(0.60653, abs=1e-5)


@pytest.mark.parametrize("shape", [(9, 9), (10, 14)])
def test_gaussian_symmetry(shape):
    y1 = gaussian_label(*shape, (3, 5), 0.3).values
    cr, cc = shape[0] // 2, shape[1] // 2
    for k in range(1, 4):
        assert y1[cr + k, cc] == y1[cr - k, cc]
        assert y1[cr, cc + k] == y1[cr, cc - k]
    assert np.all((y1 > 0) & (y1 <= 1))


def test_gaussian_rejects_empty_grid():
    with pytest.raises(InvalidArgument):
        gaussian_label(0, 4, (2, 2), 0.1)


def test_cruciform_support_count():
    y2 = cruciform_label(20, 20, (4, 4), 2.5, 0.1)
    assert (y2.arm_len_rows, y2.arm_len_cols) == (10, 10)
    assert (y2.bar_height_cells, y2.bar_width_cells) == (4, 4)
    assert np.count_nonzero(y2.values) == 64
    assert support_count_oracle(20, 20, 4, 10, 10, 4) == 64
    assert set(np.unique(y2.values)) == {0.0, 0.1}
    assert y2.values[10, 10] == 0.1


@settings(max_examples=50, deadline=None)
@given(
    rows=st.integers(1, 24), cols=st.integers(1, 24),
    rt=st.integers(1, 8), ct=st.integers(1, 8), ratio=st.floats(0.2, 4.0),
)
def test_cruciform_matches_count_oracle(rows, cols, rt, ct, ratio):
    y2 = cruciform_label(rows, cols, (rt, ct), ratio, 1.0)
    expected = support_count_oracle(
        rows, cols, y2.bar_height_cells, y2.arm_len_cols, y2.arm_len_rows, y2.bar_width_cells
    )
    assert np.count_nonzero(y2.values) == expected
    assert y2.values[rows // 2, cols // 2] == 1.0


@pytest.mark.parametrize("n, target, ratio", [(21, (3, 5), 3.0), (20, (4, 4), 2.5)])
def test_cruciform_mirror_symmetry(n, target, ratio):
    # odd lengths on odd grids, even lengths on even grids
    v = cruciform_label(n, n, target, ratio, 0.1).values
    np.testing.assert_array_equal(v, v[::-1, :])
    np.testing.assert_array_equal(v, v[:, ::-1])


def test_zero_altitude_and_bad_ratio():
    assert not cruciform_label(12, 12, (4, 4), 2.5, 0.0).values.any()
    with pytest.raises(InvalidArgument):
        cruciform_label(12, 12, (4, 4), 0.0, 0.1)


@pytest.fixture
def labels():
    return gaussian_label(20, 20, (4, 4), 1 / 16), cruciform_label(20, 20, (4, 4), 2.5, 0.1)


@pytest.mark.parametrize("psi", [0.0, 0.5, 1.0])
def test_pedestal_scaling(labels, psi):
    y1, y2 = labels
    omega = ideal_label(y1, y2, 0.044, psi)
    np.testing.assert_array_equal(omega.values, y1.values + (1 - 0.044 * psi) * y2.values)
    assert omega.psi_used == psi
    if psi == 0.0:
        np.testing.assert_array_equal(omega.values, y1.values + y2.values)
    assert omega.values.max() == omega.values[10, 10] == 1 + (1 - 0.044 * psi) * 0.1


def test_full_mutation_scales_pedestal_by_0956(labels):
    y1, y2 = labels
    omega = ideal_label(y1, y2, 0.044, 1.0)
    off_peak = (10, 6)
    assert y1.values[off_peak] < 1e-30
    assert omega.values[off_peak] == pytest.approx(0.956 * 0.1, abs=1e-15)


def test_empty_pedestal_gives_gaussian(labels):
    y1, _ = labels
    flat = cruciform_label(20, 20, (4, 4), 2.5, 0.0)
    np.testing.assert_array_equal(ideal_label(y1, flat, 0.044, 0.7).values, y1.values)


def test_monotone_in_psi(labels):
    y1, y2 = labels
    previous = ideal_label(y1, y2, 0.044, 0.0).values
    for psi in np.linspace(0.1, 1.0, 10):
        current = ideal_label(y1, y2, 0.044, psi).values
        assert np.all(current <= previous)
        assert np.all(current >= y1.values)
        previous = current


def test_ideal_label_argument_checks(labels):
    y1, y2 = labels
    with pytest.raises(InvalidArgument):
        ideal_label(y1, y2, 1.5, 1.0)
    with pytest.raises(InvalidArgument):
        ideal_label(y1, y2, 0.044, 1.2)


def test_roll_to_origin_moves_centre():
    v = np.zeros((6, 7))
    v[3, 3] = 1
    rolled = roll_to_origin(v)
    assert rolled[0, 0] == 1 and rolled.sum() == 1
