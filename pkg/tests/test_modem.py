import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ofdmim import ConfigError, demodulate, modulate, qam
from ofdmim.modem import SUPPORTED_ORDERS, nearest_point

SQRT_HALF = 1 / np.sqrt(2)


def test_qpsk_first_label_in_first_quadrant():
    assert modulate([0, 0], qam(4)) == pytest.approx((1 + 1j) * SQRT_HALF)


def test_bpsk():
    c = qam(2)
    assert modulate([0], c) == 1
    assert modulate([1], c) == -1


@pytest.mark.parametrize("order", SUPPORTED_ORDERS)
def test_unit_average_energy(order):
    c = qam(order)
    energy = np.mean(np.abs(modulate(c.bit_labels, c)) ** 2)
    assert abs(energy - 1.0) < 1e-12


@pytest.mark.parametrize("order", SUPPORTED_ORDERS)
def test_noiseless_round_trip_and_idempotence(order):
    c = qam(order)
    labels = c.bit_labels
    assert len({tuple(r) for r in labels.tolist()}) == order
    np.testing.assert_array_equal(demodulate(modulate(labels, c), c), labels)
    np.testing.assert_array_equal(nearest_point(c.points, c), np.arange(order))


@pytest.mark.parametrize("order", [4, 16, 64, 256])
def test_gray_code_along_each_axis(order):
    c = qam(order)
    labels = c.bit_labels
    side = int(np.sqrt(order))
    for axis_values, other in ((c.points.real, c.points.imag), (c.points.imag, c.points.real)):
        # walk one row/column of the grid in amplitude order
        line = np.nonzero(np.isclose(other, other.max()))[0]
        line = line[np.argsort(axis_values[line])]
        assert len(line) == side
        for a, b in zip(line, line[1:]):
            assert np.sum(labels[a] != labels[b]) == 1


def test_nearest_neighbour_decision():
    assert demodulate((0.9 + 1.1j) * SQRT_HALF, qam(4)).tolist() == [0, 0]


def test_origin_tie_goes_to_lowest_index():
    assert demodulate(0j, qam(4)).tolist() == [0, 0]
    assert demodulate(0j, qam(16)).tolist() == qam(16).bit_labels[nearest_point(0j, qam(16))].tolist()
    assert nearest_point(0j, qam(16)) == min(
        np.nonzero(np.isclose(np.abs(qam(16).points), np.abs(qam(16).points).min()))[0]
    )


@given(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
       st.sampled_from(SUPPORTED_ORDERS))
def test_decision_regions_partition_the_plane(y, order):
    c = qam(order)
    idx = int(nearest_point(y, c))
    assert 0 <= idx < order
    d = np.abs(y - c.points)
    assert d[idx] == d.min()


def test_wrong_length_and_order():
    with pytest.raises(ValueError):
        modulate([0, 1, 0], qam(4))
    with pytest.raises(ConfigError):
        qam(8)
