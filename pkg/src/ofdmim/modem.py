"""Gray-labelled square QAM (and BPSK) with unit average energy.

Point ``i`` of a constellation carries the big-endian bit label of ``i``.
For square QAM the first half of the label selects the in-phase level and
the second half the quadrature level; bit value 0 maps to the positive side,
so for 4-QAM the label ``00`` is ``(1 + 1j) / sqrt(2)``.
"""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ._validation import ConfigError, check_bits

SUPPORTED_ORDERS = (2, 4, 16, 64, 256)


def _gray_to_binary(g):
    b = g
    shift = g >> 1
    while np.any(shift):
        b = b ^ shift
        shift = shift >> 1
    return b


def _pam_levels(n_bits):
    """PAM amplitude for every Gray label of `n_bits` bits."""
    side = 1 << n_bits
    labels = np.arange(side)
    return (side - 1) - 2 * _gray_to_binary(labels)


@dataclass(frozen=True)
class Constellation:
    order: int
    points: np.ndarray = field(repr=False, compare=False)

    @property
    def bits_per_symbol(self):
        return self.order.bit_length() - 1

    @property
    def bit_labels(self):
        """(M, log2 M) array; row i is the label of ``points[i]``."""
        m = self.bits_per_symbol
        shifts = np.arange(m - 1, -1, -1)
        return ((np.arange(self.order)[:, None] >> shifts) & 1).astype(np.uint8)

    def __eq__(self, other):
        if not isinstance(other, Constellation):
            return NotImplemented
        return self.order == other.order

    def __hash__(self):
        return hash(self.order)

    def modulate(self, bits):
        return modulate(bits, self)

    def demodulate(self, symbols):
        return demodulate(symbols, self)


@lru_cache(maxsize=None)
def qam(order):
    """Gray-coded unit-energy constellation of the given order."""
    if order not in SUPPORTED_ORDERS:
        raise ConfigError(f"unsupported modulation order {order}; choose from {SUPPORTED_ORDERS}")
    if order == 2:
        points = np.array([1.0 + 0j, -1.0 + 0j])
    else:
        half = (order.bit_length() - 1) // 2
        levels = _pam_levels(half)
        labels = np.arange(order)
        i_part = levels[labels >> half]
        q_part = levels[labels & ((1 << half) - 1)]
        points = (i_part + 1j * q_part) / np.sqrt(2.0 * (order - 1) / 3.0)
    points = points.astype(np.complex128)
    points.setflags(write=False)
    return Constellation(order, points)


def bits_to_symbol_index(bits, constellation):
    m = constellation.bits_per_symbol
    bits = check_bits(bits, m, "symbol bits")
    weights = 1 << np.arange(m - 1, -1, -1)
    return bits.astype(np.int64) @ weights


def symbol_index_to_bits(index, constellation):
    m = constellation.bits_per_symbol
    shifts = np.arange(m - 1, -1, -1)
    return ((np.asarray(index)[..., None] >> shifts) & 1).astype(np.uint8)


def modulate(bits, constellation):
    """Map bit labels (last axis of length log2 M) to constellation points."""
    return constellation.points[bits_to_symbol_index(bits, constellation)]


def nearest_point(symbols, constellation):
    """Index of the closest point; exact ties resolve to the lowest index."""
    y = np.asarray(symbols, dtype=np.complex128)
    dist = np.abs(y[..., None] - constellation.points) ** 2
    return np.argmin(dist, axis=-1)


def demodulate(symbols, constellation):
    """Hard-decision demodulation; returns bits along a new last axis."""
    return symbol_index_to_bits(nearest_point(symbols, constellation), constellation)
