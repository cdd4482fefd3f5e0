"""OFDM-IM block assembly, interleaved grouping and the unitary OFDM modem.

Array conventions: a group is the last axis of length N, a set of groups is
``(..., G, N)`` and a block is ``(..., N_tot)``. 1-based subcarrier numbering
is used only for combinations; array positions are 0-based.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import check_complex, check_length


@dataclass(frozen=True)
class GroupSymbol:
    indices: tuple
    symbols: np.ndarray
    placed: np.ndarray


def assemble_group(indices, symbols, n_group):
    """Place K symbols on the 1-based positions `indices` of an N-vector."""
    idx = np.asarray(indices, dtype=np.int64)
    symbols = np.asarray(symbols, dtype=np.complex128)
    if idx.ndim != 1 or symbols.shape != idx.shape:
        raise ValueError("indices and symbols must be 1-D with equal length")
    if np.any(idx < 1) or np.any(idx > n_group):
        raise ValueError(f"indices must lie in [1, {n_group}]")
    if np.any(np.diff(idx) <= 0):
        raise ValueError("indices must be strictly increasing")
    placed = np.zeros(n_group, dtype=np.complex128)
    placed[idx - 1] = symbols
    return GroupSymbol(tuple(int(i) for i in idx), symbols, placed)


def place_symbols(rows, symbols, n_group):
    """Vectorized placement: `rows` (..., K) 1-based positions, `symbols` (..., K)."""
    rows = np.asarray(rows)
    out = np.zeros(rows.shape[:-1] + (n_group,), dtype=np.complex128)
    np.put_along_axis(out, rows - 1, symbols, axis=-1)
    return out


def interleave(groups):
    """Merge ``(..., G, N)`` groups so that element m of group g lands at g + m*G."""
    groups = np.asarray(groups)
    if groups.ndim < 2:
        raise ValueError("groups must have shape (..., G, N)")
    n_groups, n_group = groups.shape[-2:]
    return np.swapaxes(groups, -1, -2).reshape(groups.shape[:-2] + (n_groups * n_group,))


def deinterleave(block, n_groups):
    """Inverse of :func:`interleave`; returns ``(..., G, N)``."""
    block = np.asarray(block)
    n_tot = block.shape[-1]
    if n_groups < 1 or n_tot % n_groups:
        raise ValueError(f"block length {n_tot} is not a multiple of G={n_groups}")
    n_group = n_tot // n_groups
    return np.swapaxes(block.reshape(block.shape[:-1] + (n_group, n_groups)), -1, -2)


def to_time_domain(block, n_cp):
    """Unitary IDFT of the last axis, with the last `n_cp` samples prepended."""
    block = check_complex(block, "block", min_ndim=1)
    if not 0 <= n_cp <= block.shape[-1]:
        raise ValueError(f"cyclic prefix length {n_cp} outside [0, {block.shape[-1]}]")
    payload = np.fft.ifft(block, axis=-1, norm="ortho")
    if n_cp == 0:
        return payload
    return np.concatenate([payload[..., -n_cp:], payload], axis=-1)


def to_freq_domain(signal, n_tot, n_cp):
    """Drop the cyclic prefix and apply the unitary DFT."""
    signal = check_complex(signal, "signal", min_ndim=1, finite=False)
    check_length(signal, n_tot + n_cp, "signal")
    return np.fft.fft(signal[..., n_cp:], axis=-1, norm="ortho")


def papr_of(signal):
    """Peak-to-average power ratio in dB over the last axis."""
    power = np.abs(np.asarray(signal, dtype=np.complex128)) ** 2
    mean = power.mean(axis=-1)
    if np.any(mean == 0):
        raise ValueError("PAPR is undefined for an all-zero signal")
    return 10.0 * np.log10(power.max(axis=-1) / mean)


def power_scale(n_tot, n_groups, k_active):
    """Amplitude factor that gives a G*K-sparse block the energy of a full block."""
    return np.sqrt(n_tot / (n_groups * k_active))
