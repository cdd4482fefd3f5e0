"""L-tap block-fading Rayleigh channels and AWGN.

Taps are i.i.d. CN(0, 1/L) (uniform power-delay profile) per antenna pair, so
every per-subcarrier coefficient is CN(0, 1). Frequency responses use the
plain (non-normalized) DFT of the zero-padded taps; combined with the unitary
OFDM modem this makes ``Y_n = H_n X_n`` exact whenever ``N_CP >= L - 1``.

Layouts: taps ``(..., rx, tx, L)``, frequency response ``(..., N_tot, rx, tx)``,
per-antenna signals ``(..., antennas, N_tot)``.
"""

from dataclasses import dataclass, field

import numpy as np

from ._validation import check_complex, check_positive_int


@dataclass(frozen=True)
class ChannelRealization:
    taps: np.ndarray = field(repr=False)
    freq: np.ndarray = field(repr=False)

    @property
    def n_taps(self):
        return self.taps.shape[-1]

    @property
    def n_rx(self):
        return self.taps.shape[-3]

    @property
    def n_tx(self):
        return self.taps.shape[-2]

    @property
    def n_tot(self):
        return self.freq.shape[-3]

    @classmethod
    def from_taps(cls, taps, n_tot):
        taps = check_complex(taps, "taps", min_ndim=3)
        return cls(taps, frequency_response(taps, n_tot))


def complex_normal(rng, shape, variance=1.0):
    """Circularly-symmetric complex Gaussian samples with the given total variance."""
    scale = np.sqrt(variance / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def frequency_response(taps, n_tot):
    """Per-subcarrier matrices from ``(..., rx, tx, L)`` taps -> ``(..., N_tot, rx, tx)``."""
    taps = np.asarray(taps)
    if taps.shape[-1] > n_tot:
        raise ValueError(f"{taps.shape[-1]} taps do not fit in {n_tot} subcarriers")
    freq = np.fft.fft(taps, n=n_tot, axis=-1)
    return np.ascontiguousarray(np.moveaxis(freq, -1, -3))


def draw_taps(rng, n_taps, n_rx, n_tx):
    return complex_normal(rng, (n_rx, n_tx, n_taps), 1.0 / n_taps)


def draw_channel(rng, n_taps, n_rx, n_tx, n_tot):
    """Draw one rx-by-tx L-tap Rayleigh realization."""
    n_taps = check_positive_int(n_taps, "n_taps")
    n_rx = check_positive_int(n_rx, "n_rx")
    n_tx = check_positive_int(n_tx, "n_tx")
    taps = draw_taps(rng, n_taps, n_rx, n_tx)
    return ChannelRealization(taps, frequency_response(taps, n_tot))


def propagate(freq, x, noise=None):
    """Per-subcarrier ``y_n = H_n x_n (+ w_n)``.

    `freq` is ``(..., N_tot, rx, tx)``, `x` is ``(..., tx, N_tot)``; the result is
    ``(..., rx, N_tot)``. `noise`, if given, is added as is.
    """
    freq = np.asarray(freq)
    x = np.asarray(x)
    if freq.shape[-1] != x.shape[-2] or freq.shape[-3] != x.shape[-1]:
        raise ValueError(
            f"channel {freq.shape[-3:]} (N_tot, rx, tx) does not match signal {x.shape[-2:]} (tx, N_tot)"
        )
    y = np.matmul(freq, np.swapaxes(x, -1, -2)[..., None])[..., 0]
    y = np.swapaxes(y, -1, -2)
    if noise is not None:
        y = y + noise
    return y


def _noise(rng, shape, noise_var):
    if noise_var < 0:
        raise ValueError("noise variance must be >= 0")
    if noise_var == 0:
        return None
    if rng is None:
        raise ValueError("an rng is required for nonzero noise")
    return complex_normal(rng, shape, noise_var)


def apply_uplink(channels, blocks, noise_var=0.0, rng=None):
    """Superpose U users at the base station.

    `channels` holds one realization per user (rx = N_R, tx = N_T) and `blocks`
    is ``(U, N_T, N_tot)``. Returns the ``(N_R, N_tot)`` received signal.
    """
    blocks = np.asarray(blocks)
    if len(channels) != blocks.shape[0]:
        raise ValueError(f"{len(channels)} channels for {blocks.shape[0]} users")
    n_rx = channels[0].n_rx
    if any(ch.n_rx != n_rx for ch in channels):
        raise ValueError("all users must reach the same number of receive antennas")
    stacked = np.concatenate([ch.freq for ch in channels], axis=-1)
    x = blocks.reshape((-1,) + blocks.shape[2:])
    noise = _noise(rng, (n_rx, blocks.shape[-1]), noise_var)
    return propagate(stacked, x, noise)


def apply_downlink(channels, precoded, noise_var=0.0, rng=None):
    """Broadcast the ``(N_T, N_tot)`` precoded signal to every user.

    Returns ``(U, N_R, N_tot)``; each user sees independent noise.
    """
    precoded = np.asarray(precoded)
    out = []
    for ch in channels:
        noise = _noise(rng, (ch.n_rx, precoded.shape[-1]), noise_var)
        out.append(propagate(ch.freq, precoded, noise))
    return np.stack(out)


def tapped_delay_line(taps, signal):
    """Time-domain MIMO convolution, truncated to the input length.

    `taps` is ``(..., rx, tx, L)``, `signal` is ``(..., tx, S)``; returns
    ``(..., rx, S)``. The line starts from rest (no previous block).
    """
    taps = np.asarray(taps)
    signal = np.asarray(signal)
    n_samples = signal.shape[-1]
    out_shape = np.broadcast_shapes(taps.shape[:-3], signal.shape[:-2]) + (taps.shape[-3], n_samples)
    out = np.zeros(out_shape, dtype=np.complex128)
    for lag in range(min(taps.shape[-1], n_samples)):
        out[..., lag:] += np.matmul(taps[..., lag], signal[..., : n_samples - lag])
    return out
