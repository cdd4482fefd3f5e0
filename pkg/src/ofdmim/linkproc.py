"""Per-subcarrier MMSE equalization and precoding, and the OFDM-IM detector.

Everything here is batched: leading axes of the inputs (trials, subcarriers,
users...) are carried through untouched, and every small matrix problem is
solved independently.
"""

from dataclasses import dataclass, field

import numpy as np

from ._validation import check_complex, check_snr
from .modem import nearest_point, symbol_index_to_bits


def _hermitian(a):
    return np.conj(np.swapaxes(a, -1, -2))


def mmse_filter(H, rho):
    """``(H^H H + I / rho)^{-1} H^H`` for every matrix in a ``(..., rx, tx)`` stack.

    Solved through the regularized Gram matrix, which is positive definite for
    any finite `rho` > 0, so no explicit inverse or pseudo-inverse is formed.
    """
    H = check_complex(H, "H", min_ndim=2)
    rho = check_snr(rho)
    Hh = _hermitian(H)
    gram = Hh @ H
    n = gram.shape[-1]
    reg = (1.0 / rho)[..., None, None] * np.eye(n)
    return np.linalg.solve(gram + reg, Hh)


def equalize_uplink(y, H, rho, W=None):
    """Apply the MMSE filter to per-subcarrier receive vectors.

    Parameters
    ----------
    y : array, shape (..., N_R)
    H : array, shape (..., N_R, U*N_T)
        Users' channels stacked column-wise.
    rho : float
    W : array, optional
        Precomputed filter matching `H`.

    Returns
    -------
    array, shape (..., U*N_T), ordered user-major then antenna.
    """
    H = np.asarray(H)
    y = np.asarray(y)
    if H.shape[-2] < H.shape[-1]:
        raise ValueError(f"uplink needs N_R >= U*N_T, got H of shape {H.shape[-2:]}")
    if y.shape[-1] != H.shape[-2]:
        raise ValueError(f"receive vector length {y.shape[-1]} does not match N_R={H.shape[-2]}")
    if W is not None:
        return (W @ y[..., None])[..., 0]
    # same estimate as W @ y, with one right-hand side instead of N_R
    H = check_complex(H, "H", min_ndim=2)
    rho = check_snr(rho)
    Hh = _hermitian(H)
    gram = Hh @ H
    reg = (1.0 / rho)[..., None, None] * np.eye(gram.shape[-1])
    return np.linalg.solve(gram + reg, Hh @ y[..., None])[..., 0]


@dataclass(frozen=True)
class Precoder:
    """MMSE precoder ``P_n = [P_n1 ... P_nU]`` and its power normalization."""

    matrices: np.ndarray = field(repr=False)
    gamma: np.ndarray = field(repr=False)
    n_users: int

    def user_block(self, u):
        width = self.matrices.shape[-1] // self.n_users
        return self.matrices[..., u * width:(u + 1) * width]


def build_precoder(H, rho, n_users):
    """Build the downlink precoder from the users' stacked channels.

    `H` is ``(..., U*N_R, N_T)`` with user blocks stacked row-wise. The
    identity inside the inverse is sized to ``H^H H`` (N_T by N_T).
    ``gamma = sqrt(U / trace(P P^H))``.
    """
    H = check_complex(H, "H", min_ndim=2)
    if H.shape[-2] % n_users:
        raise ValueError(f"{H.shape[-2]} stacked receive antennas do not split over {n_users} users")
    if H.shape[-1] < H.shape[-2]:
        raise ValueError(f"downlink needs N_T >= U*N_R, got H of shape {H.shape[-2:]}")
    P = mmse_filter(H, rho)
    power = np.sum(np.abs(P) ** 2, axis=(-2, -1))
    gamma = np.sqrt(n_users / power)
    return Precoder(P, gamma, n_users)


def precode(precoder, x):
    """``gamma_n * sum_u P_nu x_nu`` for stacked ``(..., U*N_R)`` user symbols."""
    x = np.asarray(x)
    return precoder.gamma[..., None] * (precoder.matrices @ x[..., None])[..., 0]


def receiver_scale(y, gamma):
    """Downlink user-side normalization ``y / gamma`` (gamma broadcasts over the last axis)."""
    gamma = np.asarray(gamma, dtype=float)
    if np.any(gamma <= 0):
        raise ValueError("gamma must be > 0")
    return np.asarray(y) / gamma[..., None]


def decision_metric(x_tilde, table, metric="abs"):
    """Score every table row: sum of |x| (or |x|^2) over its active positions.

    Returns ``(..., 2**p1)``.
    """
    if table.rows is None:
        raise ValueError(
            f"detection needs a materialized table; 2**{table.p1} rows exceeds the limit"
        )
    x_tilde = np.asarray(x_tilde)
    if x_tilde.shape[-1] != table.n_group:
        raise ValueError(f"group vector must have length {table.n_group}, got {x_tilde.shape[-1]}")
    if metric == "abs":
        mag = np.abs(x_tilde)
    elif metric == "abs2":
        mag = np.abs(x_tilde) ** 2
    else:
        raise ValueError(f"unknown metric {metric!r}")
    return mag[..., table.rows - 1].sum(axis=-1)


@dataclass(frozen=True)
class Detection:
    row: np.ndarray
    indices: np.ndarray
    symbol_index: np.ndarray
    symbol_bits: np.ndarray
    metric: np.ndarray = field(repr=False)


def detect_group(x_tilde, table, constellation, scale=1.0, metric="abs"):
    """Two-stage OFDM-IM detection of ``(..., N)`` equalized group vectors.

    The row with the largest decision metric wins (lowest row on exact ties);
    the symbols on its positions are divided by `scale` (the transmit power
    factor) and hard-demodulated.
    """
    d = decision_metric(x_tilde, table, metric)
    row = np.argmax(d, axis=-1)
    indices = table.rows[row]
    collected = np.take_along_axis(np.asarray(x_tilde), indices - 1, axis=-1) / scale
    sym = nearest_point(collected, constellation)
    bits = symbol_index_to_bits(sym, constellation)
    bits = bits.reshape(bits.shape[:-2] + (-1,))
    return Detection(row, indices, sym, bits, d)
