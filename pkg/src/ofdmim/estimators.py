"""scikit-learn style wrappers around the functional transceiver blocks.

The wrappers follow the usual estimator contract: hyper-parameters are set in
``__init__`` and exposed through ``get_params``/``set_params``; ``fit`` learns
(or builds) state stored in trailing-underscore attributes; ``transform``
applies it. They compose with :class:`sklearn.pipeline.Pipeline` where the
array shapes line up.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import ConfigError, check_bits, check_complex, check_positive_int
from .frame import deinterleave, interleave, place_symbols, power_scale
from .linkproc import build_precoder, detect_group, mmse_filter, precode, receiver_scale
from .lookup import bits_to_row, build_lookup, row_to_bits
from .modem import bits_to_symbol_index, qam


class OfdmImModulator(TransformerMixin, BaseEstimator):
    """Bits to frequency-domain OFDM-IM blocks, and back by index detection.

    Parameters
    ----------
    n_tot : int
        Subcarriers per block.
    n_group : int
        Subcarriers per group (N).
    k_active : int
        Active subcarriers per group (K). ``k_active == n_group`` is classical OFDM.
    order : int
        QAM order M.
    power_normalize : bool
        Scale active subcarriers so the block carries the energy of a full block.
    metric : {"abs", "abs2"}
        Index decision metric used by :meth:`inverse_transform`.
    """

    def __init__(self, n_tot=128, n_group=8, k_active=6, order=4, power_normalize=True,
                 metric="abs"):
        self.n_tot = n_tot
        self.n_group = n_group
        self.k_active = k_active
        self.order = order
        self.power_normalize = power_normalize
        self.metric = metric

    def fit(self, X=None, y=None):
        check_positive_int(self.n_tot, "n_tot")
        if self.n_tot % check_positive_int(self.n_group, "n_group"):
            raise ConfigError(f"N={self.n_group} does not divide N_tot={self.n_tot}")
        self.table_ = build_lookup(self.n_group, self.k_active)
        self.constellation_ = qam(self.order)
        self.n_groups_ = self.n_tot // self.n_group
        m = self.constellation_.bits_per_symbol
        self.bits_per_group_ = self.table_.p1 + self.k_active * m
        self.n_features_in_ = self.n_groups_ * self.bits_per_group_
        self.amplitude_ = (
            float(power_scale(self.n_tot, self.n_groups_, self.k_active)) if self.power_normalize else 1.0
        )
        return self

    def transform(self, X):
        """(n_blocks, bits_per_block) bits -> (n_blocks, n_tot) complex blocks."""
        check_is_fitted(self, "table_")
        bits = check_bits(X, self.n_features_in_)
        bits = bits.reshape(bits.shape[:-1] + (self.n_groups_, self.bits_per_group_))
        p1 = self.table_.p1
        sym_bits = bits[..., p1:].reshape(bits.shape[:-1] + (self.k_active, -1))
        symbols = self.constellation_.points[bits_to_symbol_index(sym_bits, self.constellation_)]
        rows = self.table_.rows[bits_to_row(bits[..., :p1], p1)]
        groups = place_symbols(rows, symbols * self.amplitude_, self.n_group)
        return interleave(groups)

    def inverse_transform(self, X):
        """Detect indices and symbols of (n_blocks, n_tot) equalized blocks."""
        check_is_fitted(self, "table_")
        x = check_complex(X, "X", min_ndim=1)
        groups = deinterleave(x, self.n_groups_)
        det = detect_group(groups, self.table_, self.constellation_, scale=self.amplitude_,
                           metric=self.metric)
        bits = np.concatenate([row_to_bits(det.row, self.table_.p1), det.symbol_bits], axis=-1)
        return bits.reshape(bits.shape[:-2] + (-1,))


class MMSEEqualizer(TransformerMixin, BaseEstimator):
    """Per-subcarrier uplink MMSE filter.

    ``fit`` takes the stacked channel ``(n_sub, N_R, U*N_T)``; ``transform``
    maps receive vectors ``(..., n_sub, N_R)`` to stream estimates
    ``(..., n_sub, U*N_T)``.
    """

    def __init__(self, snr=1.0):
        self.snr = snr

    def fit(self, X, y=None):
        H = check_complex(X, "H", ndim=3)
        if H.shape[1] < H.shape[2]:
            raise ValueError(f"uplink needs N_R >= U*N_T, got {H.shape[1:]}")
        self.filters_ = mmse_filter(H, self.snr)
        self.n_features_in_ = H.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "filters_")
        Y = check_complex(X, "Y", min_ndim=2, finite=False)
        if Y.shape[-2:] != (self.filters_.shape[0], self.n_features_in_):
            raise ValueError(f"expected (..., {self.filters_.shape[0]}, {self.n_features_in_}), got {Y.shape}")
        return (self.filters_ @ Y[..., None])[..., 0]


class MMSEPrecoder(TransformerMixin, BaseEstimator):
    """Per-subcarrier downlink MMSE precoder with power normalization.

    ``fit`` takes the users' stacked channels ``(n_sub, U*N_R, N_T)``;
    ``transform`` maps user symbols ``(..., n_sub, U*N_R)`` to antenna signals
    ``(..., n_sub, N_T)``; :meth:`descale` is the user-side ``y / gamma``.
    """

    def __init__(self, snr=1.0, n_users=1):
        self.snr = snr
        self.n_users = n_users

    def fit(self, X, y=None):
        H = check_complex(X, "H", ndim=3)
        prec = build_precoder(H, self.snr, check_positive_int(self.n_users, "n_users"))
        self.precoder_ = prec
        self.matrices_ = prec.matrices
        self.gamma_ = prec.gamma
        self.n_features_in_ = H.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "precoder_")
        x = check_complex(X, "X", min_ndim=2)
        if x.shape[-1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} stacked user streams, got {x.shape[-1]}")
        return precode(self.precoder_, x)

    def descale(self, Y):
        check_is_fitted(self, "precoder_")
        return receiver_scale(Y, self.gamma_)
