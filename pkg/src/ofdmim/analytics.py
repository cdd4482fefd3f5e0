"""Closed-form spectral efficiency and PAPR, plus empirical PAPR CCDF."""

from dataclasses import dataclass
from fractions import Fraction
from math import log10

import numpy as np

from ._validation import ConfigError, check_positive_int
from .lookup import index_bits_per_group

SCHEMES = ("OFDM-IM", "OFDM", "SIM-OFDM")


def _log2_exact(m):
    if m < 2 or m & (m - 1):
        raise ConfigError(f"modulation order must be a power of two, got {m}")
    return m.bit_length() - 1


@dataclass(frozen=True)
class SchemeParams:
    scheme: str
    n_tot: int
    n_cp: int
    order: int
    n_group: int | None = None
    k_active: int | None = None

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ConfigError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        check_positive_int(self.n_tot, "n_tot")
        check_positive_int(self.n_cp, "n_cp", minimum=0)
        _log2_exact(self.order)
        if self.scheme == "SIM-OFDM":
            # group size and activity are tied to the modulation order
            n, k = self.order, self.order - 1
            if self.n_group not in (None, n) or self.k_active not in (None, k):
                raise ConfigError("SIM-OFDM requires N = M and K = M - 1")
            object.__setattr__(self, "n_group", n)
            object.__setattr__(self, "k_active", k)
        elif self.scheme == "OFDM":
            n = self.n_group if self.n_group is not None else self.n_tot
            object.__setattr__(self, "n_group", n)
            object.__setattr__(self, "k_active", n)
        elif self.n_group is None or self.k_active is None:
            raise ConfigError("OFDM-IM needs n_group and k_active")
        check_positive_int(self.n_group, "n_group")
        check_positive_int(self.k_active, "k_active")
        if self.k_active > self.n_group:
            raise ConfigError(f"K={self.k_active} exceeds N={self.n_group}")
        if self.n_tot % self.n_group:
            raise ConfigError(f"N={self.n_group} does not divide N_tot={self.n_tot}")

    @property
    def n_groups(self):
        return self.n_tot // self.n_group


def spectral_efficiency(params):
    """Bits per subcarrier slot including the cyclic-prefix overhead, as a Fraction."""
    m = _log2_exact(params.order)
    slots = params.n_tot + params.n_cp
    if params.scheme == "OFDM":
        return Fraction(params.n_tot * m, slots)
    if params.scheme == "SIM-OFDM":
        return Fraction(params.n_groups * (m + params.k_active * m), slots)
    p1 = index_bits_per_group(params.n_group, params.k_active)
    return Fraction(params.n_groups * (p1 + params.k_active * m), slots)


def papr_bound(params):
    """Worst-case PAPR in dB: 10 log10(G K) for the index schemes, 10 log10(N_tot) for OFDM."""
    if params.scheme == "OFDM":
        return 10.0 * log10(params.n_tot)
    return 10.0 * log10(params.n_groups * params.k_active)


def papr_ccdf(samples, thresholds):
    """Empirical ``Pr(PAPR > t)`` for each threshold."""
    samples = np.asarray(samples, dtype=float).ravel()
    if samples.size == 0:
        raise ValueError("papr_ccdf needs at least one sample")
    thresholds = np.asarray(thresholds, dtype=float)
    ordered = np.sort(samples)
    above = samples.size - np.searchsorted(ordered, thresholds, side="right")
    return above / samples.size
