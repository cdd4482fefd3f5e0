"""Input validation helpers shared by the estimators and the functional API."""

import numbers

import numpy as np


class ConfigError(ValueError):
    """Raised for an invalid system configuration (bad N, K, M, dimensions...)."""


def check_positive_int(value, name, minimum=1):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise ConfigError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise ConfigError(f"{name} must be >= {minimum}, got {value}")
    return int(value)


def check_bits(bits, length=None, name="bits"):
    """Return `bits` as a uint8 array of 0/1 values.

    If `length` is given, the last axis must have exactly that size.
    """
    arr = np.asarray(bits)
    if arr.size and not np.all((arr == 0) | (arr == 1)):
        raise ValueError(f"{name} must contain only 0 and 1")
    arr = arr.astype(np.uint8, copy=False)
    if length is not None:
        if arr.ndim == 0 or arr.shape[-1] != length:
            got = arr.shape[-1] if arr.ndim else "scalar"
            raise ValueError(f"{name} must have length {length} along the last axis, got {got}")
    return arr


def check_complex(x, name="x", ndim=None, min_ndim=None, finite=True):
    """Convert to a complex128 array and check its rank and finiteness."""
    arr = np.asarray(x, dtype=np.complex128)
    if ndim is not None and arr.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}-D, got shape {arr.shape}")
    if min_ndim is not None and arr.ndim < min_ndim:
        raise ValueError(f"{name} must have at least {min_ndim} dimensions, got shape {arr.shape}")
    if finite and not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def check_snr(rho, name="rho"):
    rho = np.asarray(rho, dtype=float)
    if not np.all(np.isfinite(rho)) or np.any(rho <= 0):
        raise ValueError(f"{name} must be finite and > 0")
    return rho


def check_length(x, length, name="x"):
    if x.shape[-1] != length:
        raise ValueError(f"{name} must have length {length} along the last axis, got {x.shape[-1]}")
