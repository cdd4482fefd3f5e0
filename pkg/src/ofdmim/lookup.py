"""Truncated look-up table of active-subcarrier combinations.

Each group of ``n_group`` subcarriers activates ``k_active`` of them. The
table keeps the first ``2**p1`` combinations of ``{1..N}`` in lexicographic
order, where ``p1 = floor(log2 C(N, K))`` is the number of index bits a group
carries. Combinations are 1-based, strictly increasing tuples.
"""

from dataclasses import dataclass, field
from itertools import combinations, islice
from math import comb

import numpy as np

from ._validation import ConfigError, check_bits, check_positive_int

#: Tables with at most this many rows are materialized; larger ones are
#: served by combinadic ranking/unranking.
MATERIALIZE_LIMIT = 65536


def index_bits_per_group(n_group, k_active):
    """floor(log2 C(N, K)), computed exactly on integers."""
    return comb(n_group, k_active).bit_length() - 1


def unrank_combination(rank, n_group, k_active):
    """Return the lexicographic `rank`-th K-combination of {1..N} (rank from 0)."""
    total = comb(n_group, k_active)
    if not 0 <= rank < total:
        raise ValueError(f"rank {rank} outside [0, {total})")
    out = []
    x = 1
    for remaining in range(k_active, 0, -1):
        while True:
            # combinations whose next element is x
            count = comb(n_group - x, remaining - 1)
            if rank < count:
                out.append(x)
                x += 1
                break
            rank -= count
            x += 1
    return tuple(out)


def rank_combination(combo, n_group):
    """Lexicographic rank of a strictly increasing 1-based combination."""
    k_active = len(combo)
    rank = 0
    prev = 0
    for pos, c in enumerate(combo):
        remaining = k_active - pos
        for x in range(prev + 1, c):
            rank += comb(n_group - x, remaining - 1)
        prev = c
    return rank


def _check_combo(combo, n_group, k_active):
    combo = tuple(int(c) for c in combo)
    if len(combo) != k_active:
        raise ValueError(f"combination must have {k_active} entries, got {len(combo)}")
    if any(c < 1 or c > n_group for c in combo):
        raise ValueError(f"combination entries must lie in [1, {n_group}]: {combo}")
    if any(b <= a for a, b in zip(combo, combo[1:])):
        raise ValueError(f"combination must be strictly increasing: {combo}")
    return combo


@dataclass(frozen=True)
class LookupTable:
    """Immutable truncated table of index combinations.

    ``rows`` is an ``(2**p1, K)`` read-only integer array when the table is
    small enough to materialize, otherwise ``None``.
    """

    n_group: int
    k_active: int
    p1: int
    rows: np.ndarray | None = field(repr=False, compare=False)

    @property
    def n_rows(self):
        return 1 << self.p1

    @property
    def materialized(self):
        return self.rows is not None

    def row(self, v):
        if not 0 <= v < self.n_rows:
            raise ValueError(f"row {v} outside [0, {self.n_rows})")
        if self.rows is not None:
            return tuple(int(c) for c in self.rows[v])
        return unrank_combination(v, self.n_group, self.k_active)

    def row_of(self, combo):
        """Row number of `combo`; raises LookupError if it is not in the table."""
        combo = _check_combo(combo, self.n_group, self.k_active)
        rank = rank_combination(combo, self.n_group)
        if rank >= self.n_rows:
            raise LookupError(f"combination {combo} is not in the truncated table")
        return rank

    def __eq__(self, other):
        if not isinstance(other, LookupTable):
            return NotImplemented
        return (self.n_group, self.k_active, self.p1) == (other.n_group, other.k_active, other.p1)

    def __hash__(self):
        return hash((self.n_group, self.k_active, self.p1))


def build_lookup(n_group, k_active):
    """Build the truncated lexicographic table for N subcarriers, K active."""
    n_group = check_positive_int(n_group, "n_group")
    k_active = check_positive_int(k_active, "k_active")
    if k_active > n_group:
        raise ConfigError(f"k_active={k_active} exceeds n_group={n_group}")
    p1 = index_bits_per_group(n_group, k_active)
    rows = None
    if (1 << p1) <= MATERIALIZE_LIMIT:
        first = islice(combinations(range(1, n_group + 1), k_active), 1 << p1)
        rows = np.array(list(first), dtype=np.int64).reshape(1 << p1, k_active)
        rows.setflags(write=False)
    return LookupTable(n_group, k_active, p1, rows)


def bits_to_row(bits, p1):
    """Big-endian unsigned value of the last axis of `bits` (vectorized)."""
    bits = check_bits(bits, p1, "index bits")
    if p1 == 0:
        return np.zeros(bits.shape[:-1], dtype=np.int64)
    weights = 1 << np.arange(p1 - 1, -1, -1, dtype=np.int64)
    return bits.astype(np.int64) @ weights


def row_to_bits(row, p1):
    """Inverse of :func:`bits_to_row`: big-endian bits of `row` along a new last axis."""
    row = np.asarray(row, dtype=np.int64)
    shifts = np.arange(p1 - 1, -1, -1, dtype=np.int64)
    return ((row[..., None] >> shifts) & 1).astype(np.uint8)


def bits_to_indices(bits, table):
    """Map one group's p1 index bits to its active subcarrier combination."""
    bits = check_bits(bits, table.p1, "index bits")
    if bits.ndim != 1:
        raise ValueError("bits_to_indices expects a 1-D bit vector")
    return table.row(int(bits_to_row(bits, table.p1)))


def indices_to_bits(combo, table):
    """Exact inverse of :func:`bits_to_indices`."""
    return row_to_bits(table.row_of(combo), table.p1)
