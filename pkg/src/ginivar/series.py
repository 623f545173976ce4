"""Time series container, block geometry, and differencing transforms.

A series of length ``n`` is split into ``b = floor(n / ell)`` consecutive
blocks of equal length ``ell = floor(n**s)``; the trailing ``n - b*ell``
observations are not used by the blockwise statistics.  Block ``j``
(1-based, as in all user-facing indices of this package) covers positions
``(j-1)*ell + 1 .. j*ell``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import SampleTooShortError

__all__ = [
    "TimeSeries",
    "BlockPartition",
    "make_partition",
    "difference",
    "seasonal_difference",
    "drop_indices",
]


@dataclass(frozen=True)
class TimeSeries:
    """Ordered, finite, real-valued observations.

    ``values`` is stored as a read-only float64 array; NaN or infinite
    entries are rejected at construction rather than silently dropped,
    since dropping would change the sample length and hence the block
    geometry derived from it.
    """

    values: np.ndarray
    name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float)
        if arr.ndim != 1:
            raise ValueError(f"expected a one-dimensional series, got shape {arr.shape}")
        if arr.size < 1:
            raise ValueError("series must contain at least one observation")
        if not np.all(np.isfinite(arr)):
            bad = int(np.flatnonzero(~np.isfinite(arr))[0])
            raise ValueError(f"non-finite value at position {bad + 1}")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def n(self) -> int:
        return self.values.size

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class BlockPartition:
    """Block geometry for a sample of length ``n`` with exponent ``s``.

    Invariants: ``block_len = floor(n**s)``, ``block_count = floor(n / block_len)``,
    ``remainder = n - block_count * block_len`` and ``0 <= remainder < block_len``.
    """

    n: int
    s: float
    block_len: int
    block_count: int
    remainder: int

    @property
    def covered(self) -> int:
        """Number of observations inside full blocks."""
        return self.block_len * self.block_count

    def block_slice(self, j: int) -> slice:
        """0-based slice of block ``j`` (1-based), for indexing an array."""
        if not 1 <= j <= self.block_count:
            raise IndexError(f"block index {j} outside 1..{self.block_count}")
        return slice((j - 1) * self.block_len, j * self.block_len)


def make_partition(n: int, s: float) -> BlockPartition:
    """Derive the block geometry for a length-``n`` sample.

    Raises :class:`SampleTooShortError` unless at least two blocks of
    length at least two fit, since the pairwise statistic needs two
    blocks and a block variance needs two observations.
    """
    if not 0.0 < s < 1.0:
        raise ValueError(f"block exponent s must lie in (0, 1), got {s}")
    if n < 4:
        raise SampleTooShortError(f"need n >= 4 observations, got {n}")
    # Guard against n**s landing just below an exact integer power.
    ell = int(math.floor(n**s + 1e-9))
    b = n // ell
    if ell < 2 or b < 2:
        raise SampleTooShortError(
            f"sample too short for chosen s: n={n}, s={s} gives "
            f"block_len={ell}, block_count={b} (need both >= 2)"
        )
    return BlockPartition(n=n, s=s, block_len=ell, block_count=b, remainder=n - b * ell)


def difference(x: TimeSeries) -> TimeSeries:
    """Consecutive differences ``x[i+1] - x[i]``; length shrinks by one."""
    if x.n < 2:
        raise ValueError("series too short to difference")
    return TimeSeries(np.diff(x.values), name=x.name)


def seasonal_difference(x: TimeSeries, lag: int) -> TimeSeries:
    """Differences at distance ``lag``: ``x[i+lag] - x[i]``."""
    if lag < 1:
        raise ValueError(f"lag must be positive, got {lag}")
    if x.n <= lag:
        raise ValueError(f"lag exceeds series length ({lag} >= {x.n})")
    v = x.values
    return TimeSeries(v[lag:] - v[:-lag], name=x.name)


def drop_indices(x: TimeSeries, indices: list[int]) -> TimeSeries:
    """Remove the given 1-based positions, preserving order of the rest."""
    if not indices:
        return x
    idx = sorted(set(indices))
    if idx[0] < 1 or idx[-1] > x.n:
        raise ValueError(f"drop index outside 1..{x.n}: {idx[0] if idx[0] < 1 else idx[-1]}")
    keep = np.ones(x.n, dtype=bool)
    keep[np.asarray(idx) - 1] = False
    if not keep.any():
        raise ValueError("cannot drop every observation")
    return TimeSeries(x.values[keep], name=x.name)
