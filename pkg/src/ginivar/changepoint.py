"""Recursive localization of variance change points.

After the constancy test rejects on a segment, the dominant change is
narrowed to the adjacent block pair with the largest jump in log local
variance, then refined inside that two-block window by maximizing the
difference of the left/right empirical variances over the split position.
The segment is split there and both halves are re-tested (binary
segmentation); a branch stops when its test no longer rejects or the
segment is too short for the blockwise test to be meaningful.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import SampleTooShortError
from .series import BlockPartition, TimeSeries, make_partition
from .vartest import BlockStats, run_test

__all__ = [
    "ChangePoint",
    "SegmentRecord",
    "ChangePointSet",
    "dominant_block_pair",
    "refine_within_window",
    "locate_all",
    "default_margin",
    "min_segment_length",
]


@dataclass(frozen=True)
class ChangePoint:
    """A located split: the change lies between positions ``index`` and ``index + 1``.

    All positions are 1-based within the original series.  ``block_pair``
    is the 1-based index j of the winning adjacent pair (j, j+1) within
    the rejecting segment's partition; ``left_var``/``right_var`` are the
    empirical variances of the two sub-segments created by the split.
    """

    index: int
    block_pair: int
    left_var: float
    right_var: float
    depth: int


@dataclass(frozen=True)
class SegmentRecord:
    """One recursion step: segment bounds (1-based, inclusive) and what happened."""

    start: int
    end: int
    depth: int
    p_value: float | None
    outcome: str  # "split", "accepted", "skipped: too short"
    split_at: int | None = None


@dataclass(frozen=True)
class ChangePointSet:
    points: tuple[ChangePoint, ...]
    trace: tuple[SegmentRecord, ...] = field(compare=False)

    def indices(self) -> list[int]:
        return [p.index for p in self.points]


def dominant_block_pair(stats: BlockStats) -> int:
    """1-based j maximizing |log v_j - log v_{j+1}|; ties go to the smallest j."""
    logs = stats.log_local_vars
    if logs.size < 2:
        raise ValueError("need at least two blocks")
    return int(np.argmax(np.abs(np.diff(logs)))) + 1


def refine_within_window(
    x: TimeSeries, p: BlockPartition, j_star: int, margin: int
) -> int:
    """Best split position inside blocks ``j_star`` and ``j_star + 1``.

    Scans the split position t over the two-block window, keeping at
    least ``margin`` observations on each side so both variance estimates
    are meaningful, and returns the 1-based t (in series coordinates)
    maximizing the absolute difference of the two empirical variances
    (divisor = sub-segment length).  First-index tie-break.
    """
    if margin < 1:
        raise ValueError(f"margin must be positive, got {margin}")
    if not 1 <= j_star < p.block_count:
        raise ValueError(f"block pair {j_star} outside 1..{p.block_count - 1}")
    lo = (j_star - 1) * p.block_len  # 0-based window start
    hi = (j_star + 1) * p.block_len  # 0-based exclusive end
    m = hi - lo
    if m < 2 * margin + 2:
        raise SampleTooShortError(
            f"window of {m} observations too short for margin {margin}"
        )
    w = x.values[lo:hi]
    w = w - w.mean()  # constant shift; keeps the prefix sums well conditioned
    s1 = np.cumsum(w)
    s2 = np.cumsum(w**2)
    # candidate split sizes k = margin .. m - margin (left length)
    k = np.arange(margin, m - margin + 1, dtype=float)
    left_var = s2[margin - 1 : m - margin] / k - (s1[margin - 1 : m - margin] / k) ** 2
    rs1 = s1[-1] - s1[margin - 1 : m - margin]
    rs2 = s2[-1] - s2[margin - 1 : m - margin]
    right_var = rs2 / (m - k) - (rs1 / (m - k)) ** 2
    best = int(np.argmax(np.abs(left_var - right_var)))
    return lo + margin + best  # 1-based: last position of the left part


def default_margin(window_len: int) -> int:
    """Boundary exclusion: at least 10 observations, at least 10% of the window.

    The short-side variance estimate has standard error on the order of
    ``sigma^2 * sqrt(2 / margin)``; anything much below 10% of the window
    lets edge noise beat the true split in the argmax.
    """
    return max(10, math.ceil(0.10 * window_len))


@lru_cache(maxsize=None)
def min_segment_length(s: float) -> int:
    """Smallest n whose partition has >= 4 blocks; below this the test is noise."""
    n = 4
    while True:
        try:
            if make_partition(n, s).block_count >= 4:
                return n
        except SampleTooShortError:
            pass
        n += 1


def locate_all(
    x: TimeSeries,
    s: float = 0.7,
    q: float = 0.5,
    alpha: float = 0.05,
    margin: int | None = None,
) -> ChangePointSet:
    """Binary segmentation: test, split at the refined change point, recurse.

    Each (sub-)segment is tested at level ``alpha`` with block geometry
    recomputed from its own length; no multiplicity correction is applied
    across recursion levels, so the family-wise error is somewhat liberal.
    ``margin`` overrides the automatic boundary exclusion of the refinement.
    """
    min_len = min_segment_length(s)
    points: list[ChangePoint] = []
    trace: list[SegmentRecord] = []

    def recurse(lo: int, hi: int, depth: int) -> None:
        # 0-based half-open [lo, hi)
        length = hi - lo
        if length < min_len:
            trace.append(
                SegmentRecord(lo + 1, hi, depth, None, "skipped: too short")
            )
            return
        seg = TimeSeries(x.values[lo:hi], name=x.name)
        try:
            result = run_test(seg, s=s, q=q, alpha=alpha)
        except SampleTooShortError:
            trace.append(
                SegmentRecord(lo + 1, hi, depth, None, "skipped: too short")
            )
            return
        if not result.reject:
            trace.append(
                SegmentRecord(lo + 1, hi, depth, result.p_value, "accepted")
            )
            return
        p = result.partition
        j_star = dominant_block_pair(result.block_stats)
        excl = margin if margin is not None else default_margin(2 * p.block_len)
        t_local = refine_within_window(seg, p, j_star, excl)  # 1-based in segment
        t_abs = lo + t_local  # 1-based in the original series
        left = x.values[lo : lo + t_local]
        right = x.values[lo + t_local : hi]
        points.append(
            ChangePoint(
                index=t_abs,
                block_pair=j_star,
                left_var=float(np.var(left)),
                right_var=float(np.var(right)),
                depth=depth,
            )
        )
        trace.append(
            SegmentRecord(lo + 1, hi, depth, result.p_value, "split", split_at=t_abs)
        )
        recurse(lo, lo + t_local, depth + 1)
        recurse(lo + t_local, hi, depth + 1)

    recurse(0, x.n, 0)
    points.sort(key=lambda pt: pt.index)
    trace.sort(key=lambda r: (r.start, r.end))
    return ChangePointSet(points=tuple(points), trace=tuple(trace))
