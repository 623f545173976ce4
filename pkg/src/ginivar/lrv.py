"""Subsampling estimator of the long-run standard deviation of the squared noise.

With ``kappa^2 = Var(Y_1^2) + 2 * sum_k Cov(Y_1^2, Y_{k+1}^2)`` for the
unit-variance noise ``Y``, the estimator first removes local means (block
means of the main partition, which also absorbs any slowly varying mean),
then averages absolute normalized sums of centered squares over
non-overlapping sub-blocks:

    kappa_hat = sqrt(pi/2) / sigma_h_sq * (1/b') * sum_j
                | sum_{i in sub-block j} (X~_i^2 - sigma_h_sq) / sqrt(ell') |

where ``sigma_h_sq`` is the overall mean of the centered squares.  The
``sqrt(pi/2)`` factor inverts ``E|N(0,1)| = sqrt(2/pi)``; the division by
``sigma_h_sq`` makes the estimate scale invariant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConstantSeriesError
from .series import BlockPartition, TimeSeries, make_partition

__all__ = [
    "LrvEstimate",
    "center_by_block_means",
    "subsample_block_sums",
    "estimate_kappa",
]


@dataclass(frozen=True)
class LrvEstimate:
    kappa_hat: float
    sigma_h_sq: float
    sub_partition: BlockPartition
    # mean |normalized sub-block sum| before the 1/sigma_h_sq scaling; this
    # is the plain subsampling estimate of the long-run sd of the centered
    # squares themselves, useful as a scale-bearing diagnostic.
    raw_kappa: float


def center_by_block_means(x: TimeSeries, p: BlockPartition) -> TimeSeries:
    """Subtract each main-partition block's mean; trailing remainder dropped."""
    blocks = x.values[: p.covered].reshape(p.block_count, p.block_len)
    centered = blocks - blocks.mean(axis=1, keepdims=True)
    return TimeSeries(centered.ravel(), name=x.name)


def _center_full_length(x: TimeSeries, p: BlockPartition) -> np.ndarray:
    """Block-mean centering over all n observations.

    The trailing remainder (shorter than a full block) is centered by its
    own mean, so the local-mean removal covers the whole sample; a lone
    trailing observation centers to zero.
    """
    centered = np.empty(x.n)
    centered[: p.covered] = center_by_block_means(x, p).values
    if p.remainder:
        tail = x.values[p.covered :]
        centered[p.covered :] = tail - tail.mean()
    return centered


def subsample_block_sums(centered: np.ndarray, sub: BlockPartition) -> float:
    """Mean absolute normalized sub-block sum of centered squares.

    Returns ``sqrt(pi/2) * (1/b') * sum_j |sum_(block j) (c_i^2 - m) / sqrt(ell')|``
    with ``m`` the overall mean square.  Sub-blocks tile the centered
    series; its trailing partial sub-block is dropped.
    """
    sq = centered**2
    m = sq.mean()
    sums = (sq[: sub.covered] - m).reshape(sub.block_count, sub.block_len).sum(axis=1)
    return math.sqrt(math.pi / 2.0) * float(
        np.mean(np.abs(sums)) / math.sqrt(sub.block_len)
    )


def estimate_kappa(x: TimeSeries, s: float = 0.7, q: float = 0.5) -> LrvEstimate:
    """Scale-free long-run variance estimate from block-mean-centered data.

    ``s`` is the main block exponent of the centering, ``q < s`` the
    sub-block exponent; the overall mean square and the sub-block sums run
    over all ``n`` centered observations, sub-blocks of length
    ``floor(n**q)``.
    """
    if not 0.0 < q < s:
        raise ValueError(f"q must be smaller than s, got q={q}, s={s}")
    p = make_partition(x.n, s)
    centered = _center_full_length(x, p)
    sigma_h_sq = float(np.mean(centered**2))
    if sigma_h_sq <= 0.0:
        raise ConstantSeriesError("constant input: centered observations all vanish")
    sub = make_partition(x.n, q)
    raw = subsample_block_sums(centered, sub)
    return LrvEstimate(
        kappa_hat=raw / sigma_h_sq,
        sigma_h_sq=sigma_h_sq,
        sub_partition=sub,
        raw_kappa=raw,
    )
