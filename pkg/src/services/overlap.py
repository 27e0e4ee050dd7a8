"""Pairing of overlapping half-open intervals from two sorted partitions.

Both the Hayashi–Yoshida estimator and the bivariate H_n statistic need the
set of pairs (i, j) with ``[a_i, a_{i+1}) ∩ [b_j, b_{j+1}) ≠ ∅``. Touching
endpoints do not overlap.
"""

from typing import Tuple

import numpy as np


def overlap_pairs(times1: np.ndarray, times2: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Index pairs of overlapping intervals, ordered by (i, j).

    ``times1`` and ``times2`` are strictly increasing partition points; interval
    ``i`` of the first partition is ``[times1[i], times1[i+1])``. For each ``i``
    the overlapping ``j`` form one contiguous run, located with two binary
    searches, so the whole scan is O((n1 + n2) log n) plus the output size.
    """
    t1 = np.asarray(times1, dtype=np.float64)
    t2 = np.asarray(times2, dtype=np.float64)
    start1, end1 = t1[:-1], t1[1:]
    start2, end2 = t2[:-1], t2[1:]

    # first j with end2[j] > start1[i]; first j with start2[j] >= end1[i]
    j_lo = np.searchsorted(end2, start1, side="right")
    j_hi = np.searchsorted(start2, end1, side="left")
    counts = np.maximum(j_hi - j_lo, 0)

    i_idx = np.repeat(np.arange(start1.shape[0]), counts)
    offsets = np.arange(i_idx.shape[0]) - np.repeat(np.cumsum(counts) - counts, counts)
    j_idx = np.repeat(j_lo, counts) + offsets
    return i_idx, j_idx


def overlap_lengths(
    times1: np.ndarray, times2: np.ndarray
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Overlapping pairs together with the length and right end of each overlap."""
    t1 = np.asarray(times1, dtype=np.float64)
    t2 = np.asarray(times2, dtype=np.float64)
    i_idx, j_idx = overlap_pairs(t1, t2)
    lo = np.maximum(t1[i_idx], t2[j_idx])
    hi = np.minimum(t1[i_idx + 1], t2[j_idx + 1])
    return i_idx, j_idx, hi - lo, hi
