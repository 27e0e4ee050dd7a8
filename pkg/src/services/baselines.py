"""Reference estimators the Fourier estimator is compared against.

All three sum with ``math.fsum``, which is correctly rounded and therefore
independent of summation order: ``hayashi_yoshida(s, s)`` reproduces
``realized_variance(s)`` bit for bit and swapping arguments changes nothing.
"""

import logging
import math
from typing import Optional

import numpy as np

from ..models import RescaledSeries, TickSeries
from ..models.schemas import SyncSpec
from .errors import DegenerateGrid, EmptySeries
from .fourier import check_same_window
from .overlap import overlap_pairs

logger = logging.getLogger(__name__)


def realized_variance(series: RescaledSeries) -> float:
    """Σ_j δ_j²."""
    if series.n_returns < 1:
        raise EmptySeries("realized variance needs at least one return")
    r = np.asarray(series.returns, dtype=np.float64)
    return math.fsum(r * r)


def previous_tick(times: np.ndarray, prices: np.ndarray, grid: np.ndarray, tol: float = 0.0) -> np.ndarray:
    """Last observed price at or before each grid time; flat before the first tick.

    A tick up to ``tol`` after a grid time still counts as at that time.
    """
    idx = np.searchsorted(times, grid + tol, side="right") - 1
    return prices[np.clip(idx, 0, None)]


def realized_covariance_previous_tick(
    s1: TickSeries,
    s2: TickSeries,
    sync: SyncSpec,
    window: Optional[tuple] = None,
) -> float:
    """Realized covariance after previous-tick resampling onto t0 + kΔ.

    The window defaults to the span covered by both series. Ticks within ``1e-9·Δ``
    after a grid time are treated as on it.
    """
    if len(s1) < 1 or len(s2) < 1:
        raise EmptySeries("previous-tick covariance needs observations on both legs")
    if window is None:
        start = min(float(s1.times[0]), float(s2.times[0]))
        end = max(float(s1.times[-1]), float(s2.times[-1]))
    else:
        start, end = float(window[0]), float(window[1])

    step = float(sync.grid_step)
    n_intervals = int(math.floor((end - start) / step + 1e-9))
    if n_intervals < 1:
        raise DegenerateGrid(
            f"grid step {step} leaves no interval inside window [{start}, {end}]"
        )
    grid = start + step * np.arange(n_intervals + 1)

    tol = 1e-9 * step
    p1 = previous_tick(np.asarray(s1.times), np.asarray(s1.log_prices), grid, tol)
    p2 = previous_tick(np.asarray(s2.times), np.asarray(s2.log_prices), grid, tol)
    logger.debug(f"previous-tick sync: {n_intervals} intervals of {step}")
    return math.fsum(np.diff(p1) * np.diff(p2))


def hayashi_yoshida(s1: RescaledSeries, s2: RescaledSeries) -> float:
    """Σ δ¹_i δ²_j over all pairs of overlapping half-open return intervals."""
    check_same_window(s1, s2)
    i_idx, j_idx = overlap_pairs(s1.times, s2.times)
    return math.fsum(s1.returns[i_idx] * s2.returns[j_idx])
