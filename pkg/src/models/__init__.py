"""Domain types.

All of them are frozen and hold read-only numpy arrays, so a value can be
shared across worker threads without copying.
"""

import math
from dataclasses import dataclass, field
from typing import Literal, Tuple

import numpy as np

TWO_PI = 2.0 * math.pi

SpotVariant = Literal["fejer_canonical", "fejer_positive"]


def _frozen(values, dtype=np.float64) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class TickSeries:
    """One asset's observations on the raw clock."""
    asset_id: str
    times: np.ndarray
    log_prices: np.ndarray

    def __post_init__(self):
        times = _frozen(self.times)
        prices = _frozen(self.log_prices)
        if times.ndim != 1 or times.shape != prices.shape:
            raise ValueError(
                f"times and log_prices must be 1-d and aligned, got {times.shape} and {prices.shape}"
            )
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "log_prices", prices)

    def __len__(self) -> int:
        return self.times.shape[0]


@dataclass(frozen=True)
class RescaledSeries:
    """Observations mapped onto [0, 2π] with returns precomputed.

    ``returns[i]`` is the increment over ``[times[i], times[i+1])``.
    """
    times: np.ndarray
    log_prices: np.ndarray
    returns: np.ndarray
    origin_window: Tuple[float, float]
    asset_id: str = ""

    def __post_init__(self):
        object.__setattr__(self, "times", _frozen(self.times))
        object.__setattr__(self, "log_prices", _frozen(self.log_prices))
        object.__setattr__(self, "returns", _frozen(self.returns))
        object.__setattr__(self, "origin_window", (float(self.origin_window[0]), float(self.origin_window[1])))

    @property
    def mesh(self) -> float:
        """Largest gap between consecutive observation times."""
        return float(np.max(np.diff(self.times)))

    @property
    def n_returns(self) -> int:
        return self.returns.shape[0]

    def to_raw(self, t) -> np.ndarray:
        """Map rescaled times back onto the raw clock."""
        start, end = self.origin_window
        return start + (end - start) * (np.asarray(t, dtype=np.float64) / TWO_PI)


@dataclass(frozen=True)
class CoeffTable:
    """Fourier coefficients c_k of the returns for k = -K..K."""
    max_k: int
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = _frozen(self.coeffs, dtype=np.complex128)
        if coeffs.shape != (2 * self.max_k + 1,):
            raise ValueError(f"expected {2 * self.max_k + 1} coefficients, got {coeffs.shape}")
        object.__setattr__(self, "coeffs", coeffs)

    def __getitem__(self, k):
        return self.coeffs[np.asarray(k) + self.max_k]

    def window(self, n: int) -> np.ndarray:
        """Coefficients for |k| <= n, in ascending k."""
        return self.coeffs[self.max_k - n:self.max_k + n + 1]


@dataclass(frozen=True)
class AlphaTable:
    """Convolution coefficients α_k for |k| <= max_k from a Bohr average over |s| <= N."""
    max_k: int
    cutoff_n_freq: int
    alphas: np.ndarray

    def __post_init__(self):
        alphas = _frozen(self.alphas, dtype=np.complex128)
        if alphas.shape != (2 * self.max_k + 1,):
            raise ValueError(f"expected {2 * self.max_k + 1} alphas, got {alphas.shape}")
        object.__setattr__(self, "alphas", alphas)

    def __getitem__(self, k):
        return self.alphas[np.asarray(k) + self.max_k]

    def window(self, n: int) -> np.ndarray:
        return self.alphas[self.max_k - n:self.max_k + n + 1]


@dataclass(frozen=True)
class SpotCurve:
    """Reconstructed spot (co-)volatility on an evaluation grid."""
    grid: np.ndarray
    values: np.ndarray
    n_freq: int
    variant: SpotVariant

    def __post_init__(self):
        object.__setattr__(self, "grid", _frozen(self.grid))
        object.__setattr__(self, "values", _frozen(self.values))


@dataclass(frozen=True)
class FinePath:
    """Ground-truth simulated path on a uniform fine grid over [0, 2π].

    ``log_prices`` has shape (assets, steps + 1); ``spot_cov`` has shape
    (assets, assets, steps + 1); ``integrated_cov`` is the trapezoid integral
    of ``spot_cov`` over the window.
    """
    step: float
    times: np.ndarray
    log_prices: np.ndarray
    spot_cov: np.ndarray
    integrated_cov: np.ndarray = field(repr=False)

    def __post_init__(self):
        for name in ("times", "log_prices", "spot_cov", "integrated_cov"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))

    @property
    def n_assets(self) -> int:
        return self.log_prices.shape[0]

    def spot(self, i: int, j: int, t) -> np.ndarray:
        """True Σ^{ij} at arbitrary times, linearly interpolated."""
        return np.interp(np.asarray(t, dtype=np.float64), self.times, self.spot_cov[i, j])

    def integrated(self, i: int, j: int) -> float:
        return float(self.integrated_cov[i, j])
