"""Fourier estimator of spot and integrated (co-)volatility.

Pipeline: ``rescale_time`` maps raw observations onto [0, 2π];
``return_fourier_coeffs`` turns the returns into c_k; ``convolution_coeffs``
builds the volatility coefficients α_k by a Bohr average over |s| <= N; the
Fejér sum of α_k gives the spot curve. Integrated quantities are read off
the k = 0 coefficient directly.

Every function here is pure. Sums run over ascending observation index, so
a result does not depend on which thread computed it.
"""

import logging
import math
from typing import Literal, Optional, Protocol, Sequence

import numpy as np

from ..models import TWO_PI, AlphaTable, CoeffTable, RescaledSeries, SpotCurve, TickSeries
from .errors import (
    CoeffRangeError,
    EmptySeries,
    InvalidCutoff,
    InvalidMesh,
    NumericalInconsistency,
    OutOfWindow,
    UnorderedInput,
    WindowMismatch,
)
from .settings import FourierVolSettings, get_settings

logger = logging.getLogger(__name__)

# phase recurrence is restarted from np.exp at this stride
PHASE_REFRESH = 64
# grid points evaluated per block in Fejér sums
EVAL_CHUNK = 512
# kernel cells materialized at once by the Dirichlet double sum
DOUBLE_SUM_CELLS = 1 << 20


class SpectralWeight(Protocol):
    """Anything exposing Fourier coefficients c_k(h) for k = -K..K."""

    max_k: int

    def coefficients(self, max_k: int) -> np.ndarray: ...


# ---------------------------------------------------------------------------
# time rescaling and coefficients
# ---------------------------------------------------------------------------


def rescale_time(series: TickSeries, window: Sequence[float]) -> RescaledSeries:
    """Map a tick series onto [0, 2π].

    Duplicate timestamps keep the last price. If the first (last) observation
    is not at the window edge, an observation carrying the first (last) price
    is added at 0 (2π), which only introduces zero returns.
    """
    t_start, t_end = float(window[0]), float(window[1])
    if not (math.isfinite(t_start) and math.isfinite(t_end)) or t_start >= t_end:
        raise OutOfWindow(f"window must satisfy t_start < t_end, got ({t_start}, {t_end})")

    times = np.asarray(series.times, dtype=np.float64)
    prices = np.asarray(series.log_prices, dtype=np.float64)
    if times.shape[0] < 2:
        raise EmptySeries(f"series '{series.asset_id}' has {times.shape[0]} observations, need at least 2")
    if np.any(np.diff(times) < 0):
        raise UnorderedInput(f"series '{series.asset_id}' has decreasing timestamps")
    if times[0] < t_start or times[-1] > t_end:
        raise OutOfWindow(
            f"series '{series.asset_id}' spans [{times[0]}, {times[-1]}], outside window [{t_start}, {t_end}]"
        )

    scaled = np.clip(TWO_PI * ((times - t_start) / (t_end - t_start)), 0.0, TWO_PI)

    # keep the last observation of every run of equal (rescaled) times
    keep = np.append(scaled[1:] != scaled[:-1], True)
    scaled, prices = scaled[keep], prices[keep]

    if scaled[0] > 0.0:
        scaled = np.concatenate(([0.0], scaled))
        prices = np.concatenate(([prices[0]], prices))
    if scaled[-1] < TWO_PI:
        scaled = np.concatenate((scaled, [TWO_PI]))
        prices = np.concatenate((prices, [prices[-1]]))

    return RescaledSeries(
        times=scaled,
        log_prices=prices,
        returns=np.diff(prices),
        origin_window=(t_start, t_end),
        asset_id=series.asset_id,
    )


def return_fourier_coeffs(
    series: RescaledSeries, max_k: int, settings: Optional[FourierVolSettings] = None
) -> CoeffTable:
    """c_k = (1/2π) Σ_i exp(-i k t_i) δ_i for |k| <= max_k, left-endpoint times.

    c_0 telescopes to (p_last - p_first)/2π; a table that disagrees (non-finite
    prices, for one) raises NumericalInconsistency.
    """
    if max_k < 0:
        raise InvalidCutoff(f"max_k must be >= 0, got {max_k}")

    t = series.times[:-1]
    r = series.returns
    _check_telescoping(series, (settings or get_settings()).identity_rtol)
    step = np.exp(-1j * t)
    positive = np.empty(max_k + 1, dtype=np.complex128)

    phase = None
    for k in range(max_k + 1):
        if k % PHASE_REFRESH == 0:
            phase = np.exp(-1j * k * t)
        positive[k] = np.sum(phase * r)
        phase = phase * step
    positive /= TWO_PI

    coeffs = np.concatenate((np.conj(positive[:0:-1]), positive))
    return CoeffTable(max_k=max_k, coeffs=coeffs)


def _check_telescoping(series: RescaledSeries, rtol: float) -> None:
    total = float(np.sum(series.returns))
    net = float(series.log_prices[-1] - series.log_prices[0])
    bound = rtol * float(np.sum(np.abs(series.returns)))
    if not abs(total - net) <= bound:
        raise NumericalInconsistency(
            f"returns of '{series.asset_id}' sum to {total!r}, price change is {net!r}"
        )


def convolution_coeffs(
    c1: CoeffTable, c2: CoeffTable, n_freq: int, max_k: int, symmetric: bool = False
) -> AlphaTable:
    """α_k = 2π/(2N+1) Σ_{|s|<=N} c1_s c2_{k-s} for |k| <= max_k.

    With ``symmetric=True`` the two input orders are averaged, so swapping the
    assets leaves every α_k unchanged.
    """
    if n_freq < 0:
        raise InvalidCutoff(f"N must be >= 0, got {n_freq}")
    if max_k < 0 or max_k > n_freq:
        raise InvalidCutoff(f"max_k must lie in [0, N={n_freq}], got {max_k}")
    required = n_freq + max_k
    for name, table in (("c1", c1), ("c2", c2)):
        if table.max_k < required:
            raise CoeffRangeError(
                f"{name} reaches |k| <= {table.max_k}, need K >= {required} (N={n_freq}, max_k={max_k})",
                required=required,
            )

    positive = _bohr_average(c1, c2, n_freq, max_k)
    if symmetric:
        positive = 0.5 * (positive + _bohr_average(c2, c1, n_freq, max_k))

    alphas = np.concatenate((np.conj(positive[:0:-1]), positive))
    return AlphaTable(max_k=max_k, cutoff_n_freq=n_freq, alphas=alphas)


def _bohr_average(c1: CoeffTable, c2: CoeffTable, n_freq: int, max_k: int) -> np.ndarray:
    left = c1.window(n_freq)
    offset = c2.max_k
    out = np.empty(max_k + 1, dtype=np.complex128)
    for k in range(max_k + 1):
        # c2_{k-s} for s = -N..N, i.e. c2 over [k-N, k+N] reversed
        right = c2.coeffs[offset + k - n_freq:offset + k + n_freq + 1][::-1]
        out[k] = np.sum(left * right)
    return out * (TWO_PI / (2 * n_freq + 1))


# ---------------------------------------------------------------------------
# spot reconstruction
# ---------------------------------------------------------------------------


def _check_grid(grid) -> np.ndarray:
    g = np.asarray(grid, dtype=np.float64)
    if g.ndim != 1:
        raise OutOfWindow("evaluation grid must be one-dimensional")
    if g.size and (np.min(g) < 0.0 or np.max(g) > TWO_PI or not np.all(np.isfinite(g))):
        raise OutOfWindow("evaluation grid must lie in [0, 2π]")
    return g


def fejer_weights(n_freq: int) -> np.ndarray:
    """1 - |k|/N for k = -N..N."""
    k = np.arange(-n_freq, n_freq + 1)
    return 1.0 - np.abs(k) / n_freq


def _trig_sum(weighted: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """Σ_k weighted[k] e^{ikt} with k centered on zero, as a complex array."""
    half = (weighted.shape[0] - 1) // 2
    k = np.arange(-half, half + 1, dtype=np.float64)
    out = np.empty(grid.shape[0], dtype=np.complex128)
    for lo in range(0, grid.shape[0], EVAL_CHUNK):
        chunk = grid[lo:lo + EVAL_CHUNK]
        out[lo:lo + EVAL_CHUNK] = np.exp(1j * np.outer(chunk, k)) @ weighted
    return out


def _real_part(values: np.ndarray, tol: float, what: str) -> np.ndarray:
    residue = np.abs(values.imag)
    bound = tol * (1.0 + np.abs(values.real))
    if np.any(residue > bound):
        worst = float(np.max(residue - bound))
        raise NumericalInconsistency(f"{what}: imaginary residue exceeds tolerance by {worst:.3e}")
    return values.real.copy()


def fejer_spot_reconstruct(
    alpha: AlphaTable, n_freq: int, grid, settings: Optional[FourierVolSettings] = None
) -> SpotCurve:
    """Σ̂(t) = Σ_{|k|<=N} (1 - |k|/N) α_k e^{ikt} on ``grid``."""
    settings = settings or get_settings()
    if n_freq < 1:
        raise InvalidCutoff(f"Fejér reconstruction needs N >= 1, got {n_freq}")
    if alpha.max_k < n_freq:
        raise CoeffRangeError(f"alpha table reaches |k| <= {alpha.max_k}, need {n_freq}", required=n_freq)
    g = _check_grid(grid)

    values = _trig_sum(fejer_weights(n_freq) * alpha.window(n_freq), g)
    real = _real_part(values, settings.imag_tol, "fejer_spot_reconstruct")
    logger.debug(f"fejer reconstruction: N={n_freq}, {g.shape[0]} grid points")
    return SpotCurve(grid=g, values=real, n_freq=n_freq, variant="fejer_canonical")


def positive_spot_reconstruct(
    c: CoeffTable, n_freq: int, grid, settings: Optional[FourierVolSettings] = None
) -> SpotCurve:
    """Nonnegative spot variance from the Fejér sum of a modulus-squared convolution.

    Φ(s) = c_s for |s| <= 2N, Ψ(k) = 2π/(2N+1) Σ_s Φ(s)Φ(k-s), and the curve is
    Σ_{|k|<N} (1 - |k|/N) Ψ(k) e^{ikt}. Ψ is, up to scale, the coefficient
    sequence of |Σ_s c_s e^{ist}|², so the Fejér mean is nonnegative.
    """
    settings = settings or get_settings()
    if n_freq < 1:
        raise InvalidCutoff(f"Fejér reconstruction needs N >= 1, got {n_freq}")
    required = 2 * n_freq
    if c.max_k < required:
        raise CoeffRangeError(f"coefficient table reaches |k| <= {c.max_k}, need {required}", required=required)
    g = _check_grid(grid)

    phi = c.window(required)
    full = np.convolve(phi, phi)            # index m <-> k = m - 4N
    centre = 2 * required
    psi = full[centre - n_freq:centre + n_freq + 1] * (TWO_PI / (2 * n_freq + 1))

    values = _trig_sum(fejer_weights(n_freq) * psi, g)
    real = _real_part(values, settings.imag_tol, "positive_spot_reconstruct")

    scale = 1.0 + (float(np.max(np.abs(real))) if real.size else 0.0)
    if real.size and float(np.min(real)) < -settings.positivity_tol * scale:
        raise NumericalInconsistency(
            f"positive_spot_reconstruct produced {float(np.min(real)):.3e} below zero"
        )
    return SpotCurve(grid=g, values=real, n_freq=n_freq, variant="fejer_positive")


def weighted_spot_integral(alpha: AlphaTable, n_freq: int, weight: SpectralWeight) -> float:
    """∫_0^{2π} h(t) Σ̂(t) dt, evaluated exactly in the frequency domain.

    Equals 2π Σ_k (1 - |k|/N) α_k c_{-k}(h). Only |k| <= min(N, weight.max_k)
    contributes; coefficients of h beyond ``weight.max_k`` are treated as zero.
    """
    if n_freq < 1:
        raise InvalidCutoff(f"Fejér reconstruction needs N >= 1, got {n_freq}")
    kk = min(n_freq, weight.max_k)
    if alpha.max_k < kk:
        raise CoeffRangeError(f"alpha table reaches |k| <= {alpha.max_k}, need {kk}", required=kk)

    k = np.arange(-kk, kk + 1)
    w = 1.0 - np.abs(k) / n_freq
    h = weight.coefficients(kk)[::-1]      # c_{-k}(h)
    return float(TWO_PI * np.sum(w * alpha.window(kk) * h).real)


# ---------------------------------------------------------------------------
# integrated estimators
# ---------------------------------------------------------------------------


def dirichlet_kernel(n_freq: int, t):
    """Rescaled Dirichlet kernel D_N(t) = sin((N+1/2)t) / ((2N+1) sin(t/2)).

    Accepts a scalar or an array. Near t ≡ 0 (mod 2π) the cosine-sum form is
    used instead of the ratio.
    """
    if n_freq < 0:
        raise InvalidCutoff(f"N must be >= 0, got {n_freq}")
    scalar = np.ndim(t) == 0
    tt = np.atleast_1d(np.asarray(t, dtype=np.float64))
    reduced = np.remainder(tt + math.pi, TWO_PI) - math.pi
    half_sin = np.sin(0.5 * reduced)

    out = np.empty_like(reduced)
    near = np.abs(half_sin) < 1e-8
    far = ~near
    out[far] = np.sin((n_freq + 0.5) * reduced[far]) / ((2 * n_freq + 1) * half_sin[far])
    if np.any(near):
        k = np.arange(1, n_freq + 1, dtype=np.float64)
        out[near] = (1.0 + 2.0 * np.cos(np.outer(reduced[near], k)).sum(axis=1)) / (2 * n_freq + 1)
    np.clip(out, -1.0, 1.0, out=out)
    return float(out[0]) if scalar else out


def integrated_volatility(c: CoeffTable, n_freq: int) -> float:
    """(2π)²/(2N+1) Σ_{|s|<=N} |c_s|²."""
    if n_freq < 0:
        raise InvalidCutoff(f"N must be >= 0, got {n_freq}")
    if c.max_k < n_freq:
        raise CoeffRangeError(f"coefficient table reaches |k| <= {c.max_k}, need {n_freq}", required=n_freq)
    power = np.abs(c.window(n_freq)) ** 2
    return float(TWO_PI ** 2 / (2 * n_freq + 1) * np.sum(power))


def integrated_volatility_fejer(
    c: CoeffTable,
    n_freq: int,
    settings: Optional[FourierVolSettings] = None,
    *,
    c2: Optional[CoeffTable] = None,
) -> float:
    """Fejér-weighted integrated variance, (2π)²/(N+1) Σ (1 - |s|/N) |c_s|².

    ``settings.fejer_prefactor = "dirichlet"`` switches the prefactor to
    (2π)²/(2N+1). With ``c2`` the same weights are applied to the cross
    products c_s·c2_{-s}, giving the matching co-volatility estimate.
    """
    settings = settings or get_settings()
    if n_freq < 1:
        raise InvalidCutoff(f"Fejér-weighted estimator needs N >= 1, got {n_freq}")
    for table in (c, c2 if c2 is not None else c):
        if table.max_k < n_freq:
            raise CoeffRangeError(
                f"coefficient table reaches |k| <= {table.max_k}, need {n_freq}", required=n_freq
            )
    denom = n_freq + 1 if settings.fejer_prefactor == "printed" else 2 * n_freq + 1
    if c2 is None:
        products = np.abs(c.window(n_freq)) ** 2
    else:
        products = (c.window(n_freq) * c2.window(n_freq)[::-1]).real
    return float(TWO_PI ** 2 / denom * np.sum(fejer_weights(n_freq) * products))


def check_same_window(s1: RescaledSeries, s2: RescaledSeries) -> None:
    a, b = s1.origin_window, s2.origin_window
    if not (math.isclose(a[0], b[0], rel_tol=1e-12, abs_tol=1e-12)
            and math.isclose(a[1], b[1], rel_tol=1e-12, abs_tol=1e-12)):
        raise WindowMismatch(f"series rescaled from different windows: {a} vs {b}")


def integrated_covolatility(
    s1: RescaledSeries,
    s2: RescaledSeries,
    n_freq: int,
    method: Literal["convolution", "dirichlet"] = "convolution",
) -> float:
    """Integrated co-volatility over the window.

    ``convolution`` returns 2π·α_0 from the two coefficient tables;
    ``dirichlet`` evaluates Σ_i Σ_j δ¹_i δ²_j D_N(t¹_i - t²_j) directly. Both
    paths agree to rounding.
    """
    check_same_window(s1, s2)
    if n_freq < 0:
        raise InvalidCutoff(f"N must be >= 0, got {n_freq}")

    if method == "dirichlet":
        return _covolatility_dirichlet(s1, s2, n_freq)

    c1 = return_fourier_coeffs(s1, n_freq)
    c2 = c1 if s2 is s1 else return_fourier_coeffs(s2, n_freq)
    alpha = convolution_coeffs(c1, c2, n_freq, 0)
    return float(TWO_PI * alpha[0].real)


def _covolatility_dirichlet(s1: RescaledSeries, s2: RescaledSeries, n_freq: int) -> float:
    t1, r1 = s1.times[:-1], s1.returns
    t2, r2 = s2.times[:-1], s2.returns
    rows = max(1, DOUBLE_SUM_CELLS // max(1, t2.shape[0]))
    total = 0.0
    for lo in range(0, t1.shape[0], rows):
        lags = np.subtract.outer(t1[lo:lo + rows], t2)
        kernel = dirichlet_kernel(n_freq, lags.ravel()).reshape(lags.shape)
        total += float(r1[lo:lo + rows] @ kernel @ r2)
    return total


# ---------------------------------------------------------------------------
# cutoff rules
# ---------------------------------------------------------------------------


def _check_mesh(mesh: float) -> float:
    rho = float(mesh)
    if not math.isfinite(rho) or rho <= 0.0:
        raise InvalidMesh(f"mesh must be positive and finite, got {mesh}")
    return rho


def select_cutoff(mesh: float, n_obs: Optional[int] = None) -> int:
    """N = round(ρ^(-2/3)), half up, clamped to [1, (n_obs-1)//2] when n_obs is known."""
    rho = _check_mesh(mesh)
    n = max(1, int(math.floor(rho ** (-2.0 / 3.0) + 0.5)))
    if n_obs is not None:
        n = min(n, max(1, (int(n_obs) - 1) // 2))
    return n


def select_spot_cutoff(mesh: float) -> int:
    """Fejér cutoff M = round(ρ^(-1/3)) for spot reconstruction; Mρ -> 0 as ρ -> 0."""
    rho = _check_mesh(mesh)
    return max(1, int(math.floor(rho ** (-1.0 / 3.0) + 0.5)))


def nyquist_cutoff(n_returns: int) -> int:
    """Largest N with 2N+1 <= n_returns."""
    return max(1, (int(n_returns) - 1) // 2)
