"""Ground-truth path simulation, sampling schemes and microstructure noise.

Randomness always flows through ``np.random.SeedSequence``: a path is a
function of (model, step, seed); asset ``j`` of a sample draws from the child
stream ``spawn_key=(j,)``. Results never depend on call order or threads.
"""

import logging
import math
from typing import List, Optional, Sequence, Union

import numpy as np
from pydantic import ValidationError
from scipy.integrate import trapezoid

from ..models import TWO_PI, FinePath, TickSeries
from ..models.schemas import ModelSpec, NoiseSpec, SamplingScheme
from .errors import ModelError, ResampleError
from .overlap import overlap_lengths

logger = logging.getLogger(__name__)

MAX_STEP = TWO_PI / 1000


def _coerce_model(model: Union[ModelSpec, dict]) -> ModelSpec:
    if isinstance(model, ModelSpec):
        return model
    try:
        return ModelSpec.model_validate(model)
    except ValidationError as e:
        raise ModelError(f"invalid model: {e.errors()[0]['msg']}") from e


def _coerce_scheme(scheme: Union[SamplingScheme, dict]) -> SamplingScheme:
    if isinstance(scheme, SamplingScheme):
        return scheme
    try:
        return SamplingScheme.model_validate(scheme)
    except ValidationError as e:
        raise ResampleError(f"invalid sampling scheme: {e.errors()[0]['msg']}") from e


# ---------------------------------------------------------------------------
# paths
# ---------------------------------------------------------------------------


def simulate_path(model: Union[ModelSpec, dict], step: float, seed: int) -> FinePath:
    """Euler–Maruyama path on a uniform grid of [0, 2π] with true spot covariance.

    The grid has ``ceil(2π/step)`` intervals, so the realized step is at most
    ``step``. Stochastic variance uses full truncation: the diffusion sees
    ``max(v, 0)`` and the recorded variance is floored at zero.
    """
    spec = _coerce_model(model)
    if not (math.isfinite(step) and 0.0 < step <= MAX_STEP * (1 + 1e-12)):
        raise ModelError(f"step must satisfy 0 < step <= 2π/1000, got {step}")

    m = int(math.ceil(TWO_PI / step - 1e-9))
    dt = TWO_PI / m
    times = dt * np.arange(m + 1)
    times[-1] = TWO_PI
    d = spec.n_assets
    rng = np.random.default_rng(np.random.SeedSequence(int(seed)))

    z = rng.standard_normal((d, m))
    price_drivers = z.copy()
    if d == 2:
        rho = spec.correlation
        price_drivers[1] = rho * z[0] + math.sqrt(max(0.0, 1.0 - rho * rho)) * z[1]

    if spec.kind == "constant_vol":
        variance = np.stack([np.full(m + 1, p.sigma ** 2) for p in spec.assets])
    elif spec.kind == "deterministic_vol":
        variance = np.stack([p.a + p.b * np.cos(times) for p in spec.assets])
    else:
        vol_noise = rng.standard_normal((d, m))
        variance = np.empty((d, m + 1))
        for j, p in enumerate(spec.assets):
            lev = p.leverage
            drivers = lev * price_drivers[j] + math.sqrt(1.0 - lev * lev) * vol_noise[j]
            variance[j] = _full_truncation(p.theta if p.v0 is None else p.v0, p.kappa, p.theta, p.xi, dt, drivers)

    drift = np.array([[p.drift] for p in spec.assets])
    increments = drift * dt + np.sqrt(variance[:, :-1] * dt) * price_drivers
    log_prices = np.concatenate((np.zeros((d, 1)), np.cumsum(increments, axis=1)), axis=1)

    corr = np.array([[1.0, spec.correlation], [spec.correlation, 1.0]])[:d, :d]
    spot_cov = np.empty((d, d, m + 1))
    for i in range(d):
        for j in range(d):
            spot_cov[i, j] = variance[i] if i == j else corr[i, j] * np.sqrt(variance[i] * variance[j])
    integrated = trapezoid(spot_cov, times, axis=-1)

    logger.debug(f"simulated {spec.kind} path: {d} asset(s), {m} steps, seed={seed}")
    return FinePath(step=dt, times=times, log_prices=log_prices, spot_cov=spot_cov, integrated_cov=integrated)


def _full_truncation(v0: float, kappa: float, theta: float, xi: float, dt: float, drivers: np.ndarray) -> np.ndarray:
    sqdt = math.sqrt(dt)
    out = np.empty(drivers.shape[0] + 1)
    v = float(v0)
    out[0] = v
    for k, z in enumerate(drivers.tolist(), start=1):
        vp = v if v > 0.0 else 0.0
        v = v + kappa * (theta - vp) * dt + xi * math.sqrt(vp) * sqdt * z
        out[k] = v if v > 0.0 else 0.0
    return out


# ---------------------------------------------------------------------------
# sampling and noise
# ---------------------------------------------------------------------------


def _observation_times(scheme: SamplingScheme, asset: int, rng: np.random.Generator) -> np.ndarray:
    if scheme.kind in ("even", "jittered"):
        n = scheme.n_for(asset)
        times = TWO_PI * np.arange(n + 1) / n
        times[-1] = TWO_PI
        if scheme.kind == "jittered" and n > 1:
            times[1:-1] += rng.uniform(-0.4, 0.4, n - 1) * (TWO_PI / n)
        return times

    lam = scheme.intensity_for(asset)
    expected = lam * TWO_PI
    batch = int(expected + 10.0 * math.sqrt(expected) + 16)
    arrivals = np.cumsum(rng.exponential(1.0 / lam, batch))
    while arrivals[-1] < TWO_PI:
        more = np.cumsum(rng.exponential(1.0 / lam, batch)) + arrivals[-1]
        arrivals = np.concatenate((arrivals, more))
    interior = arrivals[arrivals < TWO_PI]
    if interior.shape[0] < 2:
        raise ResampleError(
            f"poisson intensity {lam} put {interior.shape[0]} arrival(s) inside the window, need at least 2"
        )
    return np.concatenate(([0.0], interior, [TWO_PI]))


def sample_path(
    path: FinePath,
    scheme: Union[SamplingScheme, dict],
    seed: int,
    assets: Optional[Sequence[int]] = None,
) -> List[TickSeries]:
    """Observe a fine path at scheme times by previous-tick lookup.

    Observation times never depend on the path. ``assets`` restricts which
    assets are sampled; each asset's draw is the same whether or not others are.
    """
    sch = _coerce_scheme(scheme)
    wanted = range(path.n_assets) if assets is None else assets
    last = path.times.shape[0] - 1
    out = []
    for j in wanted:
        rng = np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(j),)))
        times = _observation_times(sch, j, rng)
        idx = np.clip(np.floor(times / path.step + 1e-9).astype(np.int64), 0, last)
        out.append(TickSeries(asset_id=f"asset{j + 1}", times=times, log_prices=path.log_prices[j, idx]))
    return out


def add_noise(series: TickSeries, noise: Union[NoiseSpec, dict], seed: int) -> TickSeries:
    """Add iid Gaussian noise of std η to every log-price."""
    spec = noise if isinstance(noise, NoiseSpec) else NoiseSpec.model_validate(noise)
    if spec.kind == "none" or spec.std == 0.0:
        return series
    rng = np.random.default_rng(np.random.SeedSequence(int(seed)))
    noisy = series.log_prices + rng.normal(0.0, spec.std, len(series))
    return TickSeries(asset_id=series.asset_id, times=series.times, log_prices=noisy)


# ---------------------------------------------------------------------------
# H_n
# ---------------------------------------------------------------------------


def h_n_statistic(times1, times2=None, t=TWO_PI):
    """Normalized quadratic variation of observation times up to ``t``.

    Univariate: Σ_{t_{j+1} <= t} (t_{j+1} - t_j)² / (2π/k_n) with k_n intervals.
    Bivariate: (n/2π) Σ |overlap|² over overlapping interval pairs whose
    overlap ends by ``t``, with n = min(n1, n2). ``t`` may be an array.
    """
    scalar = np.ndim(t) == 0
    tt = np.atleast_1d(np.asarray(t, dtype=np.float64))
    a = np.asarray(times1, dtype=np.float64)

    if times2 is None:
        gaps = np.diff(a)
        k_n = gaps.shape[0]
        ends = a[1:]
        terms = gaps * gaps / (TWO_PI / k_n)
    else:
        b = np.asarray(times2, dtype=np.float64)
        n = min(a.shape[0], b.shape[0]) - 1
        _, _, lengths, ends = overlap_lengths(a, b)
        order = np.argsort(ends, kind="stable")
        ends = ends[order]
        terms = (n / TWO_PI) * lengths[order] ** 2

    cumulative = np.concatenate(([0.0], np.cumsum(terms)))
    values = cumulative[np.searchsorted(ends, tt, side="right")]
    return float(values[0]) if scalar else values
