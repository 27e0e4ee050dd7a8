"""Estimation and simulation pipelines shared by the CLI and the HTTP API."""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..models import TWO_PI, FinePath, RescaledSeries, SpotCurve, TickSeries
from ..models.schemas import PairEstimate, RunConfig
from . import fourier
from .errors import ConfigError
from .experiments import child_seed
from .settings import FourierVolSettings, get_settings
from .simulate import add_noise, sample_path, simulate_path
from .tick_io import iter_pairs

logger = logging.getLogger(__name__)

Cutoff = Union[int, str, None]


@dataclass(frozen=True)
class PairCurve:
    asset_i: str
    asset_j: str
    curve: SpotCurve
    t_raw: np.ndarray


def default_window(series: Sequence[TickSeries]) -> Tuple[float, float]:
    start = min(float(s.times[0]) for s in series)
    end = max(float(s.times[-1]) for s in series)
    if not end > start:
        raise ConfigError(f"cannot infer a window from data spanning [{start}, {end}]; pass one explicitly")
    return start, end


def _rescale_all(series: Sequence[TickSeries], window) -> List[RescaledSeries]:
    if not series:
        raise ConfigError("no series to estimate")
    window = tuple(window) if window is not None else default_window(series)
    return [fourier.rescale_time(s, window) for s in series]


def resolve_cutoff(cutoff: Cutoff, a: RescaledSeries, b: RescaledSeries) -> int:
    """An explicit N, or ``select_cutoff`` on the coarser mesh of the pair."""
    if cutoff is None or cutoff == "auto":
        mesh = max(a.mesh, b.mesh)
        n_obs = min(a.times.shape[0], b.times.shape[0])
        return fourier.select_cutoff(mesh, n_obs=n_obs)
    try:
        n_freq = int(cutoff)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"cutoff must be an integer or 'auto', got '{cutoff}'") from e
    if n_freq < 0:
        raise ConfigError(f"cutoff must be >= 0, got {n_freq}")
    return n_freq


def estimate_integrated(
    series: Sequence[TickSeries],
    window=None,
    cutoff: Cutoff = "auto",
    variant: str = "canonical",
    settings: Optional[FourierVolSettings] = None,
) -> List[PairEstimate]:
    """Integrated (co-)volatility for every asset pair, diagonals included."""
    if variant not in ("canonical", "fejer-stabilized"):
        raise ConfigError(f"variant '{variant}' does not apply to integrated estimates")
    rescaled = _rescale_all(series, window)
    out = []
    for i, j in iter_pairs(rescaled):
        a, b = rescaled[i], rescaled[j]
        n_freq = resolve_cutoff(cutoff, a, b)
        if variant == "canonical":
            if i == j:
                value = fourier.integrated_volatility(fourier.return_fourier_coeffs(a, n_freq), n_freq)
            else:
                value = fourier.integrated_covolatility(a, b, n_freq)
        else:
            ca = fourier.return_fourier_coeffs(a, n_freq)
            cb = None if i == j else fourier.return_fourier_coeffs(b, n_freq)
            value = fourier.integrated_volatility_fejer(ca, n_freq, settings, c2=cb)
        logger.info(f"integrated {a.asset_id}/{b.asset_id}: N={n_freq} value={value:.6g}")
        out.append(PairEstimate(asset_i=a.asset_id, asset_j=b.asset_id, value=value, n_freq=n_freq))
    return out


def estimate_spot(
    series: Sequence[TickSeries],
    window=None,
    cutoff: Cutoff = "auto",
    spot_cutoff: Optional[int] = None,
    variant: str = "canonical",
    grid_size: Optional[int] = None,
    settings: Optional[FourierVolSettings] = None,
) -> List[PairCurve]:
    """Spot curves per pair; the positive variant covers diagonal pairs only.

    ``cutoff`` is the Bohr cutoff N, ``spot_cutoff`` the Fejér cutoff M
    (defaults to N). The positive variant uses a single cutoff, M.
    """
    settings = settings or get_settings()
    if variant not in ("canonical", "positive"):
        raise ConfigError(f"variant '{variant}' does not apply to spot estimates")
    size = grid_size or settings.spot_grid_size
    if size < 1:
        raise ConfigError(f"grid size must be >= 1, got {size}")
    grid = np.linspace(0.0, TWO_PI, size, endpoint=False)
    rescaled = _rescale_all(series, window)

    out = []
    for i, j in iter_pairs(rescaled):
        a, b = rescaled[i], rescaled[j]
        if variant == "positive" and i != j:
            logger.info(f"positive variant skips cross pair {a.asset_id}/{b.asset_id}")
            continue
        n_freq = resolve_cutoff(cutoff, a, b)
        m = n_freq if spot_cutoff is None else int(spot_cutoff)
        if variant == "positive":
            c = fourier.return_fourier_coeffs(a, 2 * m)
            curve = fourier.positive_spot_reconstruct(c, m, grid, settings)
        else:
            if m > n_freq:
                raise ConfigError(f"spot cutoff M={m} cannot exceed the Bohr cutoff N={n_freq}")
            ca = fourier.return_fourier_coeffs(a, n_freq + m)
            cb = ca if i == j else fourier.return_fourier_coeffs(b, n_freq + m)
            alpha = fourier.convolution_coeffs(ca, cb, n_freq, m)
            curve = fourier.fejer_spot_reconstruct(alpha, m, grid, settings)
        out.append(PairCurve(a.asset_id, b.asset_id, curve, a.to_raw(curve.grid)))
    return out


# ---------------------------------------------------------------------------
# simulation
# ---------------------------------------------------------------------------


def simulate_ticks(run: RunConfig, seed: Optional[int] = None) -> Tuple[List[TickSeries], FinePath, np.ndarray]:
    """Simulate, sample and perturb per ``run``; times are mapped onto ``run.simulate.window``.

    Returns the tick series, the fine path and the fine grid on the raw clock.
    """
    if run.model is None or run.sampling is None:
        raise ConfigError("simulate needs model and sampling sections")
    seed = run.seed if seed is None else int(seed)
    start, end = run.simulate.window
    if not end > start:
        raise ConfigError(f"simulate.window must satisfy start < end, got ({start}, {end})")

    path = simulate_path(run.model, TWO_PI / run.simulate.fine_steps, child_seed(seed, 0))
    ticks = sample_path(path, run.sampling, child_seed(seed, 1))
    out = []
    for j, series in enumerate(ticks):
        noisy = add_noise(series, run.noise, child_seed(seed, 2, j))
        out.append(TickSeries(asset_id=noisy.asset_id, times=_to_raw(noisy.times, start, end), log_prices=noisy.log_prices))
    logger.info(f"simulated {len(out)} series ({', '.join(str(len(s)) for s in out)} ticks), seed={seed}")
    return out, path, _to_raw(path.times, start, end)


def study_config_from_run(run: RunConfig, seed: Optional[int] = None) -> Dict[str, Any]:
    """Study section of a run config with model, sampling, noise and seed filled in."""
    if not run.study or ("kind" not in run.study and "study" not in run.study):
        raise ConfigError("study needs a study section with study.kind")
    cfg = dict(run.study)
    if "kind" in cfg:
        cfg["study"] = cfg.pop("kind")
    if run.model is not None:
        cfg.setdefault("model", run.model.model_dump())
    if run.sampling is not None:
        cfg.setdefault("sampling", run.sampling.model_dump(exclude_none=True))
    cfg.setdefault("noise", run.noise.model_dump())
    cfg["seed"] = run.seed if seed is None else int(seed)
    return cfg


def _to_raw(t: np.ndarray, start: float, end: float) -> np.ndarray:
    raw = np.clip(start + (end - start) * (np.asarray(t) / TWO_PI), start, end)
    raw[np.asarray(t) >= TWO_PI] = end
    return raw
