"""Monte Carlo studies of the Fourier estimator.

Four studies share one harness: per-replication seeds are spawned from the
master seed, each replication simulates, samples and estimates on its own
streams, and replications run on a thread pool whose size never affects the
records. ``run_study`` dispatches a config (model or dict) to its study.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Type, TypeVar, Union

import numpy as np
from pydantic import BaseModel, TypeAdapter, ValidationError
from scipy import stats
from scipy.integrate import trapezoid

from ..models import TWO_PI, FinePath, RescaledSeries, TickSeries
from ..models.schemas import (
    CltConfig,
    ConsistencyConfig,
    EppsConfig,
    ExperimentReport,
    ModelSpec,
    MseConfig,
    NoiseSpec,
    ReplicationRecord,
    SamplingScheme,
    StudyConfig,
    SyncSpec,
)
from . import fourier
from .baselines import hayashi_yoshida, realized_covariance_previous_tick
from .conditions import evaluate_checks
from .errors import ConfigError
from .report_stats import summarize
from .settings import resolve_threads
from .simulate import add_noise, h_n_statistic, sample_path, simulate_path
from .weighting import TestFunction

logger = logging.getLogger(__name__)

C = TypeVar("C", bound=BaseModel)

# default Fejér-cutoff multiples of select_cutoff swept by mse_sweep
MSE_CUTOFF_FACTORS = (0.25, 0.5, 1.0, 2.0, 3.0)
# relative gap allowed between analytic and finite-difference H′ variances
H_PRIME_TOL = 0.02
# variance of a ±0.4-step uniform jitter, in units of step²
JITTER_VAR = 0.8 ** 2 / 12.0


# ---------------------------------------------------------------------------
# harness
# ---------------------------------------------------------------------------


def _coerce(cls: Type[C], config: Union[C, Dict[str, Any]]) -> C:
    if isinstance(config, cls):
        return config
    if isinstance(config, BaseModel):
        config = config.model_dump()
    try:
        return cls.model_validate(config)
    except ValidationError as e:
        first = e.errors()[0]
        where = ".".join(str(p) for p in first.get("loc", ()))
        raise ConfigError(f"invalid {cls.__name__} at '{where}': {first['msg']}") from e


def child_seed(seed: int, *key: int) -> int:
    """Independent 63-bit seed for the sub-stream ``key`` of ``seed``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, np.uint64)[0] >> np.uint64(1))


def replication_seeds(master_seed: int, replications: int) -> List[int]:
    """Per-replication seeds spawned from the master seed."""
    children = np.random.SeedSequence(int(master_seed)).spawn(int(replications))
    return [int(c.generate_state(1, np.uint64)[0] >> np.uint64(1)) for c in children]


def _map_replications(
    fn: Callable[[int, int], List[ReplicationRecord]], seeds: Sequence[int], threads: Optional[int]
) -> List[ReplicationRecord]:
    workers = min(resolve_threads(threads), len(seeds))
    if workers <= 1:
        batches = [fn(i, s) for i, s in enumerate(seeds)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            batches = list(pool.map(fn, range(len(seeds)), seeds))
    return [record for batch in batches for record in batch]


def _fine_step(fine_steps: Optional[int], max_count: float) -> float:
    m = fine_steps or max(1000, 4 * int(math.ceil(max_count)))
    return TWO_PI / m


def _check_pair(pair: Tuple[int, int], model: ModelSpec) -> Tuple[int, int]:
    i, j = int(pair[0]), int(pair[1])
    if not (0 <= i < model.n_assets and 0 <= j < model.n_assets):
        raise ConfigError(f"pair {pair} refers to an asset the {model.n_assets}-asset model lacks")
    return i, j


def _observe(
    path: FinePath,
    scheme: SamplingScheme,
    noise: NoiseSpec,
    sample_seed: int,
    noise_seed: int,
    assets: Sequence[int],
    level: int = 0,
) -> Tuple[Dict[int, TickSeries], Dict[int, RescaledSeries]]:
    ticks = sample_path(path, scheme, child_seed(sample_seed, level), assets=assets)
    observed, rescaled = {}, {}
    for j, series in zip(assets, ticks):
        noisy = add_noise(series, noise, child_seed(noise_seed, level, j))
        observed[j] = noisy
        rescaled[j] = fourier.rescale_time(noisy, (0.0, TWO_PI))
    return observed, rescaled


def _record(replication: int, seed: int, cell: str, estimate: float, truth: float, error: float, **extra) -> ReplicationRecord:
    return ReplicationRecord(
        replication=replication,
        seed=seed,
        cell=cell,
        estimate=float(estimate),
        truth=float(truth),
        error=float(error),
        extra={k: float(v) for k, v in extra.items()},
    )


def _build_report(
    study: str,
    cfg: BaseModel,
    records: List[ReplicationRecord],
    metrics: Dict[str, float],
    checks: Dict[str, Dict[str, Any]],
    flags: Optional[Dict[str, bool]] = None,
) -> ExperimentReport:
    summary = summarize(records)
    for cell, s in summary.items():
        logger.info(f"{study} {cell}: n={s.count} bias={s.bias:.4g} mse={s.mse:.4g} median_error={s.median_error:.4g}")
    clean = {k: float(v) for k, v in metrics.items() if v is not None and math.isfinite(float(v))}
    all_flags = evaluate_checks(clean, checks)
    all_flags.update(flags or {})
    report = ExperimentReport(
        study=study,
        config=cfg.model_dump(mode="json"),
        records=records,
        summary=summary,
        metrics=clean,
        checks=checks,
        flags=all_flags,
    )
    logger.info(f"{study} study finished: {len(records)} records, passed={report.passed}")
    return report


def _pair_coeffs(rescaled: Dict[int, RescaledSeries], i: int, j: int, max_k: int):
    ci = fourier.return_fourier_coeffs(rescaled[i], max_k)
    cj = ci if i == j else fourier.return_fourier_coeffs(rescaled[j], max_k)
    return ci, cj


# ---------------------------------------------------------------------------
# uniform consistency
# ---------------------------------------------------------------------------


def consistency_study(config: Union[ConsistencyConfig, Dict[str, Any]]) -> ExperimentReport:
    """Sup-grid spot error along a ladder of sample sizes.

    ``cutoff_rule="split"`` uses the Nyquist cutoff for the Bohr average and
    ``select_spot_cutoff`` for the Fejér sum; ``"select"`` uses
    ``select_cutoff`` for both. "split" is the default; "select" is chosen
    through the config.
    """
    cfg = _coerce(ConsistencyConfig, config)
    ladder = list(cfg.ladder)
    if len(ladder) < 3:
        raise ConfigError(f"consistency ladder needs at least 3 sample sizes, got {len(ladder)}")
    if any(b <= a for a, b in zip(ladder, ladder[1:])):
        raise ConfigError(f"consistency ladder must be strictly increasing, got {ladder}")
    i, j = _check_pair(cfg.pair, cfg.model)
    assets = sorted({i, j})
    grid = np.linspace(0.0, TWO_PI, cfg.grid_size, endpoint=False)
    step = _fine_step(cfg.fine_steps, max(cfg.sampling.with_count(n).expected_count() for n in ladder))

    def one(rep: int, seed: int) -> List[ReplicationRecord]:
        path = simulate_path(cfg.model, step, child_seed(seed, 0))
        truth_curve = path.spot(i, j, grid)
        records = []
        for level, n in enumerate(ladder):
            _, rescaled = _observe(
                path, cfg.sampling.with_count(n), cfg.noise, child_seed(seed, 1), child_seed(seed, 2), assets, level
            )
            mesh = max(rescaled[a].mesh for a in assets)
            n_obs = min(rescaled[a].times.shape[0] for a in assets)
            if cfg.cutoff_rule == "split":
                n_freq = fourier.nyquist_cutoff(n_obs - 1)
                spot_cutoff = min(fourier.select_spot_cutoff(mesh), n_freq)
            else:
                n_freq = spot_cutoff = fourier.select_cutoff(mesh, n_obs=n_obs)

            ci, cj = _pair_coeffs(rescaled, i, j, n_freq + spot_cutoff)
            alpha = fourier.convolution_coeffs(ci, cj, n_freq, spot_cutoff)
            curve = fourier.fejer_spot_reconstruct(alpha, spot_cutoff, grid)
            sup_error = float(np.max(np.abs(curve.values - truth_curve)))
            records.append(_record(
                rep, seed, f"n={n}",
                estimate=TWO_PI * alpha[0].real,
                truth=path.integrated(i, j),
                error=sup_error,
                n_freq=n_freq,
                spot_cutoff=spot_cutoff,
                mesh=mesh,
                alpha1_re=alpha[1].real,
                alpha1_im=alpha[1].imag,
                sup_truth=float(np.max(np.abs(truth_curve))),
            ))
        return records

    records = _map_replications(one, replication_seeds(cfg.seed, cfg.replications), cfg.threads)

    metrics: Dict[str, float] = {}
    medians = []
    for n in ladder:
        rows = [r for r in records if r.cell == f"n={n}"]
        med = float(np.median([r.error for r in rows]))
        medians.append(med)
        metrics[f"median_error:n={n}"] = med
    finest = [r for r in records if r.cell == f"n={ladder[-1]}"]
    metrics["median_error_decreasing"] = 1.0 if all(b < a for a, b in zip(medians, medians[1:])) else 0.0
    sup_truth = float(np.median([r.extra["sup_truth"] for r in finest]))
    metrics["final_relative_error"] = medians[-1] / sup_truth if sup_truth > 0 else math.inf

    # α_1 around its true value; a constant spot has zero k=1 coefficient
    a1 = np.array([r.extra["alpha1_re"] for r in finest])
    metrics["alpha1_mean"] = float(np.mean(a1))
    if a1.shape[0] > 1 and np.std(a1, ddof=1) > 0:
        metrics["alpha1_abs_t"] = abs(float(np.mean(a1))) / (float(np.std(a1, ddof=1)) / math.sqrt(a1.shape[0]))

    checks: Dict[str, Dict[str, Any]] = {
        "final_error": {"final_relative_error": {"lt": cfg.final_error_tol}},
    }
    if cfg.cutoff_rule == "split":
        checks["decreasing"] = {"median_error_decreasing": 1.0}
    if cfg.model.kind == "constant_vol":
        checks["alpha1_unbiased"] = {"alpha1_abs_t": {"lt": 3.0}}
    return _build_report("consistency", cfg, records, metrics, checks)


# ---------------------------------------------------------------------------
# central limit theorem
# ---------------------------------------------------------------------------


def deterministic_spot(model: ModelSpec, t: np.ndarray) -> np.ndarray:
    """True Σ(t) of a deterministic_vol model, shape (assets, assets, len(t))."""
    t = np.asarray(t, dtype=np.float64)
    var = np.stack([p.a + p.b * np.cos(t) for p in model.assets])
    d = model.n_assets
    out = np.empty((d, d, t.shape[0]))
    for a in range(d):
        for b in range(d):
            out[a, b] = var[a] if a == b else model.correlation * np.sqrt(var[a] * var[b])
    return out


def clt_cutoff(cfg: CltConfig, mesh: float, bivariate: bool) -> int:
    """Cutoff for the CLT study, checked against the asymptotic regime."""
    alpha = cfg.lipschitz_order
    if bivariate and alpha <= 2.0 / 3.0:
        raise ConfigError(f"bivariate CLT needs Lipschitz order > 2/3, got {alpha}")
    if cfg.n_freq is not None:
        n_freq = cfg.n_freq
    elif bivariate:
        n_freq = max(1, int(math.floor(mesh ** (-0.75))))
    else:
        n_freq = fourier.nyquist_cutoff(cfg.n)
    if mesh * n_freq ** (2.0 * alpha) < 1.0:
        raise ConfigError(
            f"ρN^(2α) >= 1 violated: ρ={mesh:.4g}, N={n_freq}, α={alpha} gives {mesh * n_freq ** (2 * alpha):.4g}"
        )
    if bivariate and mesh * n_freq ** (4.0 / 3.0) > 1.0:
        raise ConfigError(
            f"ρN^(4/3) <= 1 violated: ρ={mesh:.4g}, N={n_freq} gives {mesh * n_freq ** (4.0 / 3.0):.4g}"
        )
    return n_freq


def clt_study(config: Union[CltConfig, Dict[str, Any]]) -> ExperimentReport:
    """Normalized weighted error ρ^(-1/2) ∫ h (Σ̂ - Σ) dt against its limiting variance.

    Without an explicit ``n_freq`` the cutoff is Nyquist for one asset and
    floor(ρ^(-3/4)) for a pair; an explicit ``n_freq`` overrides both and is
    checked against the same regime bounds.
    """
    cfg = _coerce(CltConfig, config)
    if cfg.model.kind != "deterministic_vol":
        raise ConfigError(f"clt study needs a deterministic_vol model, got {cfg.model.kind}")
    if cfg.sampling.kind not in ("even", "jittered"):
        raise ConfigError(f"clt study needs even or jittered sampling, got {cfg.sampling.kind}")
    i, j = _check_pair(cfg.pair, cfg.model)
    bivariate = i != j
    assets = sorted({i, j})
    scheme = cfg.sampling.with_count(cfg.n)
    nominal_mesh = scheme.nominal_mesh()
    n_freq = clt_cutoff(cfg, nominal_mesh, bivariate)
    weight = TestFunction.from_spec(cfg.weight)
    k_max = min(n_freq, weight.max_k)
    quad = np.linspace(0.0, TWO_PI, cfg.quadrature_points)
    h_quad = weight(quad)
    step = _fine_step(cfg.fine_steps, scheme.expected_count())

    def one(rep: int, seed: int) -> List[ReplicationRecord]:
        path = simulate_path(cfg.model, step, child_seed(seed, 0))
        _, rescaled = _observe(path, scheme, cfg.noise, child_seed(seed, 1), child_seed(seed, 2), assets)
        mesh = max(rescaled[a].mesh for a in assets)
        ci, cj = _pair_coeffs(rescaled, i, j, n_freq + k_max)
        alpha = fourier.convolution_coeffs(ci, cj, n_freq, k_max)
        estimate = fourier.weighted_spot_integral(alpha, n_freq, weight)
        truth = float(trapezoid(h_quad * path.spot(i, j, quad), quad))
        return [_record(rep, seed, f"n={cfg.n};N={n_freq}", estimate, truth, (estimate - truth) / math.sqrt(mesh), mesh=mesh)]

    records = _map_replications(one, replication_seeds(cfg.seed, cfg.replications), cfg.threads)

    # limiting variance: ∫ H′ h² v dt with v = 2σ⁴ (univariate) or Σ11Σ22 + Σ12² (bivariate)
    sigma = deterministic_spot(cfg.model, quad)
    if bivariate:
        integrand = sigma[i, i] * sigma[j, j] + sigma[i, j] ** 2
    else:
        integrand = 2.0 * sigma[i, i] ** 2
    integrand = integrand * h_quad ** 2

    reference = sample_path(simulate_path(cfg.model, step, child_seed(cfg.seed, 0)), scheme, child_seed(cfg.seed, 1), assets=assets)
    times = {a: s.times for a, s in zip(assets, reference)}
    h_curve = h_n_statistic(times[i], None if not bivariate else times[j], quad)
    h_prime_fd = np.gradient(h_curve, quad)
    var_fd = float(trapezoid(h_prime_fd * integrand, quad))

    metrics: Dict[str, float] = {"var_theory_fd": var_fd, "n_freq": float(n_freq), "mesh": nominal_mesh}
    h_prime_analytic = None
    if cfg.sampling.kind == "even":
        h_prime_analytic = 1.0
    elif not bivariate:
        h_prime_analytic = 1.0 + 2.0 * JITTER_VAR
    if h_prime_analytic is not None:
        var_analytic = h_prime_analytic * float(trapezoid(integrand, quad))
        metrics["var_theory_analytic"] = var_analytic
        metrics["h_prime_gap"] = abs(var_fd / var_analytic - 1.0) if var_analytic > 0 else math.inf
        theory = var_analytic
    else:
        theory = var_fd

    stat = np.array([r.error for r in records])
    sample_var = float(np.var(stat, ddof=1)) if stat.shape[0] > 1 else math.nan
    metrics["var_theory"] = theory
    metrics["sample_variance"] = sample_var
    metrics["variance_ratio"] = sample_var / theory if theory > 0 else math.nan
    if stat.shape[0] > 2 and np.ptp(stat) > 0:
        metrics["skewness"] = float(stats.skew(stat))
        metrics["excess_kurtosis"] = float(stats.kurtosis(stat, fisher=True))

    checks: Dict[str, Dict[str, Any]] = {
        "variance": {"variance_ratio": {"gte": 1.0 - cfg.variance_tol, "lte": 1.0 + cfg.variance_tol}},
        "skewness": {"skewness": {"gt": -cfg.skew_tol, "lt": cfg.skew_tol}},
        "kurtosis": {"excess_kurtosis": {"gt": -cfg.kurtosis_tol, "lt": cfg.kurtosis_tol}},
    }
    if h_prime_analytic is not None:
        checks["h_prime"] = {"h_prime_gap": {"lt": H_PRIME_TOL}}
    flags = {"unequal_counts": bivariate and times[i].shape[0] != times[j].shape[0]}
    return _build_report("clt", cfg, records, metrics, checks, flags)


# ---------------------------------------------------------------------------
# MSE sweep
# ---------------------------------------------------------------------------


def default_cutoffs(select: int, n_obs: int) -> List[int]:
    cap = max(1, (n_obs - 1) // 2)
    return sorted({min(cap, max(1, int(math.floor(select * f + 0.5)))) for f in MSE_CUTOFF_FACTORS})


def _format_eta(eta: float) -> str:
    return f"{eta:.6g}"


def mse_sweep(config: Union[MseConfig, Dict[str, Any]]) -> ExperimentReport:
    """Empirical MSE of integrated (co-)volatility over cutoffs, sample sizes and noise levels."""
    cfg = _coerce(MseConfig, config)
    i, j = _check_pair(cfg.pair, cfg.model)
    if cfg.variant == "fejer" and i != j:
        raise ConfigError("the Fejér-weighted integrated estimator is defined for a single asset")
    assets = sorted({i, j})

    plan: List[Tuple[int, SamplingScheme, int, List[int]]] = []
    for n in cfg.n_ladder:
        scheme = cfg.sampling.with_count(n)
        n_obs = int(scheme.expected_count()) + 1
        select = fourier.select_cutoff(scheme.nominal_mesh(), n_obs=n_obs)
        cutoffs = sorted(set(cfg.n_freqs)) if cfg.n_freqs else default_cutoffs(select, n_obs)
        if not (cutoffs[0] <= select <= cutoffs[-1] and cutoffs[-1] >= 10 * cutoffs[0]):
            raise ConfigError(
                f"cutoff list {cutoffs} must span a decade around select_cutoff={select} at n={n}"
            )
        plan.append((n, scheme, select, cutoffs))

    step = _fine_step(cfg.fine_steps, max(s.expected_count() for _, s, _, _ in plan))

    def estimate(ci, cj, n_freq: int) -> float:
        if i == j:
            if cfg.variant == "fejer":
                return fourier.integrated_volatility_fejer(ci, n_freq)
            return fourier.integrated_volatility(ci, n_freq)
        return TWO_PI * fourier.convolution_coeffs(ci, cj, n_freq, 0)[0].real

    def one(rep: int, seed: int) -> List[ReplicationRecord]:
        path = simulate_path(cfg.model, step, child_seed(seed, 0))
        truth = path.integrated(i, j)
        records = []
        for level, (n, scheme, _, cutoffs) in enumerate(plan):
            for eta in cfg.noise_ladder:
                noise = NoiseSpec(kind="iid_gaussian" if eta > 0 else "none", std=eta)
                _, rescaled = _observe(path, scheme, noise, child_seed(seed, 1), child_seed(seed, 2), assets, level)
                mesh = max(rescaled[a].mesh for a in assets)
                ci, cj = _pair_coeffs(rescaled, i, j, cutoffs[-1])
                for n_freq in cutoffs:
                    value = estimate(ci, cj, n_freq)
                    records.append(_record(
                        rep, seed, f"n={n};eta={_format_eta(eta)};N={n_freq}",
                        value, truth, value - truth, n=n, eta=eta, n_freq=n_freq, mesh=mesh,
                    ))
        return records

    records = _map_replications(one, replication_seeds(cfg.seed, cfg.replications), cfg.threads)
    summary = summarize(records)

    metrics: Dict[str, float] = {}
    checks: Dict[str, Dict[str, Any]] = {}
    best_points: List[Tuple[float, float]] = []
    for n, scheme, select, cutoffs in plan:
        for eta in cfg.noise_ladder:
            tag = f"n={n};eta={_format_eta(eta)}"
            mse = {N: summary[f"{tag};N={N}"].mse for N in cutoffs}
            best_n = min(cutoffs, key=lambda N: (mse[N], N))
            metrics[f"best_N:{tag}"] = float(best_n)
            metrics[f"mse_best:{tag}"] = mse[best_n]
            if select in mse:
                metrics[f"mse_select:{tag}"] = mse[select]
                metrics[f"select_ratio:{tag}"] = mse[select] / mse[best_n] if mse[best_n] > 0 else 1.0
            metrics[f"argmin_interior:{tag}"] = 1.0 if best_n < cutoffs[-1] else 0.0
            metrics[f"mse_gap:{tag}"] = mse[cutoffs[-1]] - mse[best_n]
            if eta == 0.0:
                if select in mse:
                    checks[f"select_within_factor:{tag}"] = {f"select_ratio:{tag}": {"lte": cfg.select_factor_tol}}
                if mse[best_n] > 0:
                    best_points.append((scheme.nominal_mesh(), mse[best_n]))
            else:
                checks[f"noise_interior:{tag}"] = {
                    f"argmin_interior:{tag}": 1.0,
                    f"mse_gap:{tag}": {"gt": 0.0},
                }

    if len(best_points) >= 2:
        fit = stats.linregress(np.log([p[0] for p in best_points]), np.log([p[1] for p in best_points]))
        metrics["rate_slope"] = float(fit.slope)
        lo, hi = cfg.slope_range
        checks["rate"] = {"rate_slope": {"gte": lo, "lte": hi}}
    return _build_report("mse", cfg, records, metrics, checks)


# ---------------------------------------------------------------------------
# Epps effect
# ---------------------------------------------------------------------------


def epps_study(config: Union[EppsConfig, Dict[str, Any]]) -> ExperimentReport:
    """Previous-tick covariance over a Δ ladder next to Fourier and Hayashi–Yoshida."""
    cfg = _coerce(EppsConfig, config)
    if cfg.model.n_assets != 2:
        raise ConfigError("epps study needs a two-asset model")
    deltas = sorted(cfg.deltas, reverse=True)
    if deltas[0] > TWO_PI:
        raise ConfigError(f"sync step {deltas[0]} exceeds the window length 2π")
    step = _fine_step(cfg.fine_steps, max(cfg.sampling.expected_count(a) for a in (0, 1)))
    tick_cells = [f"previous_tick:delta={d:.6g}" for d in deltas]

    def one(rep: int, seed: int) -> List[ReplicationRecord]:
        path = simulate_path(cfg.model, step, child_seed(seed, 0))
        truth = path.integrated(0, 1)
        ticks, rescaled = _observe(path, cfg.sampling, cfg.noise, child_seed(seed, 1), child_seed(seed, 2), [0, 1])
        records = []
        for cell, delta in zip(tick_cells, deltas):
            value = realized_covariance_previous_tick(ticks[0], ticks[1], SyncSpec(grid_step=delta), window=(0.0, TWO_PI))
            records.append(_record(rep, seed, cell, value, truth, value - truth, delta=delta))

        mesh = max(rescaled[0].mesh, rescaled[1].mesh)
        n_obs = min(rescaled[0].times.shape[0], rescaled[1].times.shape[0])
        n_freq = cfg.n_freq or fourier.select_cutoff(mesh, n_obs=n_obs)
        value = fourier.integrated_covolatility(rescaled[0], rescaled[1], n_freq)
        records.append(_record(rep, seed, "fourier", value, truth, value - truth, n_freq=n_freq, mesh=mesh))
        value = hayashi_yoshida(rescaled[0], rescaled[1])
        records.append(_record(rep, seed, "hayashi_yoshida", value, truth, value - truth))
        return records

    records = _map_replications(one, replication_seeds(cfg.seed, cfg.replications), cfg.threads)
    summary = summarize(records)

    metrics: Dict[str, float] = {f"bias:{cell}": s.bias for cell, s in summary.items()}
    metrics["epps_gap"] = abs(summary[tick_cells[-1]].bias) - abs(summary[tick_cells[0]].bias)
    for cell, key in (("fourier", "fourier_abs_t"), ("hayashi_yoshida", "hy_abs_t")):
        se = summary[cell].std_error
        if se:
            metrics[key] = abs(summary[cell].bias) / se
    checks = {
        "epps": {"epps_gap": {"gt": 0.0}},
        "fourier_unbiased": {"fourier_abs_t": {"lt": cfg.t_stat_tol}},
        "hy_unbiased": {"hy_abs_t": {"lt": cfg.t_stat_tol}},
    }
    return _build_report("epps", cfg, records, metrics, checks)


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

_STUDY_ADAPTER = TypeAdapter(StudyConfig)

STUDIES = {
    "consistency": consistency_study,
    "clt": clt_study,
    "mse": mse_sweep,
    "epps": epps_study,
}


def parse_study_config(config: Union[BaseModel, Dict[str, Any]]):
    if isinstance(config, (ConsistencyConfig, CltConfig, MseConfig, EppsConfig)):
        return config
    if isinstance(config, BaseModel):
        config = config.model_dump()
    if not isinstance(config, dict) or config.get("study") not in STUDIES:
        kind = config.get("study") if isinstance(config, dict) else None
        raise ConfigError(f"unknown study '{kind}', expected one of {sorted(STUDIES)}")
    try:
        return _STUDY_ADAPTER.validate_python(config)
    except ValidationError as e:
        first = e.errors()[0]
        where = ".".join(str(p) for p in first.get("loc", ()))
        raise ConfigError(f"invalid {config['study']} config at '{where}': {first['msg']}") from e


def run_study(config: Union[BaseModel, Dict[str, Any]]) -> ExperimentReport:
    cfg = parse_study_config(config)
    logger.info(f"running {cfg.study} study: {cfg.replications} replications, seed={cfg.seed}")
    return STUDIES[cfg.study](cfg)
