"""Pydantic models for simulation specs, study configs, reports and API bodies."""

import math
from typing import Annotated, Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from . import TWO_PI


# ---------------------------------------------------------------------------
# simulation inputs
# ---------------------------------------------------------------------------


class AssetParams(BaseModel):
    """Per-asset parameters; which ones are required depends on ``ModelSpec.kind``."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    sigma: Optional[float] = Field(default=None, gt=0, description="constant_vol volatility")
    a: Optional[float] = Field(default=None, description="deterministic_vol level: σ²(t) = a + b·cos(t)")
    b: Optional[float] = Field(default=None, description="deterministic_vol amplitude")
    kappa: Optional[float] = Field(default=None, gt=0, description="variance mean-reversion speed")
    theta: Optional[float] = Field(default=None, gt=0, description="variance long-run level")
    xi: Optional[float] = Field(default=None, gt=0, description="vol-of-vol")
    v0: Optional[float] = Field(default=None, ge=0, description="initial variance (defaults to theta)")
    leverage: float = Field(default=0.0, ge=-1, le=1, description="correlation of variance and price drivers")
    drift: float = 0.0


class ModelSpec(BaseModel):
    """Price model dp = σ dW + b dt for one or two assets."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["constant_vol", "deterministic_vol", "stochastic_vol"]
    assets: List[AssetParams] = Field(..., min_length=1, max_length=2)
    correlation: float = Field(default=0.0, ge=-1, le=1, description="Brownian correlation between assets")

    @model_validator(mode="after")
    def _check_kind_params(self):
        for j, p in enumerate(self.assets, start=1):
            if self.kind == "constant_vol":
                if p.sigma is None:
                    raise ValueError(f"asset{j}: constant_vol needs sigma")
            elif self.kind == "deterministic_vol":
                if p.a is None or p.b is None:
                    raise ValueError(f"asset{j}: deterministic_vol needs a and b")
                if not p.a > abs(p.b):
                    raise ValueError(f"asset{j}: deterministic_vol needs a > |b|, got a={p.a}, b={p.b}")
            else:
                if p.kappa is None or p.theta is None or p.xi is None:
                    raise ValueError(f"asset{j}: stochastic_vol needs kappa, theta and xi")
                if 2.0 * p.kappa * p.theta < p.xi ** 2:
                    raise ValueError(
                        f"asset{j}: Feller condition 2·kappa·theta >= xi² violated "
                        f"({2.0 * p.kappa * p.theta} < {p.xi ** 2})"
                    )
        return self

    @property
    def n_assets(self) -> int:
        return len(self.assets)


class SamplingScheme(BaseModel):
    """Observation-time scheme; ``n`` / ``intensity`` hold one value or one per asset."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["even", "jittered", "poisson"] = "even"
    n: Optional[List[int]] = Field(default=None, description="intervals per asset (even, jittered)")
    intensity: Optional[List[float]] = Field(default=None, description="arrival rate λ per asset (poisson)")

    @field_validator("n", "intensity", mode="before")
    @classmethod
    def _broadcast(cls, v):
        if v is None or isinstance(v, (list, tuple)):
            return v
        return [v]

    @model_validator(mode="after")
    def _check_counts(self):
        if self.kind in ("even", "jittered"):
            if not self.n or any(x < 1 for x in self.n):
                raise ValueError(f"{self.kind} sampling needs n >= 1")
        else:
            if not self.intensity or any(not x > 0 for x in self.intensity):
                raise ValueError("poisson sampling needs intensity > 0")
        return self

    def n_for(self, asset: int) -> int:
        values = self.n or []
        return int(values[asset] if asset < len(values) else values[-1])

    def intensity_for(self, asset: int) -> float:
        values = self.intensity or []
        return float(values[asset] if asset < len(values) else values[-1])

    def with_count(self, n: int) -> "SamplingScheme":
        """Same scheme resized to about ``n`` observations per asset."""
        if self.kind == "poisson":
            return self.model_copy(update={"intensity": [n / TWO_PI]})
        return self.model_copy(update={"n": [int(n)]})

    def expected_count(self, asset: int = 0) -> float:
        if self.kind == "poisson":
            return self.intensity_for(asset) * TWO_PI
        return float(self.n_for(asset))

    def nominal_mesh(self, asset: int = 0) -> float:
        """Typical largest gap, used to pick default cutoffs before any draw."""
        if self.kind == "poisson":
            lam = self.intensity_for(asset)
            count = max(2.0, lam * TWO_PI)
            return (math.log(count) + 0.5772156649015329) / lam
        return TWO_PI / self.n_for(asset)


class NoiseSpec(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["none", "iid_gaussian"] = "none"
    std: float = Field(default=0.0, ge=0, description="noise standard deviation η")


class SyncSpec(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    grid_step: float = Field(..., gt=0, description="previous-tick grid spacing Δ")
    rule: Literal["previous_tick"] = "previous_tick"


class WeightSpec(BaseModel):
    """Bump test function exp(-1/(1-u²)) with u = (t - center)/half_width."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    center: float = math.pi
    half_width: float = Field(default=0.75 * math.pi, gt=0)
    scale: float = 1.0
    max_k: int = Field(default=256, ge=1, le=4096, description="highest frequency kept in c_k(h)")

    @model_validator(mode="after")
    def _inside_window(self):
        if self.center - self.half_width <= 0 or self.center + self.half_width >= TWO_PI:
            raise ValueError("weight support must lie strictly inside (0, 2π)")
        return self


# ---------------------------------------------------------------------------
# study configs
# ---------------------------------------------------------------------------


class StudyBase(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    model: ModelSpec
    sampling: SamplingScheme = Field(default_factory=lambda: SamplingScheme(kind="even", n=[1000]))
    noise: NoiseSpec = Field(default_factory=NoiseSpec)
    replications: int = Field(default=100, ge=1, le=100000)
    seed: int = Field(default=0, ge=0)
    threads: Optional[int] = Field(default=None, ge=1)
    fine_steps: Optional[int] = Field(default=None, ge=1000, description="fine simulation grid size")


class ConsistencyConfig(StudyBase):
    study: Literal["consistency"] = "consistency"
    ladder: List[int] = Field(default_factory=lambda: [1000, 4000, 16000])
    cutoff_rule: Literal["split", "select"] = "split"
    pair: Tuple[int, int] = (0, 0)
    grid_size: int = Field(default=256, ge=8)
    final_error_tol: float = Field(default=0.25, gt=0, description="bound on final median error / sup Σ")


class CltConfig(StudyBase):
    study: Literal["clt"] = "clt"
    n: int = Field(default=20000, ge=10)
    n_freq: Optional[int] = Field(default=None, ge=1)
    pair: Tuple[int, int] = (0, 0)
    weight: WeightSpec = Field(default_factory=WeightSpec)
    lipschitz_order: float = Field(default=1.0, gt=0.5, le=1.0)
    quadrature_points: int = Field(default=1024, ge=64)
    variance_tol: float = Field(default=0.15, gt=0)
    skew_tol: float = Field(default=0.15, gt=0)
    kurtosis_tol: float = Field(default=0.3, gt=0)


class MseConfig(StudyBase):
    study: Literal["mse"] = "mse"
    n_ladder: List[int] = Field(default_factory=lambda: [500, 2000, 8000], min_length=1)
    n_freqs: Optional[List[int]] = None
    noise_ladder: List[float] = Field(default_factory=lambda: [0.0])
    pair: Tuple[int, int] = (0, 1)
    variant: Literal["canonical", "fejer"] = "canonical"
    select_factor_tol: float = Field(default=4.0, gt=1)
    slope_range: Tuple[float, float] = (0.5, 0.9)

    @field_validator("noise_ladder")
    @classmethod
    def _nonnegative_noise(cls, v):
        if any(x < 0 for x in v):
            raise ValueError("noise levels must be >= 0")
        return v


class EppsConfig(StudyBase):
    study: Literal["epps"] = "epps"
    sampling: SamplingScheme = Field(default_factory=lambda: SamplingScheme(kind="poisson", intensity=[50.0]))
    deltas: List[float] = Field(default_factory=lambda: [TWO_PI / 10, TWO_PI / 50, TWO_PI / 250], min_length=2)
    n_freq: Optional[int] = Field(default=None, ge=1)
    t_stat_tol: float = Field(default=3.0, gt=0)

    @field_validator("deltas")
    @classmethod
    def _positive_deltas(cls, v):
        if any(not x > 0 for x in v):
            raise ValueError("sync steps must be > 0")
        return v


StudyConfig = Annotated[
    Union[ConsistencyConfig, CltConfig, MseConfig, EppsConfig],
    Field(discriminator="study"),
]


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


class ReplicationRecord(BaseModel):
    replication: int
    seed: int
    cell: str
    estimate: float
    truth: float
    error: float
    extra: Dict[str, float] = Field(default_factory=dict)


class CellSummary(BaseModel):
    count: int
    mean_estimate: float
    mean_truth: float
    bias: float
    std_error: Optional[float] = None
    variance: Optional[float] = None
    mse: float
    mean_error: float
    median_error: float
    q05_error: float
    q95_error: float
    skewness: Optional[float] = None
    excess_kurtosis: Optional[float] = None


class ExperimentReport(BaseModel):
    study: Literal["consistency", "clt", "mse", "epps"]
    config: Dict[str, Any]
    records: List[ReplicationRecord]
    summary: Dict[str, CellSummary]
    metrics: Dict[str, float] = Field(default_factory=dict)
    checks: Dict[str, Dict[str, Any]] = Field(default_factory=dict)
    flags: Dict[str, bool] = Field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.flags.get(name, False) for name in self.checks)


# ---------------------------------------------------------------------------
# CLI run config
# ---------------------------------------------------------------------------


class SimulateOptions(BaseModel):
    model_config = ConfigDict(extra="forbid")

    fine_steps: int = Field(default=20000, ge=1000)
    window: Tuple[float, float] = (0.0, TWO_PI)


class RunConfig(BaseModel):
    """Grouped contents of a flat ``section.key=value`` config file."""
    model_config = ConfigDict(extra="forbid")

    seed: int = Field(default=0, ge=0)
    model: Optional[ModelSpec] = None
    sampling: Optional[SamplingScheme] = None
    noise: NoiseSpec = Field(default_factory=NoiseSpec)
    simulate: SimulateOptions = Field(default_factory=SimulateOptions)
    study: Optional[Dict[str, Any]] = None


# ---------------------------------------------------------------------------
# API bodies
# ---------------------------------------------------------------------------


class SeriesIn(BaseModel):
    asset_id: str = Field(..., min_length=1)
    times: List[float] = Field(..., min_length=2)
    log_prices: List[float] = Field(..., min_length=2)

    @model_validator(mode="after")
    def _aligned(self):
        if len(self.times) != len(self.log_prices):
            raise ValueError("times and log_prices must have the same length")
        return self


class IntegratedRequest(BaseModel):
    series: List[SeriesIn] = Field(..., min_length=1, max_length=16)
    window: Tuple[float, float]
    cutoff: Union[int, Literal["auto"]] = "auto"
    variant: Literal["canonical", "fejer-stabilized"] = "canonical"


class PairEstimate(BaseModel):
    asset_i: str
    asset_j: str
    value: float
    n_freq: int


class IntegratedResponse(BaseModel):
    variant: str
    estimates: List[PairEstimate]


class SpotRequest(BaseModel):
    series: List[SeriesIn] = Field(..., min_length=1, max_length=16)
    window: Tuple[float, float]
    cutoff: Union[int, Literal["auto"]] = "auto"
    spot_cutoff: Optional[int] = Field(default=None, ge=1)
    variant: Literal["canonical", "positive"] = "canonical"
    grid_size: Optional[int] = Field(default=None, ge=1, le=10000)


class SpotCurveOut(BaseModel):
    asset_i: str
    asset_j: str
    variant: str
    n_freq: int
    t_rescaled: List[float]
    t_raw: List[float]
    values: List[float]


class SpotResponse(BaseModel):
    curves: List[SpotCurveOut]


class StudyRunRequest(BaseModel):
    preset: Optional[str] = Field(default=None, description="name from the preset pack")
    config: Optional[Dict[str, Any]] = Field(default=None, description="inline study config")
    replications: Optional[int] = Field(default=None, ge=1, le=200)
    seed: Optional[int] = Field(default=None, ge=0)

    @model_validator(mode="after")
    def _one_source(self):
        if (self.preset is None) == (self.config is None):
            raise ValueError("give exactly one of preset or config")
        return self
