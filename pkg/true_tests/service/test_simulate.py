"""Tests for path simulation, observation sampling, noise and the H_n statistic."""

import math
import sys
from pathlib import Path

import numpy as np
import pytest
from pydantic import ValidationError

sys.path.insert(0, str(Path(__file__).parent.parent.parent))

from src.models import TWO_PI, TickSeries
from src.models.schemas import ModelSpec, NoiseSpec, SamplingScheme, WeightSpec
from src.services.errors import ModelError, ResampleError
from src.services.simulate import add_noise, h_n_statistic, sample_path, simulate_path
from src.services.weighting import TestFunction

CONSTANT = ModelSpec(kind="constant_vol", assets=[{"sigma": 0.3}, {"sigma": 0.2}], correlation=0.5)
DETERMINISTIC = ModelSpec(kind="deterministic_vol", assets=[{"a": 0.1, "b": 0.05}])


class TestSimulatePath:
    """Fine-grid paths and their ground truth."""

    def test_same_seed_same_path(self):
        a = simulate_path(CONSTANT, TWO_PI / 1000, 42)
        b = simulate_path(CONSTANT, TWO_PI / 1000, 42)
        np.testing.assert_array_equal(a.log_prices, b.log_prices)
        assert not np.array_equal(a.log_prices, simulate_path(CONSTANT, TWO_PI / 1000, 43).log_prices)

    def test_constant_truth(self):
        path = simulate_path(CONSTANT, TWO_PI / 1000, 1)
        assert path.log_prices.shape == (2, 1001)
        assert path.integrated(0, 0) == pytest.approx(0.09 * TWO_PI, rel=1e-12)
        assert path.integrated(0, 1) == pytest.approx(0.5 * 0.3 * 0.2 * TWO_PI, rel=1e-12)
        assert path.spot(1, 1, 1.234) == pytest.approx(0.04)

    def test_deterministic_truth(self):
        path = simulate_path(DETERMINISTIC, TWO_PI / 2000, 1)
        assert path.integrated(0, 0) == pytest.approx(0.1 * TWO_PI, rel=1e-9)
        assert path.spot(0, 0, 0.0) == pytest.approx(0.15)
        assert path.spot(0, 0, math.pi) == pytest.approx(0.05, rel=1e-6)

    def test_stochastic_variance_stays_nonnegative(self):
        model = ModelSpec(kind="stochastic_vol", assets=[{"kappa": 1.0, "theta": 0.05, "xi": 0.3, "leverage": -0.7}])
        path = simulate_path(model, TWO_PI / 2000, 3)
        assert path.spot_cov.min() >= 0.0
        assert path.spot_cov[0, 0, 0] == pytest.approx(0.05)

    def test_step_too_large(self):
        with pytest.raises(ModelError):
            simulate_path(CONSTANT, 0.1, 1)

    def test_invalid_model_dict(self):
        with pytest.raises(ModelError):
            simulate_path({"kind": "deterministic_vol", "assets": [{"a": 0.01, "b": 0.05}]}, TWO_PI / 1000, 1)

    def test_feller_condition(self):
        with pytest.raises(ValidationError):
            ModelSpec(kind="stochastic_vol", assets=[{"kappa": 0.5, "theta": 0.01, "xi": 1.0}])


class TestSampling:
    """Observation schemes and noise."""

    def test_even_sampling_reads_the_fine_path(self):
        path = simulate_path(CONSTANT, TWO_PI / 1000, 5)
        ticks = sample_path(path, SamplingScheme(kind="even", n=100), 9)
        assert [t.asset_id for t in ticks] == ["asset1", "asset2"]
        np.testing.assert_allclose(ticks[0].times, TWO_PI * np.arange(101) / 100)
        np.testing.assert_array_equal(ticks[0].log_prices, path.log_prices[0, ::10])

    def test_jitter_stays_within_bounds(self):
        path = simulate_path(DETERMINISTIC, TWO_PI / 1000, 5)
        t = sample_path(path, SamplingScheme(kind="jittered", n=50), 2)[0].times
        nominal = TWO_PI * np.arange(51) / 50
        assert np.all(np.abs(t - nominal) <= 0.4 * TWO_PI / 50 + 1e-12)
        assert np.all(np.diff(t) > 0)

    def test_poisson_times(self):
        path = simulate_path(CONSTANT, TWO_PI / 1000, 5)
        scheme = SamplingScheme(kind="poisson", intensity=[30.0, 10.0])
        ticks = sample_path(path, scheme, 4)
        for t in ticks:
            assert t.times[0] == 0.0 and t.times[-1] == TWO_PI
            assert np.all(np.diff(t.times) > 0)
        alone = sample_path(path, scheme, 4, assets=[1])[0]
        np.testing.assert_array_equal(alone.times, ticks[1].times)

    def test_poisson_too_sparse(self):
        path = simulate_path(DETERMINISTIC, TWO_PI / 1000, 5)
        with pytest.raises(ResampleError):
            sample_path(path, SamplingScheme(kind="poisson", intensity=1e-4), 1)

    def test_noise(self):
        path = simulate_path(DETERMINISTIC, TWO_PI / 1000, 5)
        ticks = sample_path(path, SamplingScheme(kind="even", n=200), 1)[0]
        assert add_noise(ticks, NoiseSpec(), 3) is ticks
        noisy = add_noise(ticks, NoiseSpec(kind="iid_gaussian", std=0.01), 3)
        again = add_noise(ticks, {"kind": "iid_gaussian", "std": 0.01}, 3)
        np.testing.assert_array_equal(noisy.log_prices, again.log_prices)
        assert 0.005 < np.std(noisy.log_prices - ticks.log_prices) < 0.015

    def test_nominal_mesh(self):
        assert SamplingScheme(kind="even", n=100).nominal_mesh() == pytest.approx(TWO_PI / 100)
        poisson = SamplingScheme(kind="poisson", intensity=50.0)
        assert poisson.expected_count() == pytest.approx(50 * TWO_PI)
        assert poisson.with_count(1000).intensity_for(0) == pytest.approx(1000 / TWO_PI)

    def test_schemas_share_the_window_length(self):
        from src.models import schemas

        assert schemas.TWO_PI is TWO_PI


class TestHnStatistic:
    """Normalized quadratic variation of observation times."""

    def test_even_grid_is_the_identity(self):
        t = TWO_PI * np.arange(101) / 100
        t[-1] = TWO_PI
        assert h_n_statistic(t) == pytest.approx(TWO_PI, rel=1e-12)
        assert h_n_statistic(t, t=math.pi + 0.01) == pytest.approx(math.pi, rel=1e-12)
        np.testing.assert_allclose(h_n_statistic(t, t=np.array([0.0, TWO_PI])), [0.0, TWO_PI], atol=1e-12)

    def test_bivariate_on_identical_grids(self):
        t = TWO_PI * np.arange(51) / 50
        t[-1] = TWO_PI
        assert h_n_statistic(t, t) == pytest.approx(TWO_PI, rel=1e-12)

    def test_uneven_grid_exceeds_even(self):
        rng = np.random.default_rng(0)
        t = np.concatenate(([0.0], np.sort(rng.uniform(0, TWO_PI, 99)), [TWO_PI]))
        assert h_n_statistic(t) > TWO_PI


class TestWeighting:
    """Bump test function and its Fourier coefficients."""

    def test_support_and_peak(self):
        h = TestFunction(scale=2.0)
        assert h(math.pi) == pytest.approx(2.0 * math.exp(-1.0))
        assert h(0.1) == 0.0 and h(TWO_PI - 0.1) == 0.0

    def test_coefficients(self):
        h = TestFunction()
        c = h.coefficients(8)
        np.testing.assert_allclose(c[::-1], np.conj(c), atol=1e-14)
        grid = np.linspace(0.0, TWO_PI, 8192, endpoint=False)
        assert c[8].real == pytest.approx(np.mean(h(grid)), rel=1e-8)

    def test_smoothed_approaches_function(self):
        h = TestFunction()
        t = np.linspace(0.0, TWO_PI, 200)
        assert np.max(np.abs(h.smoothed(128, t) - h(t))) < 0.05

    def test_from_spec(self):
        h = TestFunction.from_spec({"center": 3.0, "half_width": 1.0, "max_k": 64})
        assert (h.center, h.half_width, h.max_k) == (3.0, 1.0, 64)
        with pytest.raises(ValidationError):
            WeightSpec(center=1.0, half_width=2.0)


class TestSimulationMoments:
    """Distributional checks on paths, arrivals and noise."""

    def test_spot_covariance_obeys_cauchy_schwarz(self):
        model = ModelSpec(
            kind="stochastic_vol",
            assets=[{"kappa": 2.0, "theta": 0.1, "xi": 0.4}, {"kappa": 1.0, "theta": 0.05, "xi": 0.2, "leverage": -0.5}],
            correlation=-0.6,
        )
        path = simulate_path(model, TWO_PI / 1000, 11)
        cov = path.spot_cov
        assert np.all(cov[0, 1] ** 2 <= cov[0, 0] * cov[1, 1] * (1 + 1e-12))
        np.testing.assert_array_equal(cov[0, 1], cov[1, 0])

    def test_perfect_correlation_with_equal_sigma(self):
        model = ModelSpec(kind="constant_vol", assets=[{"sigma": 0.3}, {"sigma": 0.3}], correlation=1.0)
        path = simulate_path(model, TWO_PI / 1000, 2)
        np.testing.assert_array_equal(path.spot_cov[0, 1], path.spot_cov[0, 0])
        np.testing.assert_array_equal(path.log_prices[0], path.log_prices[1])

    def test_poisson_arrival_count(self):
        lam = 5.0
        path = simulate_path(DETERMINISTIC, TWO_PI / 1000, 1)
        scheme = SamplingScheme(kind="poisson", intensity=lam)
        # the window edges are always added, so only interior arrivals are counted
        counts = np.array([len(sample_path(path, scheme, seed)[0]) - 2 for seed in range(2000)], dtype=float)
        se = counts.std(ddof=1) / math.sqrt(counts.shape[0])
        assert abs(counts.mean() - lam * TWO_PI) <= 3.0 * se

    def test_constant_vol_second_moment(self):
        sigma = 0.3
        model = ModelSpec(kind="constant_vol", assets=[{"sigma": sigma}])
        moves = np.array([simulate_path(model, TWO_PI / 1000, seed).log_prices[0, -1] for seed in range(2000)])
        squared = moves ** 2
        se = squared.std(ddof=1) / math.sqrt(squared.shape[0])
        assert abs(squared.mean() - sigma ** 2 * TWO_PI) <= 3.0 * se

    def test_noise_variance(self):
        eta, n = 0.01, 10_000
        series = TickSeries("a", np.linspace(0.0, TWO_PI, n), np.zeros(n))
        noisy = add_noise(series, NoiseSpec(kind="iid_gaussian", std=eta), 17)
        np.testing.assert_array_equal(noisy.times, series.times)
        assert eta ** 2 * 0.9 <= np.var(noisy.log_prices, ddof=1) <= eta ** 2 * 1.1

    def test_h_n_is_nondecreasing(self):
        rng = np.random.default_rng(5)
        a = np.concatenate(([0.0], np.sort(rng.uniform(0, TWO_PI, 60)), [TWO_PI]))
        b = np.concatenate(([0.0], np.sort(rng.uniform(0, TWO_PI, 40)), [TWO_PI]))
        t = np.linspace(0.0, TWO_PI, 300)
        assert np.all(np.diff(h_n_statistic(a, t=t)) >= 0.0)
        assert np.all(np.diff(h_n_statistic(a, b, t=t)) >= 0.0)
