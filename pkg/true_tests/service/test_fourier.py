"""Tests for the Fourier estimator core: rescaling, coefficients, spot and integrated estimates."""

import math
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

sys.path.insert(0, str(Path(__file__).parent.parent.parent))

from src.models import TWO_PI, AlphaTable, CoeffTable, TickSeries
from src.models.schemas import ModelSpec, SamplingScheme
from src.services import fourier
from src.services.baselines import realized_variance
from src.services.errors import (
    CoeffRangeError,
    EmptySeries,
    InvalidCutoff,
    InvalidMesh,
    NumericalInconsistency,
    OutOfWindow,
    UnorderedInput,
    WindowMismatch,
)
from src.services.settings import FourierVolSettings
from src.services.simulate import sample_path, simulate_path
from src.services.weighting import TestFunction

SETTINGS = FourierVolSettings(_env_file=None)


def random_series(seed, n=40, asset="a", times=None):
    rng = np.random.default_rng(seed)
    if times is None:
        times = np.sort(rng.uniform(0.0, 1.0, n))
    prices = np.cumsum(rng.normal(0.0, 0.01, len(times)))
    return fourier.rescale_time(TickSeries(asset, times, prices), (0.0, 1.0))


def brute_coeff(series, k):
    return np.sum(np.exp(-1j * k * series.times[:-1]) * series.returns) / TWO_PI


class TestRescaleTime:
    """Mapping raw ticks onto [0, 2π]."""

    def test_mesh_is_scaled_max_gap(self):
        rng = np.random.default_rng(3)
        t = np.sort(rng.uniform(0.0, 1.0, 100))
        s = fourier.rescale_time(TickSeries("a", t, np.zeros(100)), (0.0, 1.0))
        gaps = np.diff(np.concatenate(([0.0], t, [1.0])))
        assert s.mesh == pytest.approx(TWO_PI * gaps.max(), rel=1e-12)
        assert s.times[0] == 0.0 and s.times[-1] == TWO_PI

    def test_duplicates_keep_last_price(self):
        s = fourier.rescale_time(TickSeries("a", [0.0, 0.5, 0.5, 1.0], [0.0, 1.0, 2.0, 3.0]), (0.0, 1.0))
        np.testing.assert_allclose(s.times, [0.0, math.pi, TWO_PI])
        np.testing.assert_allclose(s.log_prices, [0.0, 2.0, 3.0])
        np.testing.assert_allclose(s.returns, [2.0, 1.0])

    def test_edges_are_padded_with_flat_prices(self):
        s = fourier.rescale_time(TickSeries("a", [0.25, 0.75], [1.0, 1.5]), (0.0, 1.0))
        np.testing.assert_allclose(s.times, [0.0, 0.5 * math.pi, 1.5 * math.pi, TWO_PI])
        np.testing.assert_allclose(s.returns, [0.0, 0.5, 0.0])

    def test_to_raw_inverts_rescaling(self):
        s = fourier.rescale_time(TickSeries("a", [10.0, 20.0, 30.0], [0.0, 1.0, 2.0]), (10.0, 30.0))
        np.testing.assert_allclose(s.to_raw(s.times), [10.0, 20.0, 30.0])

    def test_errors(self):
        with pytest.raises(EmptySeries):
            fourier.rescale_time(TickSeries("a", [0.5], [1.0]), (0.0, 1.0))
        with pytest.raises(UnorderedInput):
            fourier.rescale_time(TickSeries("a", [0.5, 0.2], [1.0, 2.0]), (0.0, 1.0))
        with pytest.raises(OutOfWindow):
            fourier.rescale_time(TickSeries("a", [0.5, 1.2], [1.0, 2.0]), (0.0, 1.0))
        with pytest.raises(OutOfWindow):
            fourier.rescale_time(TickSeries("a", [0.5, 0.6], [1.0, 2.0]), (1.0, 0.0))


class TestCoefficients:
    """Return coefficients and Bohr-convolution coefficients."""

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 2 ** 32 - 1))
    def test_coeffs_match_direct_sum_and_conjugate_symmetry(self, seed):
        s = random_series(seed, n=5)
        c = fourier.return_fourier_coeffs(s, 10)
        brute = np.array([brute_coeff(s, k) for k in range(-10, 11)])
        np.testing.assert_allclose(c.coeffs, brute, rtol=1e-10, atol=1e-14)
        assert c[-3] == np.conj(c[3])

    def test_phase_refresh_keeps_high_frequencies_accurate(self):
        s = random_series(11, n=300)
        c = fourier.return_fourier_coeffs(s, 700)
        for k in (63, 64, 65, 500, 700):
            assert abs(c[k] - brute_coeff(s, k)) < 1e-12

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 2 ** 32 - 1))
    def test_alpha_matches_definition_for_negative_k(self, seed):
        s1, s2 = random_series(seed, 30, "a"), random_series(seed + 1, 25, "b")
        n, m = 6, 4
        c1, c2 = fourier.return_fourier_coeffs(s1, n + m), fourier.return_fourier_coeffs(s2, n + m)
        alpha = fourier.convolution_coeffs(c1, c2, n, m)
        for k in range(-m, m + 1):
            terms = [c1[s] * c2[k - s] for s in range(-n, n + 1)]
            direct = TWO_PI / (2 * n + 1) * sum(terms)
            assert abs(alpha[k] - direct) <= 1e-10 * sum(abs(x) for x in terms)
        np.testing.assert_allclose(alpha[-np.arange(m + 1)], np.conj(alpha[np.arange(m + 1)]))

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 2 ** 32 - 1))
    def test_asset_swap(self, seed):
        s1, s2 = random_series(seed, 30, "a"), random_series(seed + 7, 35, "b")
        n, m = 5, 3
        c1, c2 = fourier.return_fourier_coeffs(s1, n + m), fourier.return_fourier_coeffs(s2, n + m)
        forward = fourier.convolution_coeffs(c1, c2, n, m)
        swapped = fourier.convolution_coeffs(c2, c1, n, m)
        scale = TWO_PI / (2 * n + 1)
        assert forward[0] == pytest.approx(swapped[0], rel=1e-10, abs=1e-16)
        for k in range(-m, m + 1):
            terms = [c1[u] * c2[k - u] for u in range(k - n, k + n + 1)]
            substituted = scale * sum(terms)
            assert abs(swapped[k] - substituted) <= 1e-10 * sum(abs(x) for x in terms)
        sym_a = fourier.convolution_coeffs(c1, c2, n, m, symmetric=True)
        sym_b = fourier.convolution_coeffs(c2, c1, n, m, symmetric=True)
        np.testing.assert_allclose(sym_a.alphas, sym_b.alphas, rtol=1e-12, atol=1e-18)

    def test_range_errors(self):
        c = fourier.return_fourier_coeffs(random_series(1), 4)
        with pytest.raises(InvalidCutoff):
            fourier.convolution_coeffs(c, c, 2, 3)
        with pytest.raises(CoeffRangeError) as exc:
            fourier.convolution_coeffs(c, c, 3, 2)
        assert exc.value.required == 5
        with pytest.raises(InvalidCutoff):
            fourier.return_fourier_coeffs(random_series(1), -1)


class TestIntegrated:
    """Integrated volatility and co-volatility."""

    @pytest.mark.parametrize("n", [11, 101, 1001])
    def test_nyquist_cutoff_reproduces_realized_variance(self, n):
        times = np.arange(n + 1) / n
        s = random_series(n, times=times)
        n_freq = (n - 1) // 2
        value = fourier.integrated_volatility(fourier.return_fourier_coeffs(s, n_freq), n_freq)
        assert value == pytest.approx(realized_variance(s), rel=1e-10)

    @pytest.mark.parametrize("n_freq", [1, 4, 16, 64])
    def test_dirichlet_kernel_plancherel(self, n_freq):
        t = np.linspace(0.0, TWO_PI, 8192, endpoint=False)
        integral = TWO_PI * np.mean(fourier.dirichlet_kernel(n_freq, t) ** 2)
        assert integral == pytest.approx(TWO_PI / (2 * n_freq + 1), rel=1e-6)

    def test_dirichlet_kernel_at_zero(self):
        assert fourier.dirichlet_kernel(7, 0.0) == pytest.approx(1.0)
        assert fourier.dirichlet_kernel(7, TWO_PI) == pytest.approx(1.0)
        assert isinstance(fourier.dirichlet_kernel(7, 0.3), float)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 2 ** 32 - 1), st.integers(0, 12))
    def test_dirichlet_double_sum_equals_convolution(self, seed, n_freq):
        s1, s2 = random_series(seed, 30, "a"), random_series(seed + 3, 20, "b")
        conv = fourier.integrated_covolatility(s1, s2, n_freq)
        direct = fourier.integrated_covolatility(s1, s2, n_freq, method="dirichlet")
        scale = np.abs(s1.returns).sum() * np.abs(s2.returns).sum()
        assert conv == pytest.approx(direct, abs=1e-10 * scale)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 2 ** 32 - 1), st.integers(1, 10))
    def test_polarization_on_synchronous_grid(self, seed, n_freq):
        rng = np.random.default_rng(seed)
        t = np.sort(rng.uniform(0.0, 1.0, 30))
        p1 = np.cumsum(rng.normal(0.0, 0.01, 30))
        p2 = np.cumsum(rng.normal(0.0, 0.01, 30))

        def scaled(p):
            return fourier.rescale_time(TickSeries("x", t, p), (0.0, 1.0))

        def vol(s):
            return fourier.integrated_volatility(fourier.return_fourier_coeffs(s, n_freq), n_freq)

        plus, minus = vol(scaled(p1 + p2)), vol(scaled(p1 - p2))
        cross = fourier.integrated_covolatility(scaled(p1), scaled(p2), n_freq)
        assert 0.25 * (plus - minus) == pytest.approx(cross, abs=1e-10 * (plus + minus))

    @settings(max_examples=200, deadline=None)
    @given(st.integers(0, 2 ** 32 - 1), st.integers(1, 20))
    def test_integrated_estimates_are_nonnegative(self, seed, n_freq):
        c = fourier.return_fourier_coeffs(random_series(seed, 25), n_freq)
        assert fourier.integrated_volatility(c, n_freq) >= 0.0
        assert fourier.integrated_volatility_fejer(c, n_freq, SETTINGS) >= 0.0

    def test_fejer_prefactor_switch(self):
        c = fourier.return_fourier_coeffs(random_series(5), 8)
        printed = fourier.integrated_volatility_fejer(c, 8, SETTINGS)
        dirichlet = fourier.integrated_volatility_fejer(c, 8, FourierVolSettings(_env_file=None, fejer_prefactor="dirichlet"))
        assert printed * 9 == pytest.approx(dirichlet * 17, rel=1e-12)

    def test_fejer_cross_variant_on_same_series_matches_diagonal(self):
        c = fourier.return_fourier_coeffs(random_series(5), 8)
        assert fourier.integrated_volatility_fejer(c, 8, SETTINGS, c2=c) == pytest.approx(
            fourier.integrated_volatility_fejer(c, 8, SETTINGS), rel=1e-12
        )

    def test_window_mismatch(self):
        a = random_series(1)
        b = fourier.rescale_time(TickSeries("b", [0.0, 1.0, 2.0], [0.0, 0.1, 0.2]), (0.0, 2.0))
        with pytest.raises(WindowMismatch):
            fourier.integrated_covolatility(a, b, 3)


class TestSpot:
    """Fejér and positive spot reconstruction."""

    def test_fejer_reconstruction_of_flat_coefficients(self):
        s = random_series(2, 60)
        c = fourier.return_fourier_coeffs(s, 8)
        alpha = fourier.convolution_coeffs(c, c, 4, 4)
        grid = np.linspace(0.0, TWO_PI, 16, endpoint=False)
        curve = fourier.fejer_spot_reconstruct(alpha, 4, grid, SETTINGS)
        k = np.arange(-4, 5)
        expected = ((1 - np.abs(k) / 4) * alpha.window(4) * np.exp(1j * np.outer(grid, k))).sum(axis=1).real
        np.testing.assert_allclose(curve.values, expected, rtol=1e-10, atol=1e-14)
        assert curve.variant == "fejer_canonical"
        assert curve.n_freq == 4

    def test_fejer_needs_positive_cutoff(self):
        c = fourier.return_fourier_coeffs(random_series(2), 2)
        alpha = fourier.convolution_coeffs(c, c, 1, 0)
        with pytest.raises(InvalidCutoff):
            fourier.fejer_spot_reconstruct(alpha, 0, [0.0], SETTINGS)

    def test_grid_outside_window(self):
        c = fourier.return_fourier_coeffs(random_series(2), 4)
        alpha = fourier.convolution_coeffs(c, c, 2, 2)
        with pytest.raises(OutOfWindow):
            fourier.fejer_spot_reconstruct(alpha, 2, [0.0, 7.0], SETTINGS)

    def test_positive_variant_is_nonnegative_on_simulated_paths(self):
        model = ModelSpec(kind="stochastic_vol", assets=[{"kappa": 2.0, "theta": 0.1, "xi": 0.3}])
        scheme = SamplingScheme(kind="poisson", intensity=[40.0])
        grid = np.linspace(0.0, TWO_PI, 64, endpoint=False)
        for seed in range(100):
            path = simulate_path(model, TWO_PI / 1000, seed)
            ticks = sample_path(path, scheme, seed + 1000)[0]
            s = fourier.rescale_time(ticks, (0.0, TWO_PI))
            curve = fourier.positive_spot_reconstruct(fourier.return_fourier_coeffs(s, 32), 16, grid, SETTINGS)
            assert curve.values.min() >= -1e-10
            assert curve.variant == "fejer_positive"

    def test_positive_variant_needs_twice_the_cutoff(self):
        c = fourier.return_fourier_coeffs(random_series(4), 10)
        with pytest.raises(CoeffRangeError) as exc:
            fourier.positive_spot_reconstruct(c, 6, [0.0], SETTINGS)
        assert exc.value.required == 12

    def test_weighted_integral_matches_quadrature(self):
        s = random_series(8, 80)
        c = fourier.return_fourier_coeffs(s, 16)
        alpha = fourier.convolution_coeffs(c, c, 8, 8)
        weight = TestFunction()
        grid = np.linspace(0.0, TWO_PI, 4096, endpoint=False)
        curve = fourier.fejer_spot_reconstruct(alpha, 8, grid, SETTINGS)
        quadrature = TWO_PI * np.mean(weight(grid) * curve.values)
        assert fourier.weighted_spot_integral(alpha, 8, weight) == pytest.approx(quadrature, rel=1e-6)


class TestCutoffRules:
    """Cutoff selection from the mesh."""

    def test_select_cutoff(self):
        assert fourier.select_cutoff(1e-3) == 100
        assert fourier.select_cutoff(1e-3, n_obs=51) == 25
        assert fourier.select_cutoff(10.0) == 1

    def test_spot_and_nyquist_cutoffs(self):
        assert fourier.select_spot_cutoff(1e-3) == 10
        assert fourier.nyquist_cutoff(11) == 5
        assert fourier.nyquist_cutoff(2) == 1

    @pytest.mark.parametrize("mesh", [0.0, -1.0, float("nan"), float("inf")])
    def test_invalid_mesh(self, mesh):
        with pytest.raises(InvalidMesh):
            fourier.select_cutoff(mesh)


def cosine_alphas(a, b, n_freq):
    alphas = np.zeros(2 * n_freq + 1, dtype=np.complex128)
    alphas[n_freq] = a
    alphas[n_freq - 1] = alphas[n_freq + 1] = b / 2
    return AlphaTable(max_k=n_freq, cutoff_n_freq=n_freq, alphas=alphas)


class TestWorkedExamples:
    """Closed-form cases of the estimator core."""

    @pytest.mark.parametrize("n_freq", [2, 8, 32])
    def test_fejer_mean_of_a_cosine_curve(self, n_freq):
        a, b = 0.1, 0.05
        grid = np.linspace(0.0, TWO_PI, 101)
        curve = fourier.fejer_spot_reconstruct(cosine_alphas(a, b, n_freq), n_freq, grid, SETTINGS)
        np.testing.assert_allclose(curve.values, a + (1 - 1 / n_freq) * b * np.cos(grid), atol=1e-14)
        assert np.max(np.abs(curve.values - (a + b * np.cos(grid)))) <= abs(b) * 4 / n_freq

    def test_constant_alpha_gives_flat_curve(self):
        grid = np.linspace(0.0, TWO_PI, 33)
        curve = fourier.fejer_spot_reconstruct(cosine_alphas(0.2, 0.0, 5), 5, grid, SETTINGS)
        np.testing.assert_allclose(curve.values, 0.2, atol=1e-15)

    def test_reversed_grid_gives_reversed_values(self):
        c = fourier.return_fourier_coeffs(random_series(12, 50), 6)
        alpha = fourier.convolution_coeffs(c, c, 6, 6)
        grid = np.sort(np.random.default_rng(12).uniform(0.0, TWO_PI, 40))
        forward = fourier.fejer_spot_reconstruct(alpha, 6, grid, SETTINGS).values
        backward = fourier.fejer_spot_reconstruct(alpha, 6, grid[::-1], SETTINGS).values
        np.testing.assert_allclose(backward, forward[::-1], rtol=1e-12, atol=1e-15)

    def test_asymmetric_alpha_table_is_rejected(self):
        alphas = np.zeros(5, dtype=np.complex128)
        alphas[3] = 1.0
        table = AlphaTable(max_k=2, cutoff_n_freq=2, alphas=alphas)
        with pytest.raises(NumericalInconsistency):
            fourier.fejer_spot_reconstruct(table, 2, [0.0, math.pi / 2], SETTINGS)

    def test_non_finite_price_is_rejected(self):
        s = fourier.rescale_time(TickSeries("a", [0.0, 0.5, 1.0], [0.0, float("nan"), 1.0]), (0.0, 1.0))
        with pytest.raises(NumericalInconsistency):
            fourier.return_fourier_coeffs(s, 3, SETTINGS)

    def test_zero_coefficient_telescopes(self):
        s = random_series(21, 70)
        c = fourier.return_fourier_coeffs(s, 4, SETTINGS)
        assert c[0].real == pytest.approx((s.log_prices[-1] - s.log_prices[0]) / TWO_PI, rel=1e-12)
        assert abs(c[0].imag) < 1e-15

    def test_single_return_at_origin_is_flat_in_frequency(self):
        s = fourier.rescale_time(TickSeries("a", [0.0, 1.0], [0.0, 0.3]), (0.0, 1.0))
        c = fourier.return_fourier_coeffs(s, 5, SETTINGS)
        np.testing.assert_allclose(c.coeffs, 0.3 / TWO_PI, atol=1e-15)

    def test_dirichlet_kernel_at_pi(self):
        assert fourier.dirichlet_kernel(1, math.pi) == pytest.approx(-1.0 / 3.0)

    def test_select_cutoff_examples(self):
        assert fourier.select_cutoff(TWO_PI / 1000) == 29
        assert fourier.select_cutoff(1.0) == 1

    def test_zero_cutoff_is_squared_net_change(self):
        s = random_series(30, 40)
        c = fourier.return_fourier_coeffs(s, 0, SETTINGS)
        net = s.log_prices[-1] - s.log_prices[0]
        assert fourier.integrated_volatility(c, 0) == pytest.approx(net ** 2, rel=1e-10)
        with pytest.raises(InvalidCutoff):
            fourier.integrated_volatility_fejer(c, 0, SETTINGS)

    @pytest.mark.parametrize("n_freq", [0, 3, 12])
    def test_integrated_volatility_is_the_zero_alpha(self, n_freq):
        c = fourier.return_fourier_coeffs(random_series(31, 60), n_freq, SETTINGS)
        alpha = fourier.convolution_coeffs(c, c, n_freq, 0)
        assert fourier.integrated_volatility(c, n_freq) == pytest.approx(TWO_PI * alpha[0].real, rel=1e-12)

    def test_fejer_estimate_with_only_the_mean_coefficient(self):
        n_freq, c0 = 6, 0.02 + 0.0j
        coeffs = np.zeros(2 * n_freq + 1, dtype=np.complex128)
        coeffs[n_freq] = c0
        table = CoeffTable(max_k=n_freq, coeffs=coeffs)
        expected = TWO_PI ** 2 / (n_freq + 1) * abs(c0) ** 2
        assert fourier.integrated_volatility_fejer(table, n_freq, SETTINGS) == pytest.approx(expected, rel=1e-12)

    def test_positive_variant_on_degenerate_returns(self):
        grid = np.linspace(0.0, TWO_PI, 50)
        flat = fourier.rescale_time(TickSeries("a", [0.0, 0.4, 1.0], [0.1, 0.1, 0.1]), (0.0, 1.0))
        curve = fourier.positive_spot_reconstruct(fourier.return_fourier_coeffs(flat, 8, SETTINGS), 4, grid, SETTINGS)
        np.testing.assert_array_equal(curve.values, 0.0)
        single = fourier.rescale_time(TickSeries("a", [0.0, 0.4, 1.0], [0.0, 0.0, 0.5]), (0.0, 1.0))
        curve = fourier.positive_spot_reconstruct(fourier.return_fourier_coeffs(single, 8, SETTINGS), 4, grid, SETTINGS)
        assert curve.values.min() >= -1e-12

    def test_covolatility_of_a_series_with_itself(self):
        s = random_series(33, 50)
        c = fourier.return_fourier_coeffs(s, 7, SETTINGS)
        assert fourier.integrated_covolatility(s, s, 7) == pytest.approx(fourier.integrated_volatility(c, 7), rel=1e-12)
