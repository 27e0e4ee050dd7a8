"""Full-size Monte Carlo acceptance runs of the bundled presets.

Each run takes minutes; the root conftest marks this module ``slow`` so the
default suite skips it. Run with ``pytest -m slow``.
"""

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent.parent))

from src.services.experiments import run_study
from src.services.presets import get_preset, run_preset


def failed_checks(report):
    return sorted(name for name in report.checks if not report.flags.get(name, False))


class TestAcceptance:
    """Preset studies must pass every check they declare."""

    def test_consistency_deterministic(self):
        report = run_preset("consistency_deterministic")
        assert failed_checks(report) == []
        assert report.metrics["median_error_decreasing"] == 1.0
        assert report.metrics["final_relative_error"] < 0.25

    def test_consistency_constant(self):
        assert failed_checks(run_preset("consistency_constant")) == []

    def test_clt_univariate(self):
        report = run_preset("clt_univariate")
        assert failed_checks(report) == []
        assert 0.85 <= report.metrics["variance_ratio"] <= 1.15

    def test_clt_bivariate_reports_both_variances(self):
        report = run_preset("clt_bivariate")
        assert "var_theory_fd" in report.metrics
        assert "variance_ratio" in report.metrics

    def test_mse_rate(self):
        report = run_preset("mse_rate")
        assert failed_checks(report) == []
        assert 0.5 <= report.metrics["rate_slope"] <= 0.9

    def test_mse_noise(self):
        report = run_preset("mse_noise")
        assert failed_checks(report) == []
        assert report.metrics["argmin_interior:n=10000;eta=0.005"] == 1.0

    def test_epps(self):
        report = run_preset("epps")
        assert failed_checks(report) == []
        assert report.metrics["epps_gap"] > 0

    @pytest.mark.parametrize("preset", ["consistency_deterministic", "mse_rate", "epps"])
    def test_thread_cap_does_not_change_records(self, preset):
        config = get_preset(preset)
        config["replications"] = 40
        one = run_study({**config, "threads": 1})
        many = run_study({**config, "threads": 4})
        assert [r.model_dump() for r in one.records] == [r.model_dump() for r in many.records]
