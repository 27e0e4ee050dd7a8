"""Canonical check-evaluation semantics.

Contract: a bare value means equality; thresholds must be explicit operators.
Missing or non-finite metrics fail every comparison except ``ne``.
"""

import math
import os
import sys

import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..', '..')))

from src.services.conditions import check_scalar, evaluate_checks, evaluate_requirements
from src.services.errors import ConfigError


def test_bare_value_is_equality():
    assert evaluate_requirements({"median_error_decreasing": 1.0}, {"median_error_decreasing": 1.0})
    assert not evaluate_requirements({"median_error_decreasing": 0.0}, {"median_error_decreasing": 1.0})


def test_explicit_operators():
    assert evaluate_requirements({"ratio": 0.9}, {"ratio": {"gte": 0.85, "lte": 1.15}})
    assert not evaluate_requirements({"ratio": 1.2}, {"ratio": {"gte": 0.85, "lte": 1.15}})
    assert evaluate_requirements({"gap": 0.1}, {"gap": {"gt": 0.0}})
    assert not evaluate_requirements({"gap": 0.0}, {"gap": {"gt": 0.0}})
    assert evaluate_requirements({"t": 2.0}, {"t": {"lt": 3.0}})
    assert evaluate_requirements({"x": 2}, {"x": {"eq": 2}})
    assert evaluate_requirements({"x": 3}, {"x": {"ne": 2}})


def test_missing_and_non_finite_metrics_fail():
    assert not evaluate_requirements({}, {"ratio": {"lte": 1.0}})
    assert not check_scalar(math.nan, {"lt": 1.0})
    assert not check_scalar(math.inf, {"gt": 0.0})
    assert check_scalar(None, {"ne": 2})
    assert evaluate_requirements({}, {})


def test_unknown_operator():
    with pytest.raises(ConfigError):
        check_scalar(1.0, {"between": [0, 2]})


def test_evaluate_checks_names_every_check():
    metrics = {"variance_ratio": 0.95, "skewness": 0.3}
    checks = {
        "variance": {"variance_ratio": {"gte": 0.85, "lte": 1.15}},
        "skewness": {"skewness": {"gt": -0.15, "lt": 0.15}},
        "kurtosis": {"excess_kurtosis": {"gt": -0.3, "lt": 0.3}},
    }
    assert evaluate_checks(metrics, checks) == {"variance": True, "skewness": False, "kurtosis": False}
