"""Canonical check evaluation: how a study's ``checks`` are read against its metrics.

Semantics:

* bare value  -> equality:      ``{"median_error_decreasing": 1.0}``
* dict value  -> explicit ops:  ``{"variance_ratio": {"gte": 0.85, "lte": 1.15}}``

Supported operators: ``gte``, ``gt``, ``lte``, ``lt``, ``eq``, ``ne``. A missing
or non-finite metric fails every comparison except ``ne``.
"""

import math
from typing import Any, Dict

from .errors import ConfigError


def _usable(value: Any) -> bool:
    if value is None:
        return False
    if isinstance(value, float) and not math.isfinite(value):
        return False
    return True


def check_scalar(value: Any, requirement: Any) -> bool:
    """Evaluate one requirement against one metric value.

    A dict requirement is a set of comparison operators; any other value is an
    equality check.
    """
    ok = _usable(value)
    if isinstance(requirement, dict):
        for op, target in requirement.items():
            if op == 'gte' and not (ok and value >= target):
                return False
            if op == 'gt' and not (ok and value > target):
                return False
            if op == 'lte' and not (ok and value <= target):
                return False
            if op == 'lt' and not (ok and value < target):
                return False
            if op == 'eq' and not (ok and value == target):
                return False
            if op == 'ne' and not (value != target):
                return False
            if op not in ('gte', 'gt', 'lte', 'lt', 'eq', 'ne'):
                raise ConfigError(f"unknown comparison operator '{op}'")
        return True
    return ok and value == requirement


def evaluate_requirements(variables: Dict[str, Any], requirements: Dict[str, Any]) -> bool:
    """True iff every requirement is satisfied by ``variables`` (bare = equality)."""
    for key, requirement in (requirements or {}).items():
        if not check_scalar(variables.get(key), requirement):
            return False
    return True


def evaluate_checks(metrics: Dict[str, Any], checks: Dict[str, Dict[str, Any]]) -> Dict[str, bool]:
    """Pass/fail per named check; each check is a requirements dict over ``metrics``."""
    return {name: evaluate_requirements(metrics, req) for name, req in checks.items()}
