"""Summary statistics of replication records, shared by studies and report loading."""

import math
from typing import Dict, Iterable, List, Optional

import numpy as np
from scipy import stats

from ..models.schemas import CellSummary, ReplicationRecord


def _finite(x) -> Optional[float]:
    x = float(x)
    return x if math.isfinite(x) else None


def summarize_cell(records: List[ReplicationRecord]) -> CellSummary:
    est = np.array([r.estimate for r in records], dtype=np.float64)
    truth = np.array([r.truth for r in records], dtype=np.float64)
    err = np.array([r.error for r in records], dtype=np.float64)
    diff = est - truth
    count = est.shape[0]

    std_error = variance = skew = kurt = None
    if count > 1:
        std_error = _finite(np.std(diff, ddof=1) / math.sqrt(count))
        variance = _finite(np.var(est, ddof=1))
    if count > 2 and np.ptp(err) > 0:
        skew = _finite(stats.skew(err))
        kurt = _finite(stats.kurtosis(err, fisher=True))

    q05, q50, q95 = np.quantile(err, [0.05, 0.5, 0.95])
    return CellSummary(
        count=count,
        mean_estimate=float(np.mean(est)),
        mean_truth=float(np.mean(truth)),
        bias=float(np.mean(diff)),
        std_error=std_error,
        variance=variance,
        mse=float(np.mean(diff * diff)),
        mean_error=float(np.mean(err)),
        median_error=float(q50),
        q05_error=float(q05),
        q95_error=float(q95),
        skewness=skew,
        excess_kurtosis=kurt,
    )


def summarize(records: Iterable[ReplicationRecord]) -> Dict[str, CellSummary]:
    """One summary per cell, cells in order of first appearance."""
    groups: Dict[str, List[ReplicationRecord]] = {}
    for r in records:
        groups.setdefault(r.cell, []).append(r)
    return {cell: summarize_cell(rows) for cell, rows in groups.items()}


def summaries_match(a: Dict[str, CellSummary], b: Dict[str, CellSummary], rel_tol: float = 1e-12) -> bool:
    if list(a) != list(b):
        return False
    for cell in a:
        left, right = a[cell].model_dump(), b[cell].model_dump()
        for key, x in left.items():
            y = right[key]
            if x is None or y is None:
                if x is not y:
                    return False
            elif not math.isclose(x, y, rel_tol=rel_tol, abs_tol=1e-300):
                return False
    return True
