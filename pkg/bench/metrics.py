import math
from typing import List, Optional, Sequence, Tuple

import numpy as np

from models.results import TracePoint
from utils.errors import UsageError

# absorbs round-off between energies computed along different code paths
ROUNDOFF = 1e-12


def threshold(best_known: float, tol: float = 0.01) -> float:
    if best_known == 0:
        return tol
    return best_known + tol * abs(best_known)


def evals_to_within(trace: Sequence[TracePoint], best_known: float, tol: float = 0.01) -> Optional[int]:
    """First cumulative evaluation count whose best-so-far is within tol of best_known; None if never"""
    if len(trace) == 0:
        raise UsageError("Cannot measure convergence of an empty trace")
    if not math.isfinite(best_known):
        raise UsageError(f"best_known must be finite, got {best_known}")
    limit = threshold(best_known, tol) + ROUNDOFF * max(1.0, abs(best_known))
    for evals, best in trace:
        if best <= limit:
            return int(evals)
    return None


def as_float(count: Optional[int]) -> float:
    return math.inf if count is None else float(count)


def median(values: Sequence[float]) -> float:
    if len(values) == 0:
        return math.nan
    return float(np.median(np.asarray(values, dtype=float)))


def median_iqr(values: Sequence[float]) -> Tuple[float, float]:
    """Median and interquartile range; quartiles are picked from the data so inf stays inf"""
    if len(values) == 0:
        return math.nan, math.nan
    arr = np.asarray(values, dtype=float)
    q25, q75 = np.percentile(arr, [25, 75], method="nearest")
    spread = math.inf if math.isinf(q75) else float(q75 - q25)
    return median(arr), spread


def percent_reduction(reference: float, value: float) -> float:
    """100 * (reference - value) / reference; 0 when both are zero"""
    if reference == 0:
        return 0.0 if value == 0 else -math.inf
    return 100.0 * (reference - value) / reference


def finite_or_none(value: float) -> Optional[float]:
    return value if math.isfinite(value) else None


def finite_values(values: List[Optional[float]]) -> List[float]:
    return [v for v in values if v is not None and math.isfinite(v)]
