"""Paired significance tests for per-sentence score comparisons.

The primary test is a paired two-tailed Student t-test at a strict alpha.
Its tail probability is computed from the regularized incomplete beta
function rather than a lookup table, so arbitrary degrees of freedom work.
A paired Wilcoxon signed-rank test is available as a rank-based alternative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import betainc
from scipy.stats import wilcoxon

from .errors import DegenerateDataError

DEFAULT_ALPHA = 0.001


@dataclass(frozen=True)
class TTestResult:
    """Outcome of one paired comparison.

    ``significant`` is the decision the classifier consumes: the two-tailed
    p-value beat alpha AND the mean change was an increase. ``direction`` is
    one of ``increase``, ``decrease``, ``none``.
    """

    statistic: float
    p_value: float
    df: float | None
    mean_diff: float
    alpha: float
    direction: str
    significant: bool
    method: str = "t"


def student_t_sf(t: float, df: float) -> float:
    """One-sided upper tail probability P(T > t) of Student's t.

    Uses sf(t) = I_x(df/2, 1/2) / 2 with x = df / (df + t^2) for t >= 0 and
    the reflection sf(-t) = 1 - sf(t) for t < 0.
    """
    if df <= 0:
        raise ValueError(f"degrees of freedom must be positive, got {df}")
    if math.isnan(t):
        return math.nan
    if t == 0.0:
        return 0.5
    if math.isinf(t):
        return 0.0 if t > 0 else 1.0
    x = df / (df + t * t)
    tail = 0.5 * float(betainc(df / 2.0, 0.5, x))
    return tail if t > 0 else 1.0 - tail


def _directions(mean_diff: float) -> str:
    if mean_diff > 0:
        return "increase"
    if mean_diff < 0:
        return "decrease"
    return "none"


def paired_t_test(before, after, alpha: float = DEFAULT_ALPHA) -> TTestResult:
    """Two-tailed paired t-test on matched score sequences.

    Saturated data (all differences identical) has zero variance; the test
    degenerates to p = 1 when the common difference is zero and p = 0
    otherwise, rather than dividing by zero.
    """
    before = np.asarray(before, dtype=np.float64)
    after = np.asarray(after, dtype=np.float64)
    if before.shape != after.shape or before.ndim != 1:
        raise DegenerateDataError("paired test needs two 1-D sequences of equal length")
    if before.size < 2:
        raise DegenerateDataError(f"paired test needs >= 2 pairs, got {before.size}")
    if not 0.0 < alpha < 1.0:
        raise DegenerateDataError(f"alpha {alpha} outside (0, 1)")

    diffs = after - before
    n = diffs.size
    mean = float(np.mean(diffs))
    sd = float(np.std(diffs, ddof=1))
    df = n - 1
    if sd == 0.0:
        stat = 0.0 if mean == 0.0 else math.copysign(math.inf, mean)
        p = 1.0 if mean == 0.0 else 0.0
    else:
        stat = mean / (sd / math.sqrt(n))
        p = 2.0 * student_t_sf(abs(stat), df)
    direction = _directions(mean)
    return TTestResult(statistic=stat, p_value=p, df=float(df), mean_diff=mean,
                       alpha=alpha, direction=direction,
                       significant=bool(p < alpha and direction == "increase"))


def paired_wilcoxon_test(before, after, alpha: float = DEFAULT_ALPHA) -> TTestResult:
    """Paired Wilcoxon signed-rank test, same decision rule as the t-test."""
    before = np.asarray(before, dtype=np.float64)
    after = np.asarray(after, dtype=np.float64)
    if before.shape != after.shape or before.ndim != 1:
        raise DegenerateDataError("paired test needs two 1-D sequences of equal length")
    if before.size < 2:
        raise DegenerateDataError(f"paired test needs >= 2 pairs, got {before.size}")
    if not 0.0 < alpha < 1.0:
        raise DegenerateDataError(f"alpha {alpha} outside (0, 1)")

    diffs = after - before
    mean = float(np.mean(diffs))
    if np.all(diffs == 0.0):
        stat, p = 0.0, 1.0
    else:
        res = wilcoxon(after, before, alternative="two-sided", zero_method="wilcox")
        stat, p = float(res.statistic), float(res.pvalue)
    direction = _directions(mean)
    return TTestResult(statistic=stat, p_value=p, df=None, mean_diff=mean,
                       alpha=alpha, direction=direction,
                       significant=bool(p < alpha and direction == "increase"),
                       method="wilcoxon")
