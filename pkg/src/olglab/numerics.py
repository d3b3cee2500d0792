"""Small numerical helpers: compensated summation, boundary bisection, tail fits.

Everything here is plumbing shared by the diagnostics modules.  The policy
choices that matter (log-space discount products, Kahan summation, running
extrema as liminf/limsup surrogates) live in the callers' contracts; this
module just supplies the primitives.
"""

from __future__ import annotations

import math
from typing import Callable, Iterable, Sequence

import numpy as np


class KahanAccumulator:
    """Neumaier-compensated running sum."""

    __slots__ = ("total", "_comp")

    def __init__(self) -> None:
        self.total = 0.0
        self._comp = 0.0

    def add(self, x: float) -> None:
        t = self.total + x
        if abs(self.total) >= abs(x):
            self._comp += (self.total - t) + x
        else:
            self._comp += (x - t) + self.total
        self.total = t

    @property
    def value(self) -> float:
        return self.total + self._comp


def kahan_sum(xs: Iterable[float]) -> float:
    acc = KahanAccumulator()
    for x in xs:
        acc.add(x)
    return acc.value


def bisect_boundary(
    is_low: Callable[[float], bool],
    lo: float,
    hi: float,
    *,
    tol: float = 0.0,
    max_iter: int = 200,
) -> tuple[float, float]:
    """Locate the flip point of a monotone predicate on [lo, hi].

    ``is_low(lo)`` must be True and ``is_low(hi)`` False.  Returns the final
    (lo, hi) bracket; with tol=0 it bisects until the midpoint degenerates,
    i.e. float exhaustion.
    """
    if not lo < hi:
        raise ValueError("bisect_boundary needs lo < hi")
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if is_low(mid):
            lo = mid
        else:
            hi = mid
    return lo, hi


def aitken_limit(x1: float, x2: float, x3: float) -> float:
    """Aitken delta-squared extrapolation, guarded against degenerate steps."""
    d1 = x2 - x1
    d2 = x3 - x2
    denom = d2 - d1
    if denom == 0.0 or not math.isfinite(denom):
        return x3
    est = x3 - d2 * d2 / denom
    # reject wild extrapolations (non-geometric tails)
    if not math.isfinite(est) or abs(est - x3) > 10.0 * abs(d2) + 1e-300:
        return x3
    return est


def power_law_fit(ts: Sequence[float], values: Sequence[float]) -> tuple[float, float, float]:
    """Fit values ~ c * t^(-alpha) by least squares in log-log space.

    Returns (alpha, r_squared, c).  Caller guarantees ts, values > 0.
    """
    lt = np.log(np.asarray(ts, dtype=float))
    lv = np.log(np.asarray(values, dtype=float))
    slope, intercept = np.polyfit(lt, lv, 1)
    fitted = slope * lt + intercept
    ss_res = float(np.sum((lv - fitted) ** 2))
    ss_tot = float(np.sum((lv - np.mean(lv)) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    c = math.exp(float(intercept)) if intercept < 700.0 else math.inf
    return -float(slope), r2, c


def geometric_mean_ratio(values: Sequence[float]) -> float:
    """Geometric mean of consecutive ratios over a window of positive terms.

    Equals (last/first)^(1/(k-1)); returns nan when not computable.
    """
    vals = [v for v in values if v > 0.0 and math.isfinite(v)]
    if len(vals) < 2:
        return float("nan")
    first, last = vals[0], vals[-1]
    k = len(vals) - 1
    return math.exp((math.log(last) - math.log(first)) / k)


def running_min_tail(values: Sequence[float], start: int) -> float:
    """liminf surrogate: minimum over the tail values[start:]."""
    tail = values[start:]
    return float(min(tail)) if len(tail) else float("nan")


def running_max_tail(values: Sequence[float], start: int) -> float:
    """limsup surrogate: maximum over the tail values[start:]."""
    tail = values[start:]
    return float(max(tail)) if len(tail) else float("nan")


def trend_slope(values: Sequence[float]) -> float:
    """Least-squares slope of values against their index (trend gate)."""
    ys = np.asarray(values, dtype=float)
    if ys.size < 2:
        return 0.0
    xs = np.arange(ys.size, dtype=float)
    return float(np.polyfit(xs, ys, 1)[0])
