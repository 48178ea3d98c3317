"""Order statistics shared by the gap census and the benchmark summary.

Quantiles interpolate linearly between the closest ranks: for sorted
values ``x[0..n-1]`` the q-quantile sits at fractional rank ``h = (n-1)q``
and is ``x[floor(h)] + (h - floor(h)) * (x[floor(h)+1] - x[floor(h)])``.
The standard deviation uses the n-1 divisor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import EmptyStatisticsError, ParameterError


def quantile(sorted_values: Sequence[float], q: float) -> float:
    if not 0.0 <= q <= 1.0:
        raise ParameterError(f"quantile level {q} outside [0, 1]")
    n = len(sorted_values)
    if n == 0:
        raise EmptyStatisticsError("quantile of an empty sequence")
    h = (n - 1) * q
    lo = math.floor(h)
    frac = h - lo
    if frac == 0.0 or lo + 1 >= n:
        return float(sorted_values[lo])
    a, b = float(sorted_values[lo]), float(sorted_values[lo + 1])
    return a + frac * (b - a)


@dataclass(frozen=True)
class Summary:
    count: int
    mean: float
    std: float
    min: float
    q25: float
    q50: float
    q75: float
    max: float


def describe(values: Sequence[float]) -> Summary:
    """count/mean/std/min/quartiles/max of *values*; order of input is irrelevant."""
    x = np.sort(np.asarray(values, dtype=float))
    n = x.shape[0]
    if n == 0:
        raise EmptyStatisticsError("cannot summarize an empty sequence")
    std = float(np.std(x, ddof=1)) if n > 1 else 0.0
    return Summary(
        count=n,
        mean=float(np.mean(x)),
        std=std,
        min=float(x[0]),
        q25=quantile(x, 0.25),
        q50=quantile(x, 0.50),
        q75=quantile(x, 0.75),
        max=float(x[-1]),
    )
