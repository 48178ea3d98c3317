"""Gap detection on raw depths, gap census statistics and histogram data."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptyStatisticsError, OrderingError, ParameterError
from .ingest import Dataset, WellLog
from .stats import describe

DEFAULT_THRESHOLD = 0.2
NOMINAL_STEP = 0.1
# Depth differences are compared with this slack so that float noise in
# e.g. 10.5 - 10.2 does not turn a 0.3 m step into a gap at threshold 0.3.
DEPTH_TOLERANCE = 1e-6


@dataclass(frozen=True)
class Gap:
    well_id: str
    depth_before: float
    depth_after: float

    @property
    def length(self) -> float:
        return self.depth_after - self.depth_before

    @property
    def approx_points(self) -> int:
        return int(round(self.length / NOMINAL_STEP))


@dataclass(frozen=True)
class GapStats:
    count: int
    mean: float
    std: float
    min: float
    q25: float
    q50: float
    q75: float
    max: float

    def to_text(self) -> str:
        rows = [
            ("count", self.count),
            ("mean", self.mean),
            ("std", self.std),
            ("min", self.min),
            ("25%", self.q25),
            ("50%", self.q50),
            ("75%", self.q75),
            ("max", self.max),
        ]
        return "".join(f"{k}={v!r}\n" for k, v in rows)


@dataclass(frozen=True)
class HistogramBins:
    scale: str
    bin_edges: tuple[float, ...]
    counts: tuple[int, ...]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["bin_left", "bin_right", "count"])
        for lo, hi, c in zip(self.bin_edges, self.bin_edges[1:], self.counts):
            w.writerow([repr(lo), repr(hi), c])
        return buf.getvalue()


def detect_gaps(well: WellLog, threshold: float = DEFAULT_THRESHOLD) -> list[Gap]:
    """Every consecutive pair of raw depths further apart than *threshold*."""
    d = np.asarray(well.raw_depths, dtype=float)
    steps = np.diff(d)
    if np.any(steps <= 0):
        raise OrderingError(f"raw depths of well {well.well_id!r} are not strictly increasing")
    idx = np.flatnonzero(steps - threshold > DEPTH_TOLERANCE)
    return [Gap(well.well_id, float(d[i]), float(d[i + 1])) for i in idx]


def detect_all(dataset: Dataset | Iterable[WellLog], threshold: float = DEFAULT_THRESHOLD) -> list[Gap]:
    gaps = []
    for well in dataset:
        gaps.extend(detect_gaps(well, threshold))
    return gaps


def summarize_gaps(gaps: Sequence[Gap]) -> GapStats:
    if len(gaps) == 0:
        raise EmptyStatisticsError("no gaps to summarize")
    s = describe([g.length for g in gaps])
    return GapStats(s.count, s.mean, s.std, s.min, s.q25, s.q50, s.q75, s.max)


def gap_histogram(
    gaps: Sequence[Gap],
    scale: str = "log10",
    bin_count: int = 20,
    zoom: bool = False,
    domain: tuple[float, float] | None = None,
) -> HistogramBins:
    """Bin gap lengths.

    ``log10`` bins are uniform in log10(length) over [min, max]. ``linear``
    bins cover [min, max], or [min, q75] with ``zoom=True``; an explicit
    *domain* overrides both. Bins are half-open except the last, which is
    closed; lengths outside the domain are not counted.
    """
    if bin_count < 1:
        raise ParameterError("bin_count must be >= 1")
    if scale not in ("linear", "log10"):
        raise ParameterError(f"unknown histogram scale {scale!r}")
    if len(gaps) == 0:
        raise EmptyStatisticsError("no gaps to histogram")
    lengths = np.array([g.length for g in gaps], dtype=float)
    if domain is None:
        lo = float(lengths.min())
        hi = summarize_gaps(gaps).q75 if zoom else float(lengths.max())
    else:
        lo, hi = map(float, domain)
    if hi < lo or (scale == "log10" and lo <= 0):
        raise ParameterError(f"invalid histogram domain [{lo}, {hi}]")
    if hi == lo:
        # all lengths equal: one unit-wide bin centred on the value
        lo, hi = lo - 0.5 * NOMINAL_STEP, hi + 0.5 * NOMINAL_STEP
        if scale == "log10":
            lo = max(lo, hi / 10)

    if scale == "log10":
        edges = 10.0 ** np.linspace(math.log10(lo), math.log10(hi), bin_count + 1)
    else:
        edges = np.linspace(lo, hi, bin_count + 1)
    edges[0], edges[-1] = lo, hi

    inside = (lengths >= lo) & (lengths <= hi)
    which = np.searchsorted(edges, lengths[inside], side="right") - 1
    which = np.minimum(which, bin_count - 1)
    counts = np.bincount(which, minlength=bin_count)
    return HistogramBins(scale, tuple(float(e) for e in edges), tuple(int(c) for c in counts))


def gaps_to_csv(gaps: Sequence[Gap]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["well", "depth_before", "depth_after", "length_m", "approx_points"])
    for g in gaps:
        w.writerow([g.well_id, repr(g.depth_before), repr(g.depth_after), repr(g.length), g.approx_points])
    return buf.getvalue()
