"""Synthetic-gap protocol: pick a gapless well, mask seeded gaps, split.

Gap sizes are counted in records (points). Each trial draws its start
index from its own generator seeded by ``(plan.seed, gap_size, trial_id)``,
so any trial can be regenerated in isolation and trials of one size may
overlap each other.
"""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateFeaturesError,
    FormatError,
    IneligibleWellError,
    NoCandidateError,
    ParameterError,
)
from .gaps import DEFAULT_THRESHOLD, detect_gaps
from .ingest import CURVES, Dataset, WellLog

log = logging.getLogger(__name__)

DEFAULT_SIZES = (16, 66, 168)
DEFAULT_TRIALS = 30
DEFAULT_FEATURES = ("depth", "rhob", "dt", "gr")


def _csv_list(value) -> tuple[str, ...]:
    if isinstance(value, str):
        return tuple(v.strip() for v in value.split(",") if v.strip())
    return tuple(value)


@dataclass(frozen=True)
class BenchPlan:
    well_id: str | None = None
    gap_sizes: tuple[int, ...] = DEFAULT_SIZES
    trials_per_size: int = DEFAULT_TRIALS
    target_curve: str = "nphi"
    feature_curves: tuple[str, ...] = DEFAULT_FEATURES
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "gap_sizes", tuple(int(s) for s in _csv_list(self.gap_sizes)))
        object.__setattr__(self, "feature_curves", tuple(c.lower() for c in _csv_list(self.feature_curves)))
        object.__setattr__(self, "target_curve", self.target_curve.lower())
        if not self.gap_sizes:
            raise ParameterError("at least one gap size is required")
        if any(s < 1 for s in self.gap_sizes):
            raise ParameterError("gap sizes must be >= 1")
        if self.trials_per_size < 1:
            raise ParameterError("trials_per_size must be >= 1")
        if not 0 <= int(self.seed) < 2**64:
            raise ParameterError("seed must be an unsigned 64-bit integer")
        for c in self.feature_curves + (self.target_curve,):
            if c not in CURVES:
                raise ParameterError(f"unknown curve {c!r}")
        if self.target_curve in self.feature_curves:
            raise ParameterError("the target curve cannot also be a feature")

    def validate_for(self, n_records: int):
        too_big = [s for s in self.gap_sizes if s >= n_records]
        if too_big:
            raise ParameterError(f"gap sizes {too_big} must be smaller than the well length {n_records}")

    def to_text(self) -> str:
        return (
            f"well={self.well_id or ''}\n"
            f"sizes={','.join(map(str, self.gap_sizes))}\n"
            f"trials={self.trials_per_size}\n"
            f"seed={self.seed}\n"
            f"target={self.target_curve}\n"
            f"features={','.join(self.feature_curves)}\n"
        )

    @classmethod
    def from_mapping(cls, values: dict) -> "BenchPlan":
        kwargs = {}
        if values.get("well"):
            kwargs["well_id"] = values["well"]
        if "sizes" in values:
            kwargs["gap_sizes"] = values["sizes"]
        if "trials" in values:
            kwargs["trials_per_size"] = int(values["trials"])
        if "seed" in values:
            kwargs["seed"] = int(values["seed"])
        if "target" in values:
            kwargs["target_curve"] = values["target"]
        if "features" in values:
            kwargs["feature_curves"] = values["features"]
        return cls(**kwargs)

    @classmethod
    def from_text(cls, text: str) -> "BenchPlan":
        values = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise FormatError(f"bad plan line: {line!r}")
            values[key.strip()] = value.strip()
        return cls.from_mapping(values)


@dataclass(frozen=True, eq=False)
class GapTrial:
    trial_id: int
    gap_size: int
    start_index: int
    seed: int
    truth: np.ndarray = field(repr=False)

    @property
    def masked_indices(self) -> range:
        return range(self.start_index, self.start_index + self.gap_size)

    def __eq__(self, other):
        if not isinstance(other, GapTrial):
            return NotImplemented
        return (self.trial_id, self.gap_size, self.start_index, self.seed) == (
            other.trial_id, other.gap_size, other.start_index, other.seed
        ) and np.array_equal(self.truth, other.truth)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class TrainTestSplit:
    train_index: np.ndarray
    test_index: np.ndarray
    train_features: np.ndarray
    train_targets: np.ndarray
    test_features: np.ndarray
    test_truth: np.ndarray
    feature_names: tuple[str, ...]
    dropped_features: tuple[str, ...] = ()


def select_complete_well(dataset: Dataset, well_id: str | None = None,
                         threshold: float = DEFAULT_THRESHOLD) -> WellLog:
    """The configured well if it is gapless, else the longest gapless well."""
    if len(dataset) == 0:
        raise NoCandidateError("dataset is empty")
    if well_id:
        well = dataset.well(well_id)
        gaps = detect_gaps(well, threshold)
        if gaps:
            raise IneligibleWellError(f"well {well_id!r} has {len(gaps)} gap(s)")
        return well
    candidates = [w for w in dataset if not detect_gaps(w, threshold)]
    if not candidates:
        raise NoCandidateError("no gapless well in dataset")
    return min(candidates, key=lambda w: (-len(w), w.well_id))


def trial_seed(plan_seed: int, gap_size: int, trial_id: int) -> int:
    ss = np.random.SeedSequence([int(plan_seed), int(gap_size), int(trial_id)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def make_trial(well: WellLog, plan: BenchPlan, gap_size: int, trial_id: int) -> GapTrial:
    n = len(well)
    if gap_size >= n:
        raise ParameterError(f"gap size {gap_size} must be smaller than the well length {n}")
    seed = trial_seed(plan.seed, gap_size, trial_id)
    start = int(np.random.default_rng(seed).integers(0, n - gap_size + 1))
    truth = well.curve(plan.target_curve)[start : start + gap_size].copy()
    return GapTrial(trial_id, gap_size, start, seed, truth)


def generate_trials(well: WellLog, plan: BenchPlan) -> list[GapTrial]:
    plan.validate_for(len(well))
    return [
        make_trial(well, plan, size, t)
        for size in plan.gap_sizes
        for t in range(plan.trials_per_size)
    ]


def trials_to_csv(trials) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["trial_id", "gap_size", "start_index", "seed"])
    for t in trials:
        w.writerow([t.trial_id, t.gap_size, t.start_index, t.seed])
    return buf.getvalue()


def feature_matrix(well: WellLog, names) -> np.ndarray:
    return np.column_stack([well.curve(c) for c in names]) if names else np.empty((len(well), 0))


def make_split(well: WellLog, trial: GapTrial, plan: BenchPlan) -> TrainTestSplit:
    """Masked rows become the test set; everything else trains.

    Feature columns that are constant over the training rows carry no
    information within one well and are dropped.
    """
    n = len(well)
    if trial.start_index < 0 or trial.start_index + trial.gap_size > n:
        raise ParameterError("trial does not fit inside the well")
    mask = np.zeros(n, dtype=bool)
    mask[trial.start_index : trial.start_index + trial.gap_size] = True
    train_index = np.flatnonzero(~mask)
    test_index = np.flatnonzero(mask)

    X = feature_matrix(well, plan.feature_curves)
    y = well.curve(plan.target_curve)
    Xtr = X[train_index]
    keep = [i for i in range(X.shape[1]) if Xtr.shape[0] and np.ptp(Xtr[:, i]) > 0]
    dropped = tuple(plan.feature_curves[i] for i in range(X.shape[1]) if i not in keep)
    if dropped:
        log.info("dropping constant feature(s) %s for well %s", ", ".join(dropped), well.well_id)
    if not keep:
        raise DegenerateFeaturesError(f"no informative features left for well {well.well_id!r}")
    return TrainTestSplit(
        train_index=train_index,
        test_index=test_index,
        train_features=np.ascontiguousarray(X[np.ix_(train_index, keep)]),
        train_targets=y[train_index].copy(),
        test_features=np.ascontiguousarray(X[np.ix_(test_index, keep)]),
        test_truth=y[test_index].copy(),
        feature_names=tuple(plan.feature_curves[i] for i in keep),
        dropped_features=dropped,
    )
