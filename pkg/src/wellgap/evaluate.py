"""Benchmark matrix: models x gap sizes x trials, scored by mean absolute error."""

from __future__ import annotations

import csv
import io
import logging
import os
import time
import zlib
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import EmptyStatisticsError, ParameterError, ShapeError, WellGapError
from .ingest import Dataset
from .regress import MODEL_NAMES, Regressor, canonical_name
from .stats import describe
from .synth import BenchPlan, GapTrial, TrainTestSplit, generate_trials, make_split, select_complete_well

log = logging.getLogger(__name__)


class LeakageError(WellGapError):
    """Training rows overlap the masked gap."""


def mae(pred, truth) -> float:
    pred = np.asarray(pred, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if pred.shape != truth.shape or pred.ndim != 1:
        raise ShapeError(f"prediction shape {pred.shape} does not match truth shape {truth.shape}")
    if pred.shape[0] == 0:
        raise ShapeError("mae needs at least one value")
    return float(np.mean(np.abs(pred - truth)))


@dataclass(frozen=True)
class EvalRecord:
    model: str
    gap_size: int
    trial_id: int
    start_index: int
    mae: float
    fit_millis: float
    predict_millis: float
    status: str = "ok"
    reason: str = ""

    @property
    def ok(self) -> bool:
        return self.status == "ok"


@dataclass(frozen=True, eq=False)
class GapPredictionTrace:
    gap_size: int
    trial_id: int
    start_index: int
    depths: np.ndarray
    truth: np.ndarray
    predictions: Mapping[str, np.ndarray]


@dataclass(frozen=True)
class SummaryRow:
    model: str
    gap_size: int
    min: float
    q25: float
    median: float
    q75: float
    max: float
    mean: float
    n: int


@dataclass
class BenchmarkResult:
    well_id: str
    plan: BenchPlan
    model_params: dict
    records: list[EvalRecord] = field(default_factory=list)
    traces: list[GapPredictionTrace] = field(default_factory=list)

    @property
    def failures(self) -> list[EvalRecord]:
        return [r for r in self.records if not r.ok]


def cell_seed(seed: int, gap_size: int, trial_id: int, model: str) -> int:
    """Per-(trial, model) seed; independent of the order models are listed in."""
    ss = np.random.SeedSequence([int(seed), int(gap_size), int(trial_id), zlib.crc32(model.encode())])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def check_leakage(split: TrainTestSplit, trial: GapTrial):
    overlap = np.intersect1d(split.train_index, np.asarray(trial.masked_indices))
    if overlap.size:
        raise LeakageError(f"training rows {overlap[:5].tolist()} fall inside the masked gap")


def _model_configs(models) -> dict[str, dict]:
    if isinstance(models, Mapping):
        items = models.items()
    else:
        items = ((m, {}) for m in models)
    configs = {}
    for name, params in items:
        key = canonical_name(name)
        configs[key] = dict(Regressor(key, **(params or {})).params)
    if not configs:
        raise ParameterError("at least one model must be enabled")
    return {m: configs[m] for m in MODEL_NAMES if m in configs}


def run_benchmark(dataset: Dataset, plan: BenchPlan, models=MODEL_NAMES,
                  seed: int | None = None) -> BenchmarkResult:
    """Fit every enabled model on every trial's training rows and score its gap.

    *models* is a sequence of names or a mapping name -> hyperparameter
    overrides. A model error in one cell is recorded as a failed record and
    the run carries on.
    """
    configs = _model_configs(models)
    seed = plan.seed if seed is None else int(seed)
    if not dataset.normalized:
        log.warning("benchmark dataset is not normalized; features are used as given")
    well = select_complete_well(dataset, plan.well_id)
    trials = generate_trials(well, plan)
    result = BenchmarkResult(well.well_id, plan, configs)
    for trial in trials:
        split = make_split(well, trial, plan)
        check_leakage(split, trial)
        preds = {}
        for name, params in configs.items():
            t0 = time.perf_counter()
            fit_ms = pred_ms = 0.0
            try:
                reg = Regressor(name, **params)
                reg.fit(split.train_features, split.train_targets,
                        seed=cell_seed(seed, trial.gap_size, trial.trial_id, name))
                t1 = time.perf_counter()
                fit_ms = (t1 - t0) * 1e3
                p = reg.predict(split.test_features)
                pred_ms = (time.perf_counter() - t1) * 1e3
                score = mae(p, split.test_truth)
            except Exception as exc:  # recorded, never fatal
                log.warning("%s failed on size %d trial %d: %s", name, trial.gap_size, trial.trial_id, exc)
                result.records.append(EvalRecord(
                    name, trial.gap_size, trial.trial_id, trial.start_index, float("nan"),
                    fit_ms, pred_ms, "failed", f"{type(exc).__name__}: {exc}"))
                preds[name] = np.full(trial.gap_size, np.nan)
                continue
            preds[name] = p
            result.records.append(EvalRecord(
                name, trial.gap_size, trial.trial_id, trial.start_index, score, fit_ms, pred_ms))
        result.traces.append(GapPredictionTrace(
            trial.gap_size, trial.trial_id, trial.start_index,
            well.raw_depths[split.test_index].copy(), split.test_truth, preds))
    return result


def summarize(records: Sequence[EvalRecord]) -> list[SummaryRow]:
    """Box-plot statistics of MAE per (gap size, model), failed cells excluded."""
    good = [r for r in records if r.ok]
    if not good:
        raise EmptyStatisticsError("no successful benchmark records to summarize")
    groups: dict[tuple[int, str], list[float]] = {}
    for r in good:
        groups.setdefault((r.gap_size, r.model), []).append(r.mae)
    order = {m: i for i, m in enumerate(MODEL_NAMES)}
    rows = []
    for (size, model) in sorted(groups, key=lambda k: (k[0], order.get(k[1], 99), k[1])):
        s = describe(groups[(size, model)])
        rows.append(SummaryRow(model, size, s.min, s.q25, s.q50, s.q75, s.max, s.mean, s.count))
    return rows


# ------------------------------------------------------------------ output

RESULT_COLUMNS = ("model", "gap_size", "trial_id", "start_index", "mae", "fit_millis",
                  "predict_millis", "status")
SUMMARY_COLUMNS = ("model", "gap_size", "min", "q25", "median", "q75", "max", "mean", "n")


def results_csv(records: Sequence[EvalRecord], timings: bool = True) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    cols = [c for c in RESULT_COLUMNS if timings or not c.endswith("_millis")]
    w.writerow(cols)
    for r in records:
        status = r.status if r.ok else f"failed: {r.reason}"
        row = {"model": r.model, "gap_size": r.gap_size, "trial_id": r.trial_id,
               "start_index": r.start_index, "mae": repr(r.mae), "fit_millis": f"{r.fit_millis:.3f}",
               "predict_millis": f"{r.predict_millis:.3f}", "status": status}
        w.writerow([row[c] for c in cols])
    return buf.getvalue()


def summary_csv(rows: Sequence[SummaryRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SUMMARY_COLUMNS)
    for s in rows:
        w.writerow([s.model, s.gap_size] + [repr(getattr(s, c)) for c in SUMMARY_COLUMNS[2:-1]] + [s.n])
    return buf.getvalue()


def trace_csv(trace: GapPredictionTrace) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    models = list(trace.predictions)
    w.writerow(["depth", "truth"] + models)
    for i in range(trace.depths.shape[0]):
        w.writerow([repr(float(trace.depths[i])), repr(float(trace.truth[i]))]
                   + [repr(float(trace.predictions[m][i])) for m in models])
    return buf.getvalue()


def write_outputs(result: BenchmarkResult, out_dir) -> None:
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "results.csv"), "w", newline="") as fh:
        fh.write(results_csv(result.records))
    good = [r for r in result.records if r.ok]
    with open(os.path.join(out_dir, "summary.csv"), "w", newline="") as fh:
        fh.write(summary_csv(summarize(good)) if good else ",".join(SUMMARY_COLUMNS) + "\n")
    trace_dir = os.path.join(out_dir, "traces")
    os.makedirs(trace_dir, exist_ok=True)
    for t in result.traces:
        name = f"trace_size{t.gap_size:04d}_trial{t.trial_id:03d}.csv"
        with open(os.path.join(trace_dir, name), "w", newline="") as fh:
            fh.write(trace_csv(t))
