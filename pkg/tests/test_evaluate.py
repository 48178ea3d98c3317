import numpy as np
import pytest

from wellgap.errors import EmptyStatisticsError, ParameterError, ShapeError
from wellgap.evaluate import (
    EvalRecord,
    LeakageError,
    check_leakage,
    mae,
    results_csv,
    run_benchmark,
    summarize,
    summary_csv,
    trace_csv,
    write_outputs,
)
from wellgap.synth import BenchPlan, TrainTestSplit, make_trial
from wellgap.synthetic import make_dataset

FAST = {"OLS": {}, "BRR": {}, "RANSAC": {}, "RF": {"n_trees": 5}, "ANN": {"hidden": 16, "epochs": 100}}


def rank_quantile(values, q):
    xs = sorted(values)
    h = (len(xs) - 1) * q
    lo = int(h)
    return xs[lo] if lo + 1 == len(xs) else xs[lo] + (h - lo) * (xs[lo + 1] - xs[lo])


def test_mae_examples():
    assert mae([0.3, 0.2], [0.3, 0.2]) == 0.0
    assert mae([0.1, 0.3], [0.2, 0.2]) == pytest.approx(0.1, abs=1e-15)
    with pytest.raises(ShapeError):
        mae([0.1], [0.1, 0.2])
    with pytest.raises(ShapeError):
        mae([], [])


@pytest.fixture(scope="module")
def realistic():
    return make_dataset("realistic", n=400, seed=1)


def test_counts(realistic):
    plan = BenchPlan(gap_sizes=(5, 20, 40), trials_per_size=4)
    res = run_benchmark(realistic, plan, FAST)
    assert len(res.records) == 3 * 4 * 5
    assert len(res.traces) == 12
    for t in res.traces:
        n = t.depths.shape[0]
        assert t.truth.shape == (n,) and all(p.shape == (n,) for p in t.predictions.values())
    assert all(0 <= r.mae <= 1 for r in res.records)
    by_cell = {(r.model, r.gap_size, r.trial_id): r.mae for r in res.records}
    for t in res.traces:
        for model, pred in t.predictions.items():
            assert by_cell[(model, t.gap_size, t.trial_id)] <= np.max(np.abs(pred - t.truth))
    assert not res.failures


def test_deterministic_excluding_timings(realistic):
    plan = BenchPlan(gap_sizes=(10,), trials_per_size=3, seed=5)
    a = run_benchmark(realistic, plan, FAST)
    b = run_benchmark(realistic, plan, FAST)
    assert results_csv(a.records, timings=False) == results_csv(b.records, timings=False)
    assert [trace_csv(t) for t in a.traces] == [trace_csv(t) for t in b.traces]


def test_model_order_independence(realistic):
    plan = BenchPlan(gap_sizes=(12,), trials_per_size=3, seed=2)
    fwd = run_benchmark(realistic, plan, FAST)
    rev = run_benchmark(realistic, plan, dict(reversed(list(FAST.items()))))
    key = lambda r: (r.model, r.gap_size, r.trial_id)
    assert {key(r): r.mae for r in fwd.records} == {key(r): r.mae for r in rev.records}


def test_leakage_guard_detects_overlap(realistic):
    well = realistic.wells[0]
    plan = BenchPlan(gap_sizes=(10,))
    trial = make_trial(well, plan, 10, 0)
    bad = TrainTestSplit(np.arange(len(well)), np.array(trial.masked_indices), *([None] * 4), ())
    with pytest.raises(LeakageError):
        check_leakage(bad, trial)


def test_failed_cell_recorded_and_run_continues(realistic):
    plan = BenchPlan(gap_sizes=(10,), trials_per_size=2)
    res = run_benchmark(realistic, plan, {"OLS": {}, "RANSAC": {"min_samples": 10_000}})
    assert len(res.records) == 4
    failed = res.failures
    assert len(failed) == 2 and all(r.model == "RANSAC" for r in failed)
    assert all(np.isnan(r.mae) and "InsufficientDataError" in r.reason for r in failed)
    assert "failed: InsufficientDataError" in results_csv(res.records)


def test_no_models():
    with pytest.raises(ParameterError):
        run_benchmark(make_dataset("linear", n=100), BenchPlan(gap_sizes=(5,)), [])


def rec(model, size, trial, value):
    return EvalRecord(model, size, trial, 0, value, 0.0, 0.0)


def test_summarize_constant():
    rows = summarize([rec("OLS", 16, t, 0.05) for t in range(30)])
    assert len(rows) == 1
    r = rows[0]
    assert (r.min, r.q25, r.median, r.q75, r.max, r.n) == (0.05, 0.05, 0.05, 0.05, 0.05, 30)


def test_summarize_matches_rank_oracle():
    values = list(np.random.default_rng(0).uniform(0, 0.1, 30))
    r = summarize([rec("RF", 66, t, v) for t, v in enumerate(values)])[0]
    assert r.min == min(values) and r.max == max(values)
    assert r.q25 == pytest.approx(rank_quantile(values, 0.25), abs=1e-15)
    assert r.median == pytest.approx(rank_quantile(values, 0.5), abs=1e-15)
    assert r.q75 == pytest.approx(rank_quantile(values, 0.75), abs=1e-15)
    assert r.mean == pytest.approx(np.mean(values), abs=1e-15)


def test_summarize_groups():
    records = [rec(m, s, t, 0.01 * t) for m in ("RF", "OLS") for s in (16, 66) for t in range(3)]
    rows = summarize(records)
    assert [(r.gap_size, r.model) for r in rows] == [(16, "OLS"), (16, "RF"), (66, "OLS"), (66, "RF")]
    with pytest.raises(EmptyStatisticsError):
        summarize([])


def test_output_files(realistic, tmp_path):
    plan = BenchPlan(gap_sizes=(8,), trials_per_size=2)
    res = run_benchmark(realistic, plan, {"OLS": {}, "BRR": {}})
    write_outputs(res, tmp_path)
    head = (tmp_path / "results.csv").read_text().splitlines()
    assert head[0] == "model,gap_size,trial_id,start_index,mae,fit_millis,predict_millis,status"
    assert len(head) == 5
    assert (tmp_path / "summary.csv").read_text() == summary_csv(summarize(res.records))
    trace = (tmp_path / "traces" / "trace_size0008_trial001.csv").read_text().splitlines()
    assert trace[0] == "depth,truth,OLS,BRR" and len(trace) == 9
