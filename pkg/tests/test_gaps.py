from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_well
from wellgap.errors import EmptyStatisticsError, OrderingError, ParameterError
from wellgap.gaps import Gap, detect_all, detect_gaps, gap_histogram, gaps_to_csv, summarize_gaps
from wellgap.ingest import WellLog
from wellgap.stats import describe, quantile
from wellgap.synthetic import make_gap_corpus


def rank_oracle(values, q):
    """Closest-rank linear interpolation in exact rational arithmetic."""
    xs = sorted(Fraction(v) for v in values)
    h = Fraction(len(xs) - 1) * Fraction(q)
    lo = h.numerator // h.denominator
    if lo + 1 >= len(xs):
        return float(xs[lo])
    return float(xs[lo] + (h - lo) * (xs[lo + 1] - xs[lo]))


def gaps_of(lengths):
    return [Gap("W", 0.0, float(x)) for x in lengths]


def test_threshold_example():
    gaps = detect_gaps(make_well([10.0, 10.1, 10.2, 10.5, 10.6]))
    assert len(gaps) == 1
    assert (gaps[0].depth_before, gaps[0].depth_after) == (10.2, 10.5)
    assert gaps[0].length == pytest.approx(0.3, abs=1e-12)
    assert gaps[0].approx_points == 3


def test_uniform_spacing_has_no_gaps():
    depths = np.round(1000 + 0.1 * np.arange(1000), 1)
    assert detect_gaps(make_well(depths)) == []


def test_planted_gaps_match_brute_force_scan():
    depths = np.round(500 + 0.1 * np.arange(1000), 1)
    spans = [(100, 104), (400, 460), (800, 802)]
    keep = np.ones(1000, dtype=bool)
    for a, b in spans:
        keep[a:b] = False
    well = make_well(depths[keep])
    gaps = detect_gaps(well)
    assert len(gaps) == 3
    for g, (a, b) in zip(gaps, spans):
        assert g.depth_before == depths[a - 1] and g.depth_after == depths[b]
        assert g.length == pytest.approx(0.1 * (b - a + 1), abs=1e-9)
    # scan of every consecutive pair
    d = well.raw_depths
    expected = [(d[i], d[i + 1]) for i in range(len(d) - 1) if d[i + 1] - d[i] > 0.2 + 1e-6]
    assert [(g.depth_before, g.depth_after) for g in gaps] == expected


def test_ordering_error():
    well = make_well([1.0, 2.0, 3.0])
    object.__setattr__(well, "raw_depths", np.array([1.0, 3.0, 2.0]))
    with pytest.raises(OrderingError):
        detect_gaps(well)


def test_wells_reject_unsorted_depths():
    with pytest.raises(OrderingError):
        make_well([1.0, 3.0, 2.0])


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(1, 40), min_size=2, max_size=60), st.sampled_from([0.1, 0.2, 0.3, 0.55, 1.0]))
def test_detection_is_exact(steps, threshold):
    depths = np.round(100 + 0.1 * np.cumsum(steps), 1)
    gaps = detect_gaps(make_well(depths), threshold)
    found = {(g.depth_before, g.depth_after) for g in gaps}
    for a, b in zip(depths[:-1], depths[1:]):
        assert ((a, b) in found) == (round(b - a, 6) > threshold)
    assert all(g.length > threshold for g in gaps)
    assert [g.depth_before for g in gaps] == sorted(g.depth_before for g in gaps)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(1, 40), min_size=2, max_size=60),
       st.floats(0.05, 2.0), st.floats(0.05, 2.0))
def test_threshold_monotonicity(steps, t1, t2):
    well = make_well(np.round(100 + 0.1 * np.cumsum(steps), 1))
    lo, hi = sorted((t1, t2))
    assert len(detect_gaps(well, hi)) <= len(detect_gaps(well, lo))


def test_summary_constant():
    s = summarize_gaps(gaps_of([1.0, 1.0, 1.0]))
    assert (s.count, s.mean, s.std, s.min, s.q25, s.q50, s.q75, s.max) == (3, 1.0, 0.0, 1.0, 1.0, 1.0, 1.0, 1.0)


def test_summary_arithmetic_series_against_rank_oracle():
    lengths = [round(0.3 + 0.1 * k, 10) for k in range(101)]
    s = summarize_gaps(gaps_of(lengths))
    assert s.count == 101
    assert s.q50 == pytest.approx(5.3, abs=1e-12)
    for q, got in ((0.25, s.q25), (0.5, s.q50), (0.75, s.q75)):
        assert got == pytest.approx(rank_oracle(lengths, q), abs=1e-12)
    assert s.std == pytest.approx(np.std(lengths, ddof=1), rel=1e-12)


def test_summary_empty():
    with pytest.raises(EmptyStatisticsError):
        summarize_gaps([])


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(0.01, 1e4), min_size=1, max_size=50), st.randoms(use_true_random=False))
def test_describe_order_invariant_and_sorted(values, rnd):
    shuffled = list(values)
    rnd.shuffle(shuffled)
    a, b = describe(values), describe(shuffled)
    assert a == b
    assert a.min <= a.q25 <= a.q50 <= a.q75 <= a.max
    for q, got in ((0.25, a.q25), (0.5, a.q50), (0.75, a.q75)):
        assert got == pytest.approx(rank_oracle(values, q), rel=1e-12, abs=1e-12)


def test_quantile_bounds():
    with pytest.raises(ParameterError):
        quantile([1.0], 1.5)
    assert quantile([1.0, 2.0], 1.0) == 2.0


def test_stats_text_block_order():
    text = summarize_gaps(gaps_of([0.3, 0.5])).to_text()
    assert [line.split("=")[0] for line in text.splitlines()] == [
        "count", "mean", "std", "min", "25%", "50%", "75%", "max"]


def test_histogram_forced_binning():
    h = gap_histogram(gaps_of([1, 1, 2, 2]), scale="linear", bin_count=2)
    assert h.bin_edges == (1.0, 1.5, 2.0)
    assert h.counts == (2, 2)


def test_histogram_zero_bins():
    with pytest.raises(ParameterError):
        gap_histogram(gaps_of([1, 2]), bin_count=0)


def test_histogram_zoom_domain_is_min_to_q75():
    lengths = [0.3, 0.4, 1.0, 2.0, 50.0]
    h = gap_histogram(gaps_of(lengths), scale="linear", bin_count=4, zoom=True)
    assert h.bin_edges[0] == 0.3 and h.bin_edges[-1] == 2.0
    assert sum(h.counts) == 4


def binning_oracle(lengths, edges):
    counts = [0] * (len(edges) - 1)
    for x in lengths:
        for i in range(len(edges) - 1):
            last = i == len(edges) - 2
            if edges[i] <= x < edges[i + 1] or (last and x == edges[i + 1]):
                counts[i] += 1
                break
    return counts


def test_log_histogram_matches_per_element_oracle():
    dataset, planted = make_gap_corpus(n_wells=10, n_gaps=40, seed=5)
    gaps = detect_all(dataset)
    h = gap_histogram(gaps, scale="log10", bin_count=12)
    lengths = [g.length for g in gaps]
    assert list(h.counts) == binning_oracle(lengths, h.bin_edges)
    assert sum(h.counts) == len(gaps)
    logs = np.log10(h.bin_edges)
    np.testing.assert_allclose(np.diff(logs), np.diff(logs)[0], rtol=1e-9)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0.3, 5000), min_size=1, max_size=80), st.integers(1, 30),
       st.sampled_from(["linear", "log10"]))
def test_histogram_conservation(lengths, bins, scale):
    h = gap_histogram(gaps_of(lengths), scale=scale, bin_count=bins)
    assert sum(h.counts) == len(lengths)
    assert all(b > a for a, b in zip(h.bin_edges, h.bin_edges[1:]))
    assert list(h.counts) == binning_oracle(lengths, h.bin_edges)


def test_gap_csv_columns():
    text = gaps_to_csv(detect_gaps(make_well([10.0, 10.1, 10.2, 10.5, 10.6], "X")))
    lines = text.splitlines()
    assert lines[0] == "well,depth_before,depth_after,length_m,approx_points"
    assert lines[1].startswith("X,10.2,10.5,") and lines[1].endswith(",3")


def test_corpus_planted_lengths_recovered():
    dataset, planted = make_gap_corpus(n_wells=50, n_gaps=120, seed=0)
    gaps = detect_all(dataset)
    assert len(gaps) == 120
    got = sorted((g.well_id, round(g.length, 6)) for g in gaps)
    want = sorted((w, round(x, 6)) for w, x in planted)
    assert got == want
    assert isinstance(dataset.wells[0], WellLog)
