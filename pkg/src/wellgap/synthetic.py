"""Deterministic synthetic wells and gap corpora for tests, demos and benchmarks."""

from __future__ import annotations

from importlib import resources

import numpy as np

from .ingest import Dataset, ParseReport, WellLog, parse_csv

KINDS = ("realistic", "linear", "noisy", "plateau")
BUNDLED_WELL = "SYN-01"


def _smooth_curve(rng, n, lo=0.1, hi=0.9, smooth=25):
    """Smoothed random walk plus a few harmonics, scaled to [lo, hi]."""
    walk = np.cumsum(rng.standard_normal(n + 2 * smooth))
    kernel = np.hanning(2 * smooth + 1)
    walk = np.convolve(walk, kernel / kernel.sum(), mode="same")[smooth : smooth + n]
    t = np.linspace(0.0, 1.0, n)
    for _ in range(3):
        freq = rng.uniform(2, 15)
        walk = walk + rng.uniform(0.5, 2.0) * np.sin(2 * np.pi * freq * t + rng.uniform(0, 2 * np.pi))
    walk = walk + 0.3 * rng.standard_normal(n)
    return lo + (hi - lo) * (walk - walk.min()) / (walk.max() - walk.min())


def make_well(kind: str = "realistic", n: int = 1000, seed: int = 0, well_id: str = BUNDLED_WELL,
              start_depth: float = 1500.0, step: float = 0.1, noise_sd: float = 0.0125) -> WellLog:
    """A gapless, already-normalized well.

    ``linear``    nphi = 0.5*rhob + 0.2*gr exactly
    ``noisy``     the same plus Gaussian noise of sd *noise_sd*
    ``plateau``   nphi = 0.15 above the mid depth, 0.45 below
    ``realistic`` a smooth nonlinear mix of the sensors plus 0.01 noise
    """
    if kind not in KINDS:
        raise ValueError(f"unknown synthetic well kind {kind!r}")
    rng = np.random.default_rng(seed)
    raw = np.round(start_depth + step * np.arange(n), 6)
    depth = (raw - raw[0]) / (raw[-1] - raw[0])
    rhob = _smooth_curve(rng, n)
    dt = _smooth_curve(rng, n)
    gr = _smooth_curve(rng, n, 0.02, 0.6)
    if kind == "linear":
        nphi = 0.5 * rhob + 0.2 * gr
    elif kind == "noisy":
        nphi = 0.5 * rhob + 0.2 * gr + rng.normal(0.0, noise_sd, n)
    elif kind == "plateau":
        nphi = np.where(depth < 0.5, 0.15, 0.45)
    else:
        nphi = (0.55 - 0.35 * rhob + 0.15 * gr + 0.1 * dt**2
                + 0.03 * np.sin(6 * np.pi * rhob) + rng.normal(0.0, 0.01, n))
    nphi = np.clip(nphi, 0.0, 1.0)
    return WellLog(well_id, raw, {
        "depth": depth, "rhob": rhob, "dt": dt, "gr": gr, "nphi": nphi,
        "latitude": np.full(n, 0.805221), "longitude": np.full(n, 0.512654),
    })


def make_dataset(kind: str = "realistic", **kwargs) -> Dataset:
    well = make_well(kind, **kwargs)
    return Dataset((well,), normalized=True, report=ParseReport(accepted=len(well)))


def bundled_dataset() -> Dataset:
    """The single synthetic gapless well shipped with the package."""
    data = resources.files("wellgap").joinpath("data", "synthetic_well.csv").read_bytes()
    return parse_csv(data)


def make_gap_corpus(n_wells: int = 50, n_gaps: int = 120, seed: int = 0):
    """Raw multi-well corpus with planted gaps.

    Returns ``(dataset, planted)`` where *planted* lists ``(well_id,
    length_m)`` for every deleted stretch. Most wells step 0.1 m, every
    seventh steps 0.2 m; gaps remove up to 60 consecutive records, and
    always enough to exceed the 0.2 m threshold.
    """
    rng = np.random.default_rng(seed)
    per_well = np.bincount(rng.integers(0, n_wells, n_gaps), minlength=n_wells)
    wells, planted = [], []
    for w in range(n_wells):
        well_id = f"W{w:03d}"
        step = 0.2 if w % 7 == 3 else 0.1
        k = int(per_well[w])
        # one missing record at 0.1 m spacing is a 0.2 m step, not a gap
        deletions = rng.integers(2 if step == 0.1 else 1, 61, k)
        keep_between = rng.integers(5, 200, k + 1)
        idx, pos = [], 0
        for j in range(k):
            idx.extend(range(pos, pos + keep_between[j]))
            pos += keep_between[j]
            planted.append((well_id, round((deletions[j] + 1) * step, 1)))
            pos += deletions[j]
        idx.extend(range(pos, pos + keep_between[k]))
        steps = np.array(idx)
        top = float(rng.uniform(300, 3000))
        raw = np.round(top + step * steps, 1)
        m = raw.shape[0]
        wells.append(WellLog(well_id, raw, {
            "depth": raw,
            "rhob": rng.uniform(1.9, 2.9, m),
            "dt": rng.uniform(50, 150, m),
            "gr": rng.uniform(10, 150, m),
            "nphi": rng.uniform(0.0, 0.5, m),
            "latitude": np.full(m, rng.uniform(53.0, 55.5)),
            "longitude": np.full(m, rng.uniform(2.5, 5.0)),
        }))
    return Dataset(tuple(wells), report=ParseReport(accepted=sum(len(x) for x in wells))), planted
