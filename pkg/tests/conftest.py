import numpy as np
import pytest

from wellgap.ingest import Dataset, WellLog

_criteria = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        _criteria[report.nodeid] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid, outcome in _criteria.items():
        name = nodeid.split("::")[-1]
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}")


def make_well(raw_depths, well_id="W1", seed=0, **curves):
    """Complete well with random sensor values unless curves are given."""
    raw = np.asarray(raw_depths, dtype=float)
    n = raw.shape[0]
    rng = np.random.default_rng(seed)
    base = {
        "depth": raw,
        "rhob": rng.uniform(2.0, 2.8, n),
        "dt": rng.uniform(60, 140, n),
        "gr": rng.uniform(10, 120, n),
        "nphi": rng.uniform(0.05, 0.45, n),
        "latitude": np.full(n, 53.5),
        "longitude": np.full(n, 4.2),
    }
    base.update(curves)
    return WellLog(well_id, raw, base)


@pytest.fixture
def well_factory():
    return make_well


@pytest.fixture
def small_dataset():
    return Dataset((make_well(np.round(100 + 0.1 * np.arange(50), 1), "A"),
                    make_well(np.round(200 + 0.1 * np.arange(30), 1), "B", seed=1)))
