"""Well-log ingestion: CSV and LAS 2.0 readers, normalization, persistence.

A :class:`Dataset` is an immutable, id-sorted collection of :class:`WellLog`
objects. Each well keeps its curves column-wise as read-only numpy arrays
plus the raw (never normalized) depths used by gap detection.

The canonical interchange format is a CSV with the columns::

    Well, Depth, RHOB, DT, GR, NPHI, Latitude, Longitude[, DepthRaw]

``DepthRaw`` is written only for normalized datasets so that the physical
depths survive a save/load round trip.
"""

from __future__ import annotations

import csv
import hashlib
import io
import math
import os
import warnings
from collections import Counter
from dataclasses import dataclass, field
from typing import BinaryIO, Iterable, Iterator, Mapping, Sequence, Union

import numpy as np

from .errors import (
    DegenerateVariableError,
    DuplicateRecordError,
    EmptyInputError,
    FormatError,
    OrderingError,
    OutOfRangeError,
    ParameterError,
    SchemaError,
    UnsupportedFeatureError,
)

DEFAULT_NULL = -999.25

#: curve keys in canonical column order
CURVES = ("depth", "rhob", "dt", "gr", "nphi", "latitude", "longitude")
SENSORS = ("rhob", "dt", "gr", "nphi")
#: everything except nphi, which is already a fraction
NORMALIZED_VARIABLES = ("depth", "rhob", "dt", "gr", "latitude", "longitude")

CSV_HEADER = ("Well", "Depth", "RHOB", "DT", "GR", "NPHI", "Latitude", "Longitude")
RAW_DEPTH_HEADER = "DepthRaw"
_HEADER_TO_KEY = {h.lower(): k for h, k in zip(CSV_HEADER, ("well",) + CURVES)}

Source = Union[bytes, bytearray, BinaryIO, str, os.PathLike]


@dataclass(frozen=True)
class LogRecord:
    well_id: str
    depth: float
    rhob: float
    dt: float
    gr: float
    nphi: float
    latitude: float
    longitude: float


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class WellLog:
    """Depth-ordered sensor curves for one well.

    ``curves`` maps curve keys (see :data:`CURVES`) to arrays of equal length.
    LAS imports may carry only a subset of the sensors; such a well can be
    gap-analysed but is not :attr:`complete`.
    """

    well_id: str
    raw_depths: np.ndarray
    curves: Mapping[str, np.ndarray]

    def __post_init__(self):
        raw = _frozen(self.raw_depths)
        n = raw.shape[0]
        if raw.ndim != 1 or n < 1:
            raise ParameterError(f"well {self.well_id!r} needs at least one record")
        if n > 1 and not np.all(np.diff(raw) > 0):
            raise OrderingError(f"raw depths of well {self.well_id!r} are not strictly increasing")
        curves = {}
        for key in CURVES:
            if key in self.curves:
                col = _frozen(self.curves[key])
                if col.shape != (n,):
                    raise ParameterError(f"curve {key!r} of well {self.well_id!r} has wrong length")
                curves[key] = col
        unknown = set(self.curves) - set(CURVES)
        if unknown:
            raise ParameterError(f"unknown curves: {sorted(unknown)}")
        object.__setattr__(self, "raw_depths", raw)
        object.__setattr__(self, "curves", curves)

    def __len__(self) -> int:
        return self.raw_depths.shape[0]

    def __eq__(self, other):
        if not isinstance(other, WellLog):
            return NotImplemented
        return (
            self.well_id == other.well_id
            and np.array_equal(self.raw_depths, other.raw_depths)
            and self.curves.keys() == other.curves.keys()
            and all(np.array_equal(self.curves[k], other.curves[k]) for k in self.curves)
        )

    __hash__ = None

    @property
    def complete(self) -> bool:
        return all(k in self.curves for k in CURVES)

    def curve(self, name: str) -> np.ndarray:
        try:
            return self.curves[name.lower()]
        except KeyError:
            raise SchemaError(name, f"well {self.well_id!r} has no curve {name!r}") from None

    @property
    def records(self) -> tuple[LogRecord, ...]:
        if not self.complete:
            missing = next(k for k in CURVES if k not in self.curves)
            raise SchemaError(missing, f"well {self.well_id!r} lacks curve {missing!r}")
        cols = [self.curves[k].tolist() for k in CURVES]
        return tuple(LogRecord(self.well_id, *vals) for vals in zip(*cols))

    def with_curves(self, curves: Mapping[str, np.ndarray]) -> "WellLog":
        return WellLog(self.well_id, self.raw_depths, {**self.curves, **curves})


@dataclass
class ParseReport:
    accepted: int = 0
    dropped: int = 0
    reasons: Counter = field(default_factory=Counter)

    def drop(self, reason: str):
        self.dropped += 1
        self.reasons[reason] += 1

    def merge(self, other: "ParseReport") -> "ParseReport":
        return ParseReport(
            self.accepted + other.accepted,
            self.dropped + other.dropped,
            self.reasons + other.reasons,
        )

    def to_text(self) -> str:
        lines = [f"accepted={self.accepted}", f"dropped={self.dropped}"]
        lines += [f"dropped.{k}={v}" for k, v in sorted(self.reasons.items())]
        return "\n".join(lines) + "\n"


@dataclass(frozen=True, eq=False)
class Dataset:
    """Immutable collection of wells, sorted by well id."""

    wells: tuple[WellLog, ...]
    normalized: bool = False
    report: ParseReport = field(default_factory=ParseReport, compare=False)

    def __post_init__(self):
        wells = tuple(sorted(self.wells, key=lambda w: w.well_id))
        ids = [w.well_id for w in wells]
        if len(set(ids)) != len(ids):
            raise ParameterError("well ids must be unique within a dataset")
        object.__setattr__(self, "wells", wells)

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return self.normalized == other.normalized and self.wells == other.wells

    __hash__ = None

    def __iter__(self) -> Iterator[WellLog]:
        return iter(self.wells)

    def __len__(self) -> int:
        return len(self.wells)

    @property
    def well_ids(self) -> list[str]:
        return [w.well_id for w in self.wells]

    @property
    def n_records(self) -> int:
        return sum(len(w) for w in self.wells)

    def well(self, well_id: str) -> WellLog:
        for w in self.wells:
            if w.well_id == well_id:
                return w
        raise ParameterError(f"no well named {well_id!r} in dataset")

    def fingerprint(self) -> str:
        return hashlib.sha256(to_csv_text(self).encode("utf-8")).hexdigest()


def _read_bytes(source: Source) -> bytes:
    if isinstance(source, (bytes, bytearray)):
        return bytes(source)
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            return fh.read()
    return source.read()


# --------------------------------------------------------------------- CSV


def parse_csv(source: Source, null_value: float = DEFAULT_NULL) -> Dataset:
    """Read a canonical well-log CSV into a :class:`Dataset`.

    Header names are matched case-insensitively and in any order; unknown
    columns (such as a leading row index) are ignored. Rows with an
    unparseable, non-finite or sentinel value are dropped and counted in
    ``dataset.report``. A ``DepthRaw`` column marks the file as normalized.
    """
    text = _read_bytes(source).decode("utf-8-sig")
    if not text.strip():
        raise EmptyInputError("CSV input is empty")
    reader = csv.reader(io.StringIO(text))
    header = [h.strip().lower() for h in next(reader)]
    positions = {}
    for key_name, key in _HEADER_TO_KEY.items():
        if key_name not in header:
            raise SchemaError(CSV_HEADER[list(_HEADER_TO_KEY).index(key_name)])
        positions[key] = header.index(key_name)
    raw_pos = header.index(RAW_DEPTH_HEADER.lower()) if RAW_DEPTH_HEADER.lower() in header else None
    normalized = raw_pos is not None

    report = ParseReport()
    rows: dict[str, list[tuple[float, tuple[float, ...]]]] = {}
    seen: set[tuple[str, float]] = set()
    for row in reader:
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) < len(header):
            report.drop("short-row")
            continue
        well_id = row[positions["well"]].strip()
        if not well_id:
            report.drop("missing-well")
            continue
        try:
            values = tuple(float(row[positions[k]]) for k in CURVES)
            raw_depth = float(row[raw_pos]) if normalized else values[0]
        except ValueError:
            report.drop("unparseable")
            continue
        reason = _check_values(values, raw_depth, null_value)
        if reason:
            report.drop(reason)
            continue
        if (well_id, raw_depth) in seen:
            raise DuplicateRecordError(well_id, raw_depth)
        seen.add((well_id, raw_depth))
        rows.setdefault(well_id, []).append((raw_depth, values))
        report.accepted += 1

    wells = []
    for well_id, recs in rows.items():
        recs.sort(key=lambda r: r[0])
        cols = np.array([r[1] for r in recs], dtype=float)
        wells.append(
            WellLog(well_id, [r[0] for r in recs], {k: cols[:, i] for i, k in enumerate(CURVES)})
        )
    return Dataset(tuple(wells), normalized=normalized, report=report)


def _check_values(values, raw_depth, null_value) -> str | None:
    allv = values + (raw_depth,)
    if any(v == null_value for v in allv):
        return "sentinel"
    if not all(math.isfinite(v) for v in allv):
        return "non-finite"
    if raw_depth <= 0:
        return "nonpositive-depth"
    nphi = values[CURVES.index("nphi")]
    if not 0.0 <= nphi <= 1.0:
        return "nphi-out-of-range"
    return None


def to_csv_text(dataset: Dataset) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = list(CSV_HEADER) + ([RAW_DEPTH_HEADER] if dataset.normalized else [])
    writer.writerow(header)
    for well in dataset:
        cols = [well.curve(k).tolist() for k in CURVES]
        raws = well.raw_depths.tolist()
        for i, vals in enumerate(zip(*cols)):
            row = [well.well_id] + [repr(v) for v in vals]
            if dataset.normalized:
                row.append(repr(raws[i]))
            writer.writerow(row)
    return buf.getvalue()


def write_csv(dataset: Dataset, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(to_csv_text(dataset))


# --------------------------------------------------------------------- LAS

_LAS_CURVE_KEYS = {
    "DEPT": "depth",
    "DEPTH": "depth",
    "RHOB": "rhob",
    "DT": "dt",
    "GR": "gr",
    "NPHI": "nphi",
}


def _las_header_line(line: str) -> tuple[str, str, str]:
    """Split ``MNEM.UNIT  VALUE : DESCRIPTION`` into (mnemonic, unit, value)."""
    if "." not in line:
        raise FormatError(f"malformed LAS header line: {line!r}")
    mnem, rest = line.split(".", 1)
    unit, _, rest = rest.partition(" ")
    value = rest.rpartition(":")[0] if ":" in rest else rest
    return mnem.strip().upper(), unit.strip(), value.strip()


def parse_las(source: Source, null_value: float = DEFAULT_NULL,
              report: ParseReport | None = None) -> WellLog:
    """Read an unwrapped LAS 2.0 file.

    The ``NULL`` entry of the ~W section overrides *null_value*. Only the
    depth curve and the RHOB/DT/GR/NPHI curves are kept; rows where any kept
    curve is null are excluded. ``LATI``/``LONG`` in ~W, when numeric, become
    constant latitude/longitude curves. Excluded rows are counted in
    *report* when one is given.
    """
    try:
        text = _read_bytes(source).decode("ascii")
    except UnicodeDecodeError as exc:
        raise FormatError(f"LAS input is not ASCII: {exc}") from None
    if not text.strip():
        raise EmptyInputError("LAS input is empty")

    section = None
    well_items: dict[str, str] = {}
    curves: list[str] = []
    data_rows: list[list[str]] = []
    seen_sections = set()
    for lineno, raw_line in enumerate(text.splitlines(), 1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("~"):
            section = line[1:2].upper()
            seen_sections.add(section)
            continue
        if section == "A":
            data_rows.append(line.split())
        elif section == "V":
            mnem, _, value = _las_header_line(line)
            if mnem == "WRAP" and value.upper() != "NO":
                raise UnsupportedFeatureError("wrapped LAS files (WRAP=YES) are not supported")
            if mnem == "VERS" and not value.startswith("2"):
                raise UnsupportedFeatureError(f"LAS version {value} is not supported")
        elif section == "W":
            mnem, _, value = _las_header_line(line)
            well_items[mnem] = value
        elif section == "C":
            mnem, _, _ = _las_header_line(line)
            curves.append(mnem)
        elif section is None:
            raise FormatError(f"line {lineno}: data before the first section")

    if "A" not in seen_sections:
        raise FormatError("LAS file has no ~A section")
    if "C" not in seen_sections or not curves:
        raise FormatError("LAS file has no ~C curve definitions")

    if "NULL" in well_items and well_items["NULL"]:
        try:
            null_value = float(well_items["NULL"])
        except ValueError:
            raise FormatError(f"bad NULL value {well_items['NULL']!r}") from None
    well_id = well_items.get("WELL", "").strip()
    if not well_id:
        raise FormatError("LAS ~W section has no WELL name")

    columns = {}
    for i, mnem in enumerate(curves):
        key = _LAS_CURVE_KEYS.get(mnem)
        if key and key not in columns:
            columns[key] = i
    if "depth" not in columns:
        raise SchemaError("DEPT", "LAS file has no DEPT/DEPTH curve")
    if not any(k in columns for k in SENSORS):
        raise SchemaError("NPHI", "LAS file has none of RHOB, DT, GR, NPHI")

    kept = []
    for lineno, row in enumerate(data_rows, 1):
        if len(row) != len(curves):
            raise FormatError(f"~A row {lineno} has {len(row)} values, expected {len(curves)}")
        try:
            vals = {k: float(row[i]) for k, i in columns.items()}
        except ValueError:
            raise FormatError(f"~A row {lineno} is not numeric") from None
        if any(v == null_value for v in vals.values()):
            if report is not None:
                report.drop("sentinel")
            continue
        if not all(math.isfinite(v) for v in vals.values()):
            if report is not None:
                report.drop("non-finite")
            continue
        kept.append(vals)
    if not kept:
        raise EmptyInputError(f"LAS well {well_id!r} has no complete rows")

    kept.sort(key=lambda v: v["depth"])
    depths = [v["depth"] for v in kept]
    for a, b in zip(depths, depths[1:]):
        if a == b:
            raise DuplicateRecordError(well_id, a)
    curve_data = {k: [v[k] for v in kept] for k in columns}
    for mnem, key in (("LATI", "latitude"), ("LONG", "longitude")):
        try:
            curve_data[key] = [float(well_items[mnem])] * len(kept)
        except (KeyError, ValueError):
            pass
    return WellLog(well_id, depths, curve_data)


def dataset_from_wells(
    wells: Iterable[WellLog], normalized: bool = False, require_complete: bool = True
) -> Dataset:
    """Assemble wells into a dataset (e.g. after LAS import)."""
    wells = list(wells)
    report = ParseReport()
    for w in wells:
        if require_complete and not w.complete:
            missing = next(k for k in CURVES if k not in w.curves)
            raise SchemaError(missing, f"well {w.well_id!r} lacks curve {missing!r}")
        report.accepted += len(w)
    return Dataset(tuple(wells), normalized=normalized, report=report)


# ------------------------------------------------------------ normalization


@dataclass(frozen=True)
class NormalizationManifest:
    ranges: Mapping[str, tuple[float, float]]
    fingerprint: str = ""

    def normalize(self, variable: str, x):
        lo, hi = self.ranges[variable]
        return (np.asarray(x, dtype=float) - lo) / (hi - lo)

    def denormalize(self, variable: str, x):
        lo, hi = self.ranges[variable]
        return np.asarray(x, dtype=float) * (hi - lo) + lo

    def to_text(self) -> str:
        lines = []
        for var in NORMALIZED_VARIABLES:
            if var in self.ranges:
                lo, hi = self.ranges[var]
                lines.append(f"{var}.min={lo!r}")
                lines.append(f"{var}.max={hi!r}")
        lines.append(f"fingerprint={self.fingerprint}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "NormalizationManifest":
        values = {}
        fingerprint = ""
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise FormatError(f"bad manifest line: {line!r}")
            key = key.strip()
            if key == "fingerprint":
                fingerprint = value.strip()
                continue
            var, _, bound = key.rpartition(".")
            if var not in NORMALIZED_VARIABLES or bound not in ("min", "max"):
                raise FormatError(f"unknown manifest key: {key!r}")
            values.setdefault(var, {})[bound] = float(value)
        ranges = {}
        for var, b in values.items():
            if set(b) != {"min", "max"}:
                raise FormatError(f"manifest entry for {var!r} needs both min and max")
            ranges[var] = (b["min"], b["max"])
        return cls(ranges, fingerprint)


def fit_normalization(
    dataset: Dataset, variables: Iterable[str] = NORMALIZED_VARIABLES
) -> NormalizationManifest:
    """Global (dataset-wide) min/max for each normalized variable."""
    if dataset.n_records == 0:
        raise EmptyInputError("cannot fit normalization on an empty dataset")
    ranges = {}
    for var in variables:
        if var == "nphi" or var not in NORMALIZED_VARIABLES:
            raise ParameterError(f"{var!r} is not a normalized variable")
        values = np.concatenate([w.curve(var) for w in dataset])
        lo, hi = float(values.min()), float(values.max())
        if not hi > lo:
            raise DegenerateVariableError(var)
        ranges[var] = (lo, hi)
    return NormalizationManifest(ranges, dataset.fingerprint())


def apply_normalization(
    dataset: Dataset, manifest: NormalizationManifest, mode: str = "strict"
) -> Dataset:
    """Rescale every manifest variable to [0, 1]; nphi and raw depths are untouched.

    In ``strict`` mode a value outside the manifest range raises
    :class:`OutOfRangeError`; ``lenient`` clamps it and warns.
    """
    if mode not in ("strict", "lenient"):
        raise ParameterError(f"unknown normalization mode {mode!r}")
    wells = []
    for well in dataset:
        scaled = {}
        for var, (lo, hi) in manifest.ranges.items():
            x = well.curve(var)
            outside = (x < lo) | (x > hi)
            if outside.any():
                bad = float(x[outside][0])
                if mode == "strict":
                    raise OutOfRangeError(
                        f"{var}={bad!r} in well {well.well_id!r} is outside [{lo!r}, {hi!r}]"
                    )
                warnings.warn(
                    f"clamping {int(outside.sum())} {var} value(s) in well {well.well_id!r}",
                    stacklevel=2,
                )
                x = np.clip(x, lo, hi)
            scaled[var] = np.clip(manifest.normalize(var, x), 0.0, 1.0)
        wells.append(well.with_curves(scaled))
    return Dataset(tuple(wells), normalized=True, report=dataset.report)


def merge_datasets(datasets: Sequence[Dataset]) -> Dataset:
    """Combine datasets; records of a well split across files are merged by depth."""
    if len({d.normalized for d in datasets}) > 1:
        raise ParameterError("cannot merge normalized and raw datasets")
    by_id: dict[str, list[WellLog]] = {}
    report = ParseReport()
    for d in datasets:
        report = report.merge(d.report)
        for w in d:
            by_id.setdefault(w.well_id, []).append(w)
    wells = []
    for well_id, parts in by_id.items():
        if len(parts) == 1:
            wells.append(parts[0])
            continue
        keys = set.intersection(*(set(p.curves) for p in parts))
        raw = np.concatenate([p.raw_depths for p in parts])
        order = np.argsort(raw, kind="stable")
        dup = np.flatnonzero(np.diff(raw[order]) == 0)
        if dup.size:
            raise DuplicateRecordError(well_id, float(raw[order][dup[0]]))
        curves = {k: np.concatenate([p.curves[k] for p in parts])[order] for k in keys}
        wells.append(WellLog(well_id, raw[order], curves))
    return Dataset(tuple(wells), normalized=datasets[0].normalized, report=report)


def load_dataset(
    path: str | os.PathLike, null_value: float = DEFAULT_NULL, require_complete: bool = True
) -> Dataset:
    """Load a CSV or LAS file by extension.

    LAS wells missing some curves are only accepted with
    ``require_complete=False`` (enough for gap analysis).
    """
    if str(path).lower().endswith(".las"):
        dropped = ParseReport()
        ds = dataset_from_wells([parse_las(path, null_value, dropped)], require_complete=require_complete)
        return Dataset(ds.wells, ds.normalized, ds.report.merge(dropped))
    return parse_csv(path, null_value)
