"""Command-line entry point: ``wellgap {ingest,gaps,bench,fill}``.

Every command writes ``effective_config.txt`` into its output directory;
passing that file back through ``--config`` reproduces the run.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from . import evaluate, gaps as gapmod, ingest, synth
from .errors import DegenerateVariableError, InputError, WellGapError
from .regress import DEFAULTS, MODEL_NAMES, Regressor, canonical_name
from .synthetic import bundled_dataset

log = logging.getLogger("wellgap")

EXIT_OK = 0
EXIT_INPUT = 3
EXIT_PARAMETER = 4
EXIT_CELL_FAILURES = 5

BUNDLED = "bundled"


def parse_value(text: str) -> Any:
    t = text.strip()
    low = t.lower()
    if low in ("none", "null", ""):
        return None
    if low in ("true", "yes"):
        return True
    if low in ("false", "no"):
        return False
    for cast in (int, float):
        try:
            return cast(t)
        except ValueError:
            pass
    return t


def _fmt(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return str(value).lower()
    return repr(value)


@dataclass
class RunConfig:
    command: str = ""
    inputs: list[str] = field(default_factory=list)
    out: str = "wellgap_out"
    seed: int = 0
    mode: str = "strict"
    null_value: float = ingest.DEFAULT_NULL
    normalize: bool = True
    threshold: float = gapmod.DEFAULT_THRESHOLD
    bins: int = 20
    well: str | None = None
    sizes: tuple[int, ...] = synth.DEFAULT_SIZES
    trials: int = synth.DEFAULT_TRIALS
    target: str = "nphi"
    features: tuple[str, ...] = synth.DEFAULT_FEATURES
    models: tuple[str, ...] = MODEL_NAMES
    fill_model: str = "OLS"
    overrides: dict = field(default_factory=dict)

    def plan(self) -> synth.BenchPlan:
        return synth.BenchPlan(self.well, tuple(self.sizes), self.trials, self.target,
                               tuple(self.features), self.seed)

    def model_params(self, names) -> dict[str, dict]:
        out = {}
        for name in names:
            key = canonical_name(name)
            out[key] = Regressor(key, **self.overrides.get(key, {})).params
        return out

    def to_text(self) -> str:
        lines = [f"command={self.command}"]
        lines += [f"input={p}" for p in self.inputs]
        lines += [
            f"out={self.out}", f"seed={self.seed}", f"mode={self.mode}",
            f"null_value={self.null_value!r}", f"normalize={str(self.normalize).lower()}",
            f"threshold={self.threshold!r}", f"bins={self.bins}", f"well={self.well or ''}",
            f"sizes={','.join(map(str, self.sizes))}", f"trials={self.trials}",
            f"target={self.target}", f"features={','.join(self.features)}",
            f"models={','.join(self.models)}", f"fill_model={self.fill_model}",
        ]
        names = set(self.models) | {canonical_name(self.fill_model)}
        for name in MODEL_NAMES:
            if name in names:
                for k, v in self.model_params([name])[name].items():
                    lines.append(f"model.{name}.{k}={_fmt(v)}")
        return "\n".join(lines) + "\n"

    def update(self, key: str, value: str):
        key = key.strip()
        value = value.strip()
        if key == "input":
            self.inputs.append(value)
        elif key.startswith("model."):
            _, name, param = key.split(".", 2)
            name = canonical_name(name)
            if param not in DEFAULTS[name]:
                raise WellGapError(f"unknown hyperparameter {key!r}")
            self.overrides.setdefault(name, {})[param] = parse_value(value)
        elif key in ("sizes",):
            self.sizes = tuple(int(v) for v in value.split(",") if v.strip())
        elif key in ("features",):
            self.features = tuple(v.strip().lower() for v in value.split(",") if v.strip())
        elif key == "models":
            self.models = tuple(canonical_name(v) for v in value.split(",") if v.strip())
        elif key in ("seed", "trials", "bins"):
            setattr(self, key, int(value))
        elif key in ("threshold", "null_value"):
            setattr(self, key, float(value))
        elif key == "normalize":
            self.normalize = bool(parse_value(value))
        elif key == "well":
            self.well = value or None
        elif key in ("command", "out", "mode", "target", "fill_model"):
            setattr(self, key, value)
        else:
            raise WellGapError(f"unknown config key {key!r}")

    def load(self, path: str):
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                key, sep, value = line.partition("=")
                if not sep:
                    raise WellGapError(f"bad config line: {line!r}")
                if key.strip() == "command":
                    continue
                self.update(key, value)


def _write(out_dir, name, text):
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, name), "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _load_inputs(cfg: RunConfig, require_complete=True) -> ingest.Dataset:
    if not cfg.inputs:
        raise WellGapError("no input dataset given")
    datasets = []
    for path in cfg.inputs:
        if path == BUNDLED:
            datasets.append(bundled_dataset())
        else:
            datasets.append(ingest.load_dataset(path, cfg.null_value, require_complete))
    if len(datasets) == 1:
        return datasets[0]
    return ingest.merge_datasets(datasets)


# ---------------------------------------------------------------- commands


def cmd_ingest(cfg: RunConfig) -> int:
    datasets = [ingest.load_dataset(p, cfg.null_value) for p in cfg.inputs]
    if not datasets:
        raise WellGapError("no input files given")
    raw = ingest.merge_datasets(datasets) if len(datasets) > 1 else datasets[0]
    out = cfg.out
    _write(out, "parse_report.txt", raw.report.to_text())
    if cfg.normalize and raw.n_records and not raw.normalized:
        try:
            manifest = ingest.fit_normalization(raw)
        except DegenerateVariableError:
            print("hint: a single well has constant coordinates; rerun with --no-normalize "
                  "or ingest several wells together", file=sys.stderr)
            raise
        data = ingest.apply_normalization(raw, manifest, cfg.mode)
        _write(out, "manifest.txt", manifest.to_text())
    else:
        data = raw
    _write(out, "dataset.csv", ingest.to_csv_text(data))
    _write(out, "effective_config.txt", cfg.to_text())
    print(f"ingested {raw.report.accepted} records from {len(raw)} well(s); dropped {raw.report.dropped}")
    return EXIT_OK


def cmd_gaps(cfg: RunConfig) -> int:
    data = _load_inputs(cfg, require_complete=False)
    found = gapmod.detect_all(data, cfg.threshold)
    out = cfg.out
    _write(out, "gaps.csv", gapmod.gaps_to_csv(found))
    _write(out, "effective_config.txt", cfg.to_text())
    if not found:
        _write(out, "gap_stats.txt", "count=0\n")
        print("no gaps found; no histogram written")
        return EXIT_OK
    stats = gapmod.summarize_gaps(found)
    _write(out, "gap_stats.txt", stats.to_text())
    _write(out, "histogram_log10.csv", gapmod.gap_histogram(found, "log10", cfg.bins).to_csv())
    _write(out, "histogram_zoom.csv", gapmod.gap_histogram(found, "linear", cfg.bins, zoom=True).to_csv())
    wells_with = len({g.well_id for g in found})
    print(f"{stats.count} gaps in {wells_with} of {len(data)} well(s)")
    print(stats.to_text(), end="")
    return EXIT_OK


def cmd_bench(cfg: RunConfig) -> int:
    if not cfg.inputs:
        cfg.inputs = [BUNDLED]
    data = _load_inputs(cfg)
    plan = cfg.plan()
    params = cfg.model_params(cfg.models)
    result = evaluate.run_benchmark(data, plan, params, seed=cfg.seed)
    evaluate.write_outputs(result, cfg.out)
    well = data.well(result.well_id)
    _write(cfg.out, "trials.csv", synth.trials_to_csv(synth.generate_trials(well, plan)))
    _write(cfg.out, "effective_config.txt", cfg.to_text())
    ok = [r for r in result.records if r.ok]
    for row in evaluate.summarize(ok) if ok else []:
        print(f"{row.model:7s} size={row.gap_size:4d} median_mae={row.median:.4f} mean_mae={row.mean:.4f}")
    if result.failures:
        print(f"{len(result.failures)} benchmark cell(s) failed; see results.csv", file=sys.stderr)
        return EXIT_CELL_FAILURES
    return EXIT_OK


def modal_step(raw_depths) -> float:
    steps = np.round(np.diff(raw_depths), 6)
    values, counts = np.unique(steps, return_counts=True)
    return float(values[np.argmax(counts)])


def fill_grid(gap: gapmod.Gap, step: float) -> np.ndarray:
    """Grid depths strictly inside *gap* at multiples of *step* from its top."""
    k = np.arange(1, int(np.ceil(gap.length / step)) + 1)
    grid = np.round(gap.depth_before + k * step, 6)
    return grid[grid < gap.depth_after - gapmod.DEPTH_TOLERANCE]


def cmd_fill(cfg: RunConfig) -> int:
    data = _load_inputs(cfg)
    if cfg.well:
        well = data.well(cfg.well)
    elif len(data) == 1:
        well = data.wells[0]
    else:
        raise WellGapError("dataset has several wells; pass --well")
    out = cfg.out
    _write(out, "effective_config.txt", cfg.to_text())
    found = gapmod.detect_gaps(well, cfg.threshold)
    step = modal_step(well.raw_depths) if len(well) > 1 else gapmod.NOMINAL_STEP
    header = f"depth,{cfg.target}\n"
    if not found:
        _write(out, "fill.csv", header)
        _write(out, "fill_meta.txt", f"well={well.well_id}\nstep={step!r}\ngaps=0\npoints=0\n")
        print(f"well {well.well_id} has no gaps; nothing to fill")
        return EXIT_OK

    names = [c for c in cfg.features if np.ptp(well.curve(c)) > 0]
    if not names:
        raise WellGapError("no informative feature curves in this well")
    X = synth.feature_matrix(well, names)
    y = well.curve(cfg.target)
    name = canonical_name(cfg.fill_model)
    reg = Regressor(name, **cfg.overrides.get(name, {})).fit(X, y, seed=cfg.seed)

    depths = np.concatenate([fill_grid(g, step) for g in found])
    # feature values inside a gap are linear interpolations of the bounding records
    Xq = np.column_stack([np.interp(depths, well.raw_depths, well.curve(c)) for c in names])
    pred = reg.predict(Xq) if depths.size else np.empty(0)
    lines = [header] + [f"{d!r},{p!r}\n" for d, p in zip(depths.tolist(), pred.tolist())]
    _write(out, "fill.csv", "".join(lines))
    _write(out, "fill_meta.txt",
           f"well={well.well_id}\nmodel={name}\nstep={step!r}\ngaps={len(found)}\npoints={depths.size}\n")
    print(f"filled {depths.size} point(s) across {len(found)} gap(s) in well {well.well_id}")
    return EXIT_OK


COMMANDS = {"ingest": cmd_ingest, "gaps": cmd_gaps, "bench": cmd_bench, "fill": cmd_fill}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="master seed (default 0)")
    common.add_argument("--out", help="output directory (default wellgap_out)")
    common.add_argument("--config", help="key=value config file, e.g. a previous effective_config.txt")
    mode = common.add_mutually_exclusive_group()
    mode.add_argument("--strict", dest="mode", action="store_const", const="strict",
                      help="out-of-range values are errors (default)")
    mode.add_argument("--lenient", dest="mode", action="store_const", const="lenient",
                      help="clamp out-of-range values with a warning")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="wellgap", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", parents=[common], help="parse CSV/LAS files into a canonical dataset")
    p.add_argument("inputs", nargs="*")
    p.add_argument("--null-value", type=float)
    p.add_argument("--no-normalize", dest="normalize", action="store_const", const=False)

    p = sub.add_parser("gaps", parents=[common], help="detect gaps and write census statistics")
    p.add_argument("inputs", nargs="*")
    p.add_argument("--threshold", type=float)
    p.add_argument("--bins", type=int)

    p = sub.add_parser("bench", parents=[common], help="run the synthetic-gap regression benchmark")
    p.add_argument("inputs", nargs="*", help="dataset file(s); default: the bundled synthetic well")
    p.add_argument("--well")
    p.add_argument("--models", help="comma-separated subset of " + ",".join(MODEL_NAMES))
    p.add_argument("--sizes", help="comma-separated gap sizes in points")
    p.add_argument("--trials", type=int)
    p.add_argument("--target")
    p.add_argument("--features")
    p.add_argument("--set", action="append", default=[], metavar="model.NAME.PARAM=VALUE")

    p = sub.add_parser("fill", parents=[common], help="impute the target curve inside real gaps")
    p.add_argument("inputs", nargs="*")
    p.add_argument("--well")
    p.add_argument("--model", dest="fill_model")
    p.add_argument("--threshold", type=float)
    p.add_argument("--features")
    p.add_argument("--set", action="append", default=[], metavar="model.NAME.PARAM=VALUE")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        cfg.load(args.config)
    cfg.command = args.command
    if args.inputs:
        cfg.inputs = list(args.inputs)
    simple = {"seed", "out", "mode", "null_value", "normalize", "threshold", "bins", "well",
              "trials", "target", "fill_model"}
    for key in simple:
        value = getattr(args, key, None)
        if value is not None:
            setattr(cfg, key, value)
    for key in ("sizes", "features", "models"):
        value = getattr(args, key, None)
        if value is not None:
            cfg.update(key, value)
    for item in getattr(args, "set", []):
        key, sep, value = item.partition("=")
        if not sep:
            raise WellGapError(f"--set expects model.NAME.PARAM=VALUE, got {item!r}")
        cfg.update(key, value)
    return cfg


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
        return COMMANDS[cfg.command](cfg)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except WellGapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAMETER
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
