"""Time the compiled tree kernel against the numpy fallback.

    python3 benchmarks/bench_tree_kernel.py [--rows 1000] [--trees 20] [--repeat 3]

Both kernels grow identical trees; the script checks that before timing.
"""

import argparse
import time

import numpy as np

from wellgap.regress import _tree_py, rf_fit

try:
    from wellgap.regress import _tree
except ImportError:  # extension not built
    _tree = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rows", type=int, default=1000)
    ap.add_argument("--features", type=int, default=4)
    ap.add_argument("--trees", type=int, default=20)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(0)
    X = rng.uniform(size=(args.rows, args.features))
    y = np.sin(4 * X[:, 0]) + X[:, 1] ** 2 + rng.normal(0, 0.05, args.rows)

    kernels = {"python": _tree_py}
    if _tree is None:
        print("compiled kernel not available; timing the fallback only")
    else:
        kernels["cython"] = _tree
        a = rf_fit(X, y, n_trees=2, kernel=_tree)
        b = rf_fit(X, y, n_trees=2, kernel=_tree_py)
        assert all(np.array_equal(ta.threshold, tb.threshold) for ta, tb in zip(a.trees, b.trees))

    print(f"{args.rows} rows x {args.features} features, {args.trees} trees, best of {args.repeat}")
    results = {}
    for name, k in kernels.items():
        results[name] = best_of(lambda: rf_fit(X, y, n_trees=args.trees, kernel=k), args.repeat)
        print(f"  {name:7s} {results[name]:8.3f} s  ({1e3 * results[name] / args.trees:.2f} ms/tree)")
    if len(results) == 2:
        print(f"  speedup {results['python'] / results['cython']:.1f}x")


if __name__ == "__main__":
    main()
