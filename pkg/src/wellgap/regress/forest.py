"""Random forest of CART regression trees.

Tree growth runs in the compiled ``_tree`` extension when it is importable
and falls back to the numpy port in ``_tree_py`` otherwise. Set
``WELLGAP_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from ..errors import ParameterError
from .base import FittedState, check_xy

if os.environ.get("WELLGAP_PURE_PYTHON"):
    from . import _tree_py as _kernel
    KERNEL = "python"
else:
    try:
        from . import _tree as _kernel
        KERNEL = "cython"
    except ImportError:  # extension not built
        from . import _tree_py as _kernel
        KERNEL = "python"


@dataclass(frozen=True, eq=False)
class Tree:
    """Flat array tree; ``feature[i] == -1`` marks a leaf holding ``value[i]``."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    @property
    def node_count(self) -> int:
        return self.feature.shape[0]

    def predict(self, X, kernel=None) -> np.ndarray:
        k = kernel or _kernel
        return k.predict_tree(self.feature, self.threshold, self.left, self.right, self.value,
                              np.ascontiguousarray(X, dtype=float))


def grow_tree(X, y, max_depth=None, min_samples_leaf=1, max_features=None, seed=0, kernel=None) -> Tree:
    X, y = check_xy(X, y, min_rows=1)
    p = X.shape[1]
    if min_samples_leaf < 1:
        raise ParameterError("min_samples_leaf must be >= 1")
    mf = p if max_features is None else int(max_features)
    if not 1 <= mf <= p:
        raise ParameterError(f"max_features must be in [1, {p}]")
    md = -1 if max_depth is None else int(max_depth)
    order = np.ascontiguousarray(np.argsort(X, axis=0, kind="stable").T, dtype=np.int64)
    k = kernel or _kernel
    arrays = k.build_tree(X, y, order, md, int(min_samples_leaf), mf, np.uint64(seed))
    return Tree(*arrays)


@dataclass(frozen=True, eq=False)
class ForestState(FittedState):
    trees: tuple
    bootstrap_seeds: np.ndarray
    n_features_: int
    name = "RF"

    @property
    def n_features(self):
        return self.n_features_

    def tree_predictions(self, X) -> np.ndarray:
        X = np.ascontiguousarray(X, dtype=float)
        return np.stack([t.predict(X) for t in self.trees])

    def _predict(self, X):
        # mean taken as offsets from the first tree, so agreeing trees give
        # their common value exactly
        first = self.trees[0].predict(X)
        total = np.zeros(X.shape[0])
        for t in self.trees[1:]:
            total += t.predict(X) - first
        return first + total / len(self.trees)


def rf_fit(X, y, n_trees=100, max_depth=None, min_samples_leaf=1, max_features=None,
           bootstrap=True, seed=0, kernel=None) -> ForestState:
    """Bagged regression trees; each tree sees a bootstrap resample of n rows.

    Splits minimize the summed squared error of the two children over all
    midpoints between consecutive distinct feature values; ties go to the
    lowest feature index, then the lowest threshold.
    """
    X, y = check_xy(X, y, min_rows=2)
    n = X.shape[0]
    if n_trees < 1:
        raise ParameterError("n_trees must be >= 1")
    seeds = np.random.SeedSequence(int(seed)).generate_state(int(n_trees), dtype=np.uint64)
    trees = []
    for s in seeds:
        if bootstrap:
            idx = np.random.default_rng(int(s)).integers(0, n, n)
            Xb, yb = X[idx], y[idx]
        else:
            Xb, yb = X, y
        trees.append(grow_tree(Xb, yb, max_depth, min_samples_leaf, max_features, int(s), kernel))
    return ForestState(tuple(trees), seeds, X.shape[1])
