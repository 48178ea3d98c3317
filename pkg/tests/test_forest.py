import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wellgap.errors import ParameterError
from wellgap.regress import forest, grow_tree, rf_fit
from wellgap.regress import _tree_py


def exhaustive_tree(xs, ys):
    """Best split by enumerating every midpoint, sums of squares in exact arithmetic."""
    ys_f = [Fraction(v) for v in ys]
    mean = sum(ys_f) / len(ys_f)
    if len(set(ys)) == 1:
        return ("leaf", float(mean))
    cands = sorted(set(xs))
    best = None
    for a, b in zip(cands, cands[1:]):
        thr = (Fraction(a) + Fraction(b)) / 2
        left = [y for x, y in zip(xs, ys_f) if x <= thr]
        right = [y for x, y in zip(xs, ys_f) if x > thr]
        sse = sum((y - sum(left) / len(left)) ** 2 for y in left) + \
            sum((y - sum(right) / len(right)) ** 2 for y in right)
        if best is None or sse < best[0]:
            best = (sse, thr)
    if best is None:
        return ("leaf", float(mean))
    thr = best[1]
    L = [(x, y) for x, y in zip(xs, ys) if x <= thr]
    R = [(x, y) for x, y in zip(xs, ys) if x > thr]
    return ("split", float(thr), exhaustive_tree(*zip(*L)), exhaustive_tree(*zip(*R)))


def as_nested(tree, node=0):
    if tree.feature[node] < 0:
        return ("leaf", float(tree.value[node]))
    return ("split", float(tree.threshold[node]), as_nested(tree, tree.left[node]),
            as_nested(tree, tree.right[node]))


FOUR_POINT = [
    ([1, 2, 3, 4], [1, 2, 10, 11]),
    ([1, 2, 3, 4], [0, 1, 1, 0]),
    ([4, 1, 3, 2], [5, 0, 5, 1]),
    ([1, 1, 2, 3], [1, 3, 2, 2]),
    ([0.5, 0.25, 1.0, 0.75], [0.2, 0.9, 0.4, 0.1]),
]


@pytest.mark.parametrize("xs,ys", FOUR_POINT)
def test_single_tree_matches_exhaustive_oracle(xs, ys):
    X = np.array(xs, dtype=float)[:, None]
    tree = rf_fit(X, ys, n_trees=1, bootstrap=False).trees[0]
    assert as_nested(tree) == exhaustive_tree(xs, ys)


def test_all_four_point_orderings():
    ys = [3.0, 1.0, 4.0, 1.5]
    for perm in itertools.permutations(range(4)):
        xs = [float(p + 1) for p in perm]
        tree = grow_tree(np.array(xs)[:, None], ys)
        assert as_nested(tree) == exhaustive_tree(xs, ys)


def test_constant_target():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(50, 3))
    state = rf_fit(X, np.full(50, 0.25), n_trees=10, seed=1)
    np.testing.assert_array_equal(state.predict(rng.normal(size=(5, 3))), np.full(5, 0.25))


def test_forest_is_mean_of_trees():
    rng = np.random.default_rng(1)
    X = rng.uniform(size=(80, 4))
    y = np.sin(6 * X[:, 0]) + X[:, 1]
    state = rf_fit(X, y, n_trees=25, seed=3)
    Xt = rng.uniform(size=(40, 4))
    per_tree = np.array([t.predict(Xt) for t in state.trees])
    np.testing.assert_allclose(state.predict(Xt), per_tree.mean(axis=0), rtol=0, atol=1e-12)
    np.testing.assert_array_equal(state.tree_predictions(Xt), per_tree)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 60), st.sampled_from([None, 1, 2]))
def test_predictions_within_training_range(seed, n, max_features):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, 3))
    y = rng.normal(size=n) * 10
    state = rf_fit(X, y, n_trees=8, seed=seed, max_features=max_features)
    pred = state.predict(rng.normal(size=(30, 3)) * 3)
    assert np.all(pred >= y.min()) and np.all(pred <= y.max())


def test_leaves_hold_training_means():
    rng = np.random.default_rng(2)
    X = rng.uniform(size=(60, 2))
    y = rng.uniform(size=60)
    tree = grow_tree(X, y, max_depth=3, min_samples_leaf=5)
    leaf_of = np.array([_leaf(tree, row) for row in X])
    for leaf in np.unique(leaf_of):
        assert tree.value[leaf] == pytest.approx(y[leaf_of == leaf].mean(), abs=1e-12)
        assert (leaf_of == leaf).sum() >= 5


def _leaf(tree, row):
    node = 0
    while tree.feature[node] >= 0:
        node = tree.left[node] if row[tree.feature[node]] <= tree.threshold[node] else tree.right[node]
    return node


def test_depth_limit():
    rng = np.random.default_rng(3)
    X = rng.uniform(size=(100, 1))
    tree = grow_tree(X, rng.uniform(size=100), max_depth=2)
    assert tree.node_count <= 7


def test_deterministic_given_seed():
    rng = np.random.default_rng(4)
    X = rng.uniform(size=(70, 3))
    y = rng.uniform(size=70)
    a = rf_fit(X, y, n_trees=5, seed=9, max_features=2)
    b = rf_fit(X, y, n_trees=5, seed=9, max_features=2)
    np.testing.assert_array_equal(a.predict(X), b.predict(X))
    np.testing.assert_array_equal(a.bootstrap_seeds, b.bootstrap_seeds)


def test_parameter_errors():
    X = np.ones((5, 2))
    with pytest.raises(ParameterError):
        rf_fit(X, np.arange(5.0), n_trees=0)
    with pytest.raises(ParameterError):
        rf_fit(X, np.arange(5.0), max_features=3)
    with pytest.raises(ParameterError):
        rf_fit(X, np.arange(5.0), min_samples_leaf=0)


@pytest.mark.skipif(forest.KERNEL != "cython", reason="compiled kernel not built")
@pytest.mark.parametrize("max_features", [None, 1, 2])
def test_compiled_kernel_matches_fallback(max_features):
    from wellgap.regress import _tree

    rng = np.random.default_rng(5)
    X = np.round(rng.uniform(size=(300, 4)), 2)  # rounding creates ties
    y = X[:, 0] ** 2 + rng.normal(0, 0.1, 300)
    for seed in range(3):
        a = rf_fit(X, y, n_trees=4, seed=seed, max_features=max_features, kernel=_tree)
        b = rf_fit(X, y, n_trees=4, seed=seed, max_features=max_features, kernel=_tree_py)
        for ta, tb in zip(a.trees, b.trees):
            for field in ("feature", "threshold", "left", "right", "value"):
                np.testing.assert_array_equal(getattr(ta, field), getattr(tb, field))
    np.testing.assert_array_equal(_tree.splitmix64_stream(np.uint64(7), 10),
                                  _tree_py.splitmix64_stream(7, 10))
