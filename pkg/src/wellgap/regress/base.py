"""Shared input checks and the fitted-state base class."""

from __future__ import annotations

import numpy as np

from ..errors import InsufficientDataError, NumericInstabilityError, ShapeError, UnfittedError


class RankDeficiencyWarning(UserWarning):
    pass


def check_xy(X, y, min_rows: int = 1):
    X = np.ascontiguousarray(X, dtype=float)
    y = np.ascontiguousarray(y, dtype=float)
    if X.ndim != 2:
        raise ShapeError(f"X must be 2-D, got shape {X.shape}")
    if y.ndim != 1 or y.shape[0] != X.shape[0]:
        raise ShapeError(f"y must be 1-D with {X.shape[0]} rows, got shape {y.shape}")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise ShapeError("X and y must be finite")
    if X.shape[0] < min_rows:
        raise InsufficientDataError(f"need at least {min_rows} rows, got {X.shape[0]}")
    return X, y


class FittedState:
    """Base for the per-model fitted states.

    Subclasses set ``name`` and ``n_features`` and implement ``_predict``.
    """

    name = "?"
    n_features: int

    def predict(self, X) -> np.ndarray:
        X = np.ascontiguousarray(X, dtype=float)
        if X.ndim == 1:
            X = X.reshape(1, -1)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise ShapeError(
                f"{self.name} was fitted on {self.n_features} features, got X of shape {X.shape}"
            )
        out = np.asarray(self._predict(X), dtype=float)
        if not np.all(np.isfinite(out)):
            raise NumericInstabilityError(f"{self.name} produced non-finite predictions")
        return out

    def _predict(self, X):
        raise NotImplementedError


def predict(state, X) -> np.ndarray:
    if state is None:
        raise UnfittedError("model has not been fitted")
    return state.predict(X)
