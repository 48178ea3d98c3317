"""Five regression backends behind one fit/predict contract.

>>> reg = make_regressor("OLS")
>>> reg.fit([[0.0], [1.0], [2.0]], [1.0, 3.0, 5.0]).predict([[3.0]])
array([7.])
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from ..errors import FormatError, ParameterError, UnfittedError
from .base import FittedState, RankDeficiencyWarning, predict
from .forest import KERNEL, ForestState, Tree, grow_tree, rf_fit
from .linear import BrrState, OlsState, RansacState, brr_fit, ols_fit, ransac_fit
from .mlp import MlpState, mlp_fit

MODEL_NAMES = ("OLS", "BRR", "RANSAC", "RF", "ANN")

DEFAULTS: dict[str, dict[str, Any]] = {
    "OLS": {},
    "BRR": {"prior_a": 1e-6, "prior_b": 1e-6, "max_iter": 300, "tol": 1e-3,
            "alpha_init": None, "lambda_init": 1.0},
    "RANSAC": {"min_samples": None, "residual_threshold": None, "max_trials": 100},
    "RF": {"n_trees": 100, "max_depth": None, "min_samples_leaf": 1, "max_features": None,
           "bootstrap": True},
    "ANN": {"hidden": 100, "epochs": 200, "batch": 200, "step": 1e-3, "beta1": 0.9,
            "beta2": 0.999, "epsilon": 1e-8},
}

_FITTERS = {"OLS": ols_fit, "BRR": brr_fit, "RANSAC": ransac_fit, "RF": rf_fit, "ANN": mlp_fit}
_SEEDED = {"RANSAC", "RF", "ANN"}


def canonical_name(name: str) -> str:
    key = name.strip().upper()
    if key == "MLP":
        key = "ANN"
    if key not in MODEL_NAMES:
        raise ParameterError(f"unknown model {name!r}; choose from {', '.join(MODEL_NAMES)}")
    return key


class Regressor:
    """A named backend with its hyperparameters and, after :meth:`fit`, its state."""

    def __init__(self, name: str, **params):
        self.name = canonical_name(name)
        unknown = set(params) - set(DEFAULTS[self.name])
        if unknown:
            raise ParameterError(f"unknown {self.name} hyperparameters: {sorted(unknown)}")
        self.params = {**DEFAULTS[self.name], **params}
        self.state_: FittedState | None = None

    def __repr__(self):
        return f"Regressor({self.name!r}, {self.params})"

    def fit(self, X, y, seed: int = 0) -> "Regressor":
        kwargs = dict(self.params)
        if self.name in _SEEDED:
            kwargs["seed"] = seed
        self.state_ = _FITTERS[self.name](X, y, **kwargs)
        return self

    def predict(self, X) -> np.ndarray:
        if self.state_ is None:
            raise UnfittedError(f"{self.name} must be fitted before predict")
        return self.state_.predict(X)


def make_regressor(name: str, **params) -> Regressor:
    return Regressor(name, **params)


# ----------------------------------------------------------- serialization
#
# A fitted state is stored as an .npz archive holding a "header" JSON
# string ({"format": "wellgap-model", "version": 1, "model": NAME, ...})
# plus the model arrays:
#   OLS/BRR/RANSAC  weights, intercept (RANSAC also inlier_mask)
#   RF              node arrays of all trees concatenated, tree_offsets
#   ANN             W1, b1, W2, b2, loss_trace

FORMAT_VERSION = 1


def save_state(state: FittedState, dest) -> None:
    header = {"format": "wellgap-model", "version": FORMAT_VERSION, "model": state.name}
    arrays: dict[str, np.ndarray] = {}
    if isinstance(state, (OlsState, BrrState)):
        arrays["weights"] = state.weights
        arrays["intercept"] = np.array([state.intercept])
        if isinstance(state, BrrState):
            header.update(alpha=state.alpha, lambda_=state.lambda_, iterations_run=state.iterations_run)
        else:
            header["rank"] = state.rank
    elif isinstance(state, RansacState):
        arrays["weights"] = state.base.weights
        arrays["intercept"] = np.array([state.base.intercept])
        arrays["inlier_mask"] = state.inlier_mask
        header.update(residual_threshold=state.residual_threshold, trials_run=state.trials_run)
    elif isinstance(state, ForestState):
        offsets = np.cumsum([0] + [t.node_count for t in state.trees])
        for field in ("feature", "threshold", "left", "right", "value"):
            arrays[field] = np.concatenate([getattr(t, field) for t in state.trees])
        arrays["tree_offsets"] = offsets
        arrays["bootstrap_seeds"] = state.bootstrap_seeds
        header["n_features"] = state.n_features
    elif isinstance(state, MlpState):
        arrays.update(state.params)
        arrays["loss_trace"] = state.loss_trace
    else:
        raise ParameterError(f"cannot serialize {type(state).__name__}")
    np.savez(dest, header=np.array(json.dumps(header)), **arrays)


def load_state(source) -> FittedState:
    with np.load(source, allow_pickle=False) as z:
        header = json.loads(str(z["header"]))
        data = {k: z[k] for k in z.files if k != "header"}
    if header.get("format") != "wellgap-model" or header.get("version") != FORMAT_VERSION:
        raise FormatError(f"unsupported model file header: {header}")
    model = header["model"]
    if model in ("OLS", "BRR", "RANSAC"):
        w, b = data["weights"], float(data["intercept"][0])
        if model == "OLS":
            return OlsState(w, b, header["rank"])
        if model == "BRR":
            return BrrState(w, b, header["alpha"], header["lambda_"], header["iterations_run"])
        return RansacState(OlsState(w, b), data["inlier_mask"], header["residual_threshold"],
                           header["trials_run"])
    if model == "RF":
        off = data["tree_offsets"]
        trees = tuple(
            Tree(*(data[f][off[i]:off[i + 1]] for f in ("feature", "threshold", "left", "right", "value")))
            for i in range(len(off) - 1)
        )
        return ForestState(trees, data["bootstrap_seeds"], header["n_features"])
    if model == "ANN":
        return MlpState({k: data[k] for k in ("W1", "b1", "W2", "b2")}, data["loss_trace"])
    raise FormatError(f"unknown model {model!r} in model file")


__all__ = [
    "KERNEL", "MODEL_NAMES", "DEFAULTS", "Regressor", "make_regressor", "canonical_name",
    "predict", "save_state", "load_state", "RankDeficiencyWarning",
    "ols_fit", "brr_fit", "ransac_fit", "rf_fit", "mlp_fit", "grow_tree",
    "OlsState", "BrrState", "RansacState", "ForestState", "MlpState", "Tree",
]
