"""One-hidden-layer perceptron trained with Adam on mean squared error."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import NumericInstabilityError, ParameterError
from .base import FittedState, check_xy

PARAM_NAMES = ("W1", "b1", "W2", "b2")


def init_params(n_features, hidden, rng):
    """Glorot-uniform weights and biases, each layer bounded by its fan-in + fan-out."""
    params = {}
    for layer, (fan_in, fan_out) in enumerate(((n_features, hidden), (hidden, 1)), 1):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        params[f"W{layer}"] = rng.uniform(-limit, limit, size=(fan_in, fan_out))
        params[f"b{layer}"] = rng.uniform(-limit, limit, size=fan_out)
    return params


def forward(params, X):
    z = X @ params["W1"] + params["b1"]
    a = np.maximum(z, 0.0)
    out = a @ params["W2"] + params["b2"]
    return out[:, 0], (z, a)


def loss_and_grad(params, X, y):
    """MSE loss ``mean((f(X) - y)^2)`` and its gradient for every parameter."""
    out, (z, a) = forward(params, X)
    m = X.shape[0]
    err = out - y
    loss = float(np.mean(err**2))
    d_out = (2.0 / m) * err[:, None]
    d_a = d_out @ params["W2"].T
    d_z = d_a * (z > 0)
    grads = {
        "W2": a.T @ d_out,
        "b2": d_out.sum(axis=0),
        "W1": X.T @ d_z,
        "b1": d_z.sum(axis=0),
    }
    return loss, grads


@dataclass(frozen=True, eq=False)
class MlpState(FittedState):
    params: dict
    loss_trace: np.ndarray
    name = "ANN"

    @property
    def n_features(self):
        return self.params["W1"].shape[0]

    @property
    def layer_sizes(self):
        return (self.params["W1"].shape[0], self.params["W1"].shape[1], 1)

    def _predict(self, X):
        return forward(self.params, X)[0]


def mlp_fit(X, y, hidden=100, epochs=200, batch=200, step=1e-3, beta1=0.9, beta2=0.999,
            epsilon=1e-8, seed=0) -> MlpState:
    X, y = check_xy(X, y, min_rows=2)
    n, p = X.shape
    if hidden < 1 or epochs < 1 or batch < 1:
        raise ParameterError("hidden, epochs and batch must all be >= 1")
    batch = min(int(batch), n)
    rng = np.random.default_rng(seed)
    params = init_params(p, int(hidden), rng)
    m1 = {k: np.zeros_like(v) for k, v in params.items()}
    m2 = {k: np.zeros_like(v) for k, v in params.items()}
    t = 0
    trace = np.empty(epochs)
    for epoch in range(epochs):
        perm = rng.permutation(n)
        for start in range(0, n, batch):
            rows = perm[start : start + batch]
            _, grads = loss_and_grad(params, X[rows], y[rows])
            t += 1
            corr1 = 1.0 - beta1**t
            corr2 = 1.0 - beta2**t
            for k in PARAM_NAMES:
                g = grads[k]
                m1[k] = beta1 * m1[k] + (1.0 - beta1) * g
                m2[k] = beta2 * m2[k] + (1.0 - beta2) * g * g
                params[k] = params[k] - step * (m1[k] / corr1) / (np.sqrt(m2[k] / corr2) + epsilon)
        out, _ = forward(params, X)
        loss = float(np.mean((out - y) ** 2))
        if not np.isfinite(loss):
            raise NumericInstabilityError(f"MLP loss became NaN at epoch {epoch + 1}")
        trace[epoch] = loss
    return MlpState(params, trace)
