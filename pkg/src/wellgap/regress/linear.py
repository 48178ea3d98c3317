"""Linear backends: ordinary least squares, Bayesian ridge and RANSAC."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from ..errors import InsufficientDataError, NoConsensusError, NumericInstabilityError, ParameterError
from .base import FittedState, RankDeficiencyWarning, check_xy


@dataclass(frozen=True, eq=False)
class OlsState(FittedState):
    weights: np.ndarray
    intercept: float
    rank: int = -1
    name = "OLS"

    @property
    def n_features(self):
        return self.weights.shape[0]

    def _predict(self, X):
        return X @ self.weights + self.intercept


def ols_fit(X, y) -> OlsState:
    """Least squares with an intercept.

    Solved on centred data through a complete orthogonal factorization
    (QR with column pivoting), which yields the minimum-norm solution when
    the design is rank deficient.
    """
    X, y = check_xy(X, y)
    n, p = X.shape
    if n < p + 1:
        raise InsufficientDataError(f"OLS needs at least {p + 1} rows for {p} features, got {n}")
    x_mean = X.mean(axis=0)
    y_mean = y.mean()
    cond = np.finfo(float).eps * max(n, p)
    w, _, rank, _ = scipy.linalg.lstsq(X - x_mean, y - y_mean, cond=cond, lapack_driver="gelsy")
    if rank < p:
        warnings.warn(f"design matrix has rank {rank} < {p}; using the minimum-norm solution",
                      RankDeficiencyWarning, stacklevel=2)
    return OlsState(np.asarray(w, dtype=float), float(y_mean - x_mean @ w), int(rank))


@dataclass(frozen=True, eq=False)
class BrrState(FittedState):
    weights: np.ndarray
    intercept: float
    alpha: float
    lambda_: float
    iterations_run: int
    name = "BRR"

    @property
    def n_features(self):
        return self.weights.shape[0]

    def _predict(self, X):
        return X @ self.weights + self.intercept


def brr_fit(X, y, prior_a=1e-6, prior_b=1e-6, max_iter=300, tol=1e-3,
            alpha_init=None, lambda_init=1.0) -> BrrState:
    """Bayesian ridge regression by evidence maximization.

    ``alpha`` is the noise precision and ``lambda_`` the weight precision;
    both carry Gamma(prior_a, prior_b) hyperpriors. Each round computes the
    posterior mean ``alpha * S @ X.T @ y`` with
    ``S = inv(lambda_ * I + alpha * X.T @ X)`` on centred data, then updates::

        gamma   = sum(alpha * e / (lambda_ + alpha * e))   # e: eigvals of X.T X
        lambda_ = (gamma + 2a) / (|m|^2 + 2b)
        alpha   = (n - gamma + 2a) / (|y - X m|^2 + 2b)

    and stops once no weight moved by ``tol`` or more. The returned weights
    are the posterior mean under the final precisions.
    """
    X, y = check_xy(X, y, min_rows=2)
    n, p = X.shape
    if max_iter < 1:
        raise ParameterError("max_iter must be >= 1")
    x_mean = X.mean(axis=0)
    y_mean = y.mean()
    Xc = X - x_mean
    yc = y - y_mean

    U, s, Vt = np.linalg.svd(Xc, full_matrices=False)
    eig = s**2
    Uty = U.T @ yc
    alpha = 1.0 / (np.var(y) + np.finfo(float).eps) if alpha_init is None else float(alpha_init)
    lam = float(lambda_init)

    def posterior_mean(alpha, lam):
        return Vt.T @ (s * Uty / (eig + lam / alpha))

    coef_old = None
    it = 0
    for it in range(1, max_iter + 1):
        coef = posterior_mean(alpha, lam)
        rss = float(np.sum((yc - Xc @ coef) ** 2))
        gamma = float(np.sum(alpha * eig / (lam + alpha * eig)))
        lam = (gamma + 2 * prior_a) / (float(np.sum(coef**2)) + 2 * prior_b)
        alpha = (n - gamma + 2 * prior_a) / (rss + 2 * prior_b)
        if not (np.isfinite(lam) and np.isfinite(alpha) and lam > 0 and alpha > 0
                and np.all(np.isfinite(coef))):
            raise NumericInstabilityError(f"BRR precisions became invalid at iteration {it}")
        if coef_old is not None and np.max(np.abs(coef - coef_old), initial=0.0) < tol:
            break
        coef_old = coef

    coef = posterior_mean(alpha, lam)
    if not np.all(np.isfinite(coef)):
        raise NumericInstabilityError("BRR posterior mean is not finite")
    return BrrState(coef, float(y_mean - x_mean @ coef), float(alpha), float(lam), it)


@dataclass(frozen=True, eq=False)
class RansacState(FittedState):
    base: OlsState
    inlier_mask: np.ndarray
    residual_threshold: float
    trials_run: int
    name = "RANSAC"

    @property
    def n_features(self):
        return self.base.n_features

    def _predict(self, X):
        return self.base._predict(X)


def _quiet_ols(X, y):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RankDeficiencyWarning)
        return ols_fit(X, y)


def ransac_fit(X, y, min_samples=None, residual_threshold=None, max_trials=100, seed=0,
               max_refits=10) -> RansacState:
    """Random sample consensus around OLS.

    Each trial fits OLS to ``min_samples`` rows drawn without replacement and
    counts rows with ``|residual| <= residual_threshold``; the largest
    consensus set wins, ties going to the smaller inlier residual sum. The
    winner is refitted on its inliers until the inlier set stops changing,
    and the reported mask is taken under the final model. The default
    threshold is the median absolute deviation of ``y``, floored at
    ``1e-9 * max(1, max|y|)`` so exact fits survive float round-off when
    more than half of ``y`` is one value.
    """
    X, y = check_xy(X, y)
    n, p = X.shape
    ms = p + 1 if min_samples is None else int(min_samples)
    if ms < p + 1:
        raise ParameterError(f"min_samples must be >= {p + 1} for {p} features")
    if n < ms:
        raise InsufficientDataError(f"RANSAC needs at least {ms} rows, got {n}")
    if residual_threshold is None:
        mad = float(np.median(np.abs(y - np.median(y))))
        residual_threshold = max(mad, 1e-9 * max(1.0, float(np.max(np.abs(y)))))
    thr = float(residual_threshold)
    rng = np.random.default_rng(seed)

    best = None
    trials = 0
    for _ in range(max_trials):
        trials += 1
        sample = np.arange(n) if n == ms else rng.choice(n, ms, replace=False)
        cand = _quiet_ols(X[sample], y[sample])
        res = np.abs(y - cand._predict(X))
        mask = res <= thr
        count = int(mask.sum())
        rsum = float(res[mask].sum())
        if count >= ms and (best is None or count > best[0] or (count == best[0] and rsum < best[1])):
            best = (count, rsum, mask)
        if n == ms:
            break
    if best is None:
        raise NoConsensusError(f"no sample reached {ms} inliers in {trials} trials")

    mask = best[2]
    for _ in range(max_refits):
        model = _quiet_ols(X[mask], y[mask])
        new_mask = np.abs(y - model._predict(X)) <= thr
        if np.array_equal(new_mask, mask) or new_mask.sum() < ms:
            break
        mask = new_mask
    final_mask = np.abs(y - model._predict(X)) <= thr
    if final_mask.sum() < ms:
        raise NoConsensusError("refitted model keeps fewer than min_samples inliers")
    return RansacState(model, final_mask, thr, trials)
