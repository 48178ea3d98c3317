"""Regenerate the frozen least-squares fixture.

Uses only numpy's SVD-based pseudo-inverse, so it is independent of the
QR-based solver in the package. Run from this directory:

    python3 make_oracles.py
"""

import numpy as np

N_PROBLEMS, N, P = 100, 50, 3


def main():
    rng = np.random.default_rng(20240611)
    X = rng.normal(size=(N_PROBLEMS, N, P))
    true_w = rng.uniform(-3, 3, size=(N_PROBLEMS, P))
    true_b = rng.uniform(-1, 1, size=N_PROBLEMS)
    y = np.einsum("knp,kp->kn", X, true_w) + true_b[:, None] + rng.normal(0, 0.1, size=(N_PROBLEMS, N))
    coef = np.empty((N_PROBLEMS, P + 1))
    for k in range(N_PROBLEMS):
        A = np.column_stack([np.ones(N), X[k]])
        coef[k] = np.linalg.pinv(A) @ y[k]
    np.savez("ols_pinv_oracle.npz", X=X, y=y, intercept=coef[:, 0], weights=coef[:, 1:])


if __name__ == "__main__":
    main()
