"""Pure numpy reference implementations of the hot kernels."""

import numpy as np


def monomials(X, E):
    """Monomial table ``M[j, t] = prod_i X[j, i] ** E[t, i]``.

    Parameters
    ----------
    X : (N, n) float64 array of points
    E : (T, n) int64 array of exponents

    Returns
    -------
    (N, T) float64 array
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    E = np.ascontiguousarray(E, dtype=np.int64)
    N, n = X.shape
    T = E.shape[0]
    out = np.ones((N, T))
    for i in range(n):
        col = E[:, i]
        kmax = int(col.max()) if T else 0
        if kmax == 0:
            continue
        # powers table avoids repeated pow calls
        pw = np.ones((N, kmax + 1))
        for k in range(1, kmax + 1):
            pw[:, k] = pw[:, k - 1] * X[:, i]
        out *= pw[:, col]
    return out


def ordered_product(mats):
    """``mats[N-1] @ ... @ mats[1] @ mats[0]`` for an (N, k, k) stack."""
    mats = np.asarray(mats, dtype=np.complex128)
    N, k, _ = mats.shape
    out = np.eye(k, dtype=np.complex128)
    for j in range(N):
        out = mats[j] @ out
    return out


def tri_sums(vals, weights):
    """Weighted sum ``sum_t sum_q weights[t, q] * vals[t, q]`` in a fixed order."""
    vals = np.asarray(vals, dtype=np.complex128)
    weights = np.asarray(weights, dtype=np.float64)
    acc = 0j
    for t in range(vals.shape[0]):
        s = 0j
        for q in range(vals.shape[1]):
            s += weights[t, q] * vals[t, q]
        acc += s
    return acc
