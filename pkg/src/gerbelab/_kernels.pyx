# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled versions of the hot numeric kernels."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def monomials(X, E):
    """Monomial table ``M[j, t] = prod_i X[j, i] ** E[t, i]``."""
    cdef double[:, ::1] x = np.ascontiguousarray(X, dtype=np.float64)
    cdef long long[:, ::1] e = np.ascontiguousarray(E, dtype=np.int64)
    cdef Py_ssize_t N = x.shape[0], n = x.shape[1], T = e.shape[0]
    out_arr = np.ones((N, T), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t j, t, i, k
    cdef double v, p
    for j in range(N):
        for t in range(T):
            p = 1.0
            for i in range(n):
                v = x[j, i]
                for k in range(e[t, i]):
                    p *= v
            out[j, t] = p
    return out_arr


def ordered_product(mats):
    """``mats[N-1] @ ... @ mats[0]`` for an (N, k, k) complex stack."""
    cdef double complex[:, :, ::1] m = np.ascontiguousarray(mats, dtype=np.complex128)
    cdef Py_ssize_t N = m.shape[0], K = m.shape[1]
    acc_arr = np.eye(K, dtype=np.complex128)
    tmp_arr = np.empty((K, K), dtype=np.complex128)
    cdef double complex[:, ::1] acc = acc_arr
    cdef double complex[:, ::1] tmp = tmp_arr
    cdef Py_ssize_t j, r, c, q
    cdef double complex s
    for j in range(N):
        for r in range(K):
            for c in range(K):
                s = 0
                for q in range(K):
                    s = s + m[j, r, q] * acc[q, c]
                tmp[r, c] = s
        for r in range(K):
            for c in range(K):
                acc[r, c] = tmp[r, c]
    return acc_arr


def tri_sums(vals, weights):
    """Weighted sum over triangles and quadrature points in a fixed order."""
    cdef double complex[:, ::1] v = np.ascontiguousarray(vals, dtype=np.complex128)
    cdef double[:, ::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef Py_ssize_t T = v.shape[0], Q = v.shape[1], t, q
    cdef double complex acc = 0, s
    for t in range(T):
        s = 0
        for q in range(Q):
            s = s + w[t, q] * v[t, q]
        acc = acc + s
    return complex(acc)
