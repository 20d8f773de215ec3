"""Double-precision evaluation of exact polynomial objects on sample arrays."""

from functools import lru_cache
from itertools import permutations

import numpy as np

from . import kernels
from .exterior.forms import perm_sign


class CompiledPoly:
    """Exponent table and complex coefficients of a Poly."""

    __slots__ = ("n", "E", "c")

    def __init__(self, n, E, c):
        self.n = n
        self.E = E
        self.c = c


@lru_cache(maxsize=4096)
def compile_poly(p):
    items = p.sorted_terms()
    E = np.array([e for e, _ in items], dtype=np.int64).reshape(len(items), p.n)
    c = np.array([complex(s) for _, s in items], dtype=np.complex128)
    return CompiledPoly(p.n, E, c)


def eval_compiled(cp, X):
    """Evaluate a compiled polynomial at the rows of ``X`` (N, n)."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if cp.c.size == 0:
        return np.zeros(X.shape[0], dtype=np.complex128)
    return kernels.monomials(X, cp.E) @ cp.c


def eval_poly(p, X):
    return eval_compiled(compile_poly(p), X)


@lru_cache(maxsize=1024)
def compile_form(a):
    return tuple((idx, compile_poly(p)) for idx, p in a.sorted_terms())


def _det_columns(cols):
    """Determinant of a stack of p x p matrices given as p column lists.

    ``cols[k][r]`` is an (N,) array.  Uses the Leibniz expansion so that
    small degrees stay cheap and deterministic.
    """
    p = len(cols)
    if p == 0:
        return 1.0
    if p == 1:
        return cols[0][0]
    if p == 2:
        return cols[0][0] * cols[1][1] - cols[1][0] * cols[0][1]
    total = 0
    for perm in permutations(range(p)):
        t = perm_sign(perm)
        for r, c in enumerate(perm):
            t = t * cols[c][r]
        total = total + t
    return total


def eval_form(a, X, vectors=()):
    """``a_{X_j}(V_1[j], ..., V_p[j])`` for every sample row j.

    Parameters
    ----------
    a : PolyForm
    X : (N, n) array of base points
    vectors : sequence of p arrays of shape (N, n), real or complex
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    vectors = [np.asarray(v) for v in vectors]
    out = np.zeros(X.shape[0], dtype=np.complex128)
    for idx, cp in compile_form(a):
        cols = [[v[:, i] for i in idx] for v in vectors]
        out = out + eval_compiled(cp, X) * _det_columns(cols)
    return out


def eval_vf(V, X):
    """Vector field samples, shape (N, n), complex."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    return np.stack([eval_poly(c, X) for c in V.comps], axis=1)
