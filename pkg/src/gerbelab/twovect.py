"""Morphisms of local gerbes: twisted vector bundles and their 2-morphisms.

Two regimes are covered.

* Constant regime: a morphism ``E : L1 -> L2`` over the gerbes' common
  cover has constant unitary transitions ``alpha_ab`` and per-patch
  matrix connections ``a_a``.  Checks run in complex doubles with
  tolerance ``TAU_U``:

      g2_abc alpha_ab alpha_bc = alpha_ac g1_abc,
      a_b = alpha_ab^{-1} a_a alpha_ab + (A1_ab - A2_ab) 1.

* Model regime on R^3: sections of the trivial gerbe are u(n)-valued
  1-forms ``omega`` with exact coefficients; parallel homomorphisms
  ``f : omega -> eta`` solve ``f omega = eta f + df`` and are found by an
  exact degree-bounded ansatz.
"""

import cmath
from fractions import Fraction

import numpy as np
from scipy.linalg import schur

from .cech import CechCochain
from .errors import (ConnectionFail, DegreeMismatch, DimensionMismatch, GerbeMismatch,
                     IntertwineFail, Mismatch, NonConstantRank, NotNormal, ParallelFail,
                     TwistedCocycleFail, UnitarityFail, XDependence)
from .exterior import Poly, PolyForm, Scalar, exterior_derivative
from .exterior.forms import perm_sign
from .exterior.linalg import nullspace, to_rf
from .gerbe import dual, make_gerbe, tensor

TAU_U = 1e-9
TAU_EIG = 1e-7


# matrix-valued forms with complex coefficients

class MatForm:
    """Matrix-valued polynomial p-form with complex coefficient matrices.

    ``coeffs`` maps ``(idx, exponent)`` to an (r, c) complex array, where
    ``idx`` is an increasing tuple of form indices and ``exponent`` a
    monomial exponent tuple.
    """

    def __init__(self, n, p, shape, coeffs=None):
        self.n = n
        self.p = p
        self.shape = tuple(shape)
        self.coeffs = {}
        for k, M in (coeffs or {}).items():
            M = np.asarray(M, dtype=np.complex128)
            if M.shape != self.shape:
                raise DimensionMismatch(f"coefficient of shape {M.shape}, expected {self.shape}")
            if np.any(M):
                self.coeffs[k] = M

    @classmethod
    def zeros(cls, n, p, shape):
        return cls(n, p, shape)

    @classmethod
    def from_forms(cls, entries):
        """From a nested list of exact PolyForms (all of one degree)."""
        r = len(entries)
        c = len(entries[0]) if r else 0
        first = entries[0][0] if r and c else None
        if first is None:
            raise DimensionMismatch("empty matrix of forms")
        n, p = first.n, first.deg
        out = {}
        for i in range(r):
            for j in range(c):
                f = entries[i][j]
                if f.n != n or f.deg != p:
                    raise DegreeMismatch("matrix entries of different degree or dimension")
                for idx, poly in f.terms.items():
                    for e, s in poly.terms.items():
                        key = (idx, e)
                        if key not in out:
                            out[key] = np.zeros((r, c), dtype=np.complex128)
                        out[key][i, j] += complex(s)
        return cls(n, p, (r, c), out)

    @classmethod
    def scalar(cls, form, k):
        """``form * 1_k`` for an exact scalar form."""
        out = {}
        for idx, poly in form.terms.items():
            for e, s in poly.terms.items():
                out[(idx, e)] = complex(s) * np.eye(k, dtype=np.complex128)
        return cls(form.n, form.deg, (k, k), out)

    def _like(self, coeffs, shape=None):
        return MatForm(self.n, self.p, shape or self.shape, coeffs)

    def __add__(self, other):
        if (other.n, other.p, other.shape) != (self.n, self.p, self.shape):
            raise DimensionMismatch("adding matrix forms of different type")
        out = dict(self.coeffs)
        for k, M in other.coeffs.items():
            out[k] = out[k] + M if k in out else M
        return self._like(out)

    def __neg__(self):
        return self._like({k: -M for k, M in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, z):
        return self._like({k: z * M for k, M in self.coeffs.items()})

    __rmul__ = __mul__

    def left(self, M):
        """``M @ self``."""
        M = np.asarray(M, dtype=np.complex128)
        return self._like({k: M @ C for k, C in self.coeffs.items()}, (M.shape[0], self.shape[1]))

    def right(self, M):
        """``self @ M``."""
        M = np.asarray(M, dtype=np.complex128)
        return self._like({k: C @ M for k, C in self.coeffs.items()}, (self.shape[0], M.shape[1]))

    def transpose(self):
        return self._like({k: C.T for k, C in self.coeffs.items()}, self.shape[::-1])

    def adjoint(self):
        """Pointwise conjugate transpose (coordinates are real)."""
        return self._like({k: C.conj().T for k, C in self.coeffs.items()}, self.shape[::-1])

    def kron_id(self, k, side):
        """``self (x) 1_k`` (side="right") or ``1_k (x) self`` (side="left")."""
        I = np.eye(k, dtype=np.complex128)
        if side == "right":
            out = {key: np.kron(C, I) for key, C in self.coeffs.items()}
        else:
            out = {key: np.kron(I, C) for key, C in self.coeffs.items()}
        return self._like(out, (self.shape[0] * k, self.shape[1] * k))

    def block_diag(self, other):
        r1, c1 = self.shape
        r2, c2 = other.shape
        out = {}
        for k in set(self.coeffs) | set(other.coeffs):
            M = np.zeros((r1 + r2, c1 + c2), dtype=np.complex128)
            if k in self.coeffs:
                M[:r1, :c1] = self.coeffs[k]
            if k in other.coeffs:
                M[r1:, c1:] = other.coeffs[k]
            out[k] = M
        return self._like(out, (r1 + r2, c1 + c2))

    def block(self, rows, cols):
        return self._like({k: C[np.ix_(rows, cols)] for k, C in self.coeffs.items()},
                          (len(rows), len(cols)))

    def norm(self):
        """Largest Frobenius norm over coefficient matrices."""
        return max((float(np.linalg.norm(C)) for C in self.coeffs.values()), default=0.0)

    def d(self):
        out = {}
        for (idx, e), C in self.coeffs.items():
            for i in range(self.n):
                if e[i] == 0 or i in idx:
                    continue
                e2 = tuple(v - (k == i) for k, v in enumerate(e))
                new = (i,) + idx
                order = sorted(range(len(new)), key=new.__getitem__)
                sg = perm_sign(order)
                key = (tuple(new[k] for k in order), e2)
                add = (sg * e[i]) * C
                out[key] = out[key] + add if key in out else add
        return MatForm(self.n, self.p + 1, self.shape, out)

    def wedge(self, other):
        """Matrix product with wedge of components."""
        out = {}
        for (i1, e1), C1 in self.coeffs.items():
            for (i2, e2), C2 in other.coeffs.items():
                if set(i1) & set(i2):
                    continue
                new = i1 + i2
                order = sorted(range(len(new)), key=new.__getitem__)
                sg = perm_sign(order)
                key = (tuple(new[k] for k in order), tuple(a + b for a, b in zip(e1, e2)))
                add = sg * (C1 @ C2)
                out[key] = out[key] + add if key in out else add
        return MatForm(self.n, self.p + other.p, (self.shape[0], other.shape[1]), out)

    def evaluate(self, X, V):
        """Values on (K, n) points and (K, n) vectors, 1-forms only: (K, r, c)."""
        if self.p != 1:
            raise DegreeMismatch("evaluate expects a matrix 1-form")
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        V = np.asarray(V)
        out = np.zeros((X.shape[0],) + self.shape, dtype=np.complex128)
        for (idx, e), C in self.coeffs.items():
            mono = np.prod(X ** np.array(e), axis=1)
            out += (mono * V[:, idx[0]])[:, None, None] * C[None]
        return out

    def to_json(self):
        items = sorted(self.coeffs.items())
        return {"dim": self.n, "deg": self.p, "shape": list(self.shape),
                "terms": [{"idx": list(i), "exp": list(e), "matrix": _mat_json(C)} for (i, e), C in items]}

    @classmethod
    def from_json(cls, data):
        return cls(data["dim"], data["deg"], data["shape"],
                   {(tuple(t["idx"]), tuple(t["exp"])): _mat_from_json(t["matrix"]) for t in data["terms"]})


def _mat_json(M):
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(M)]


def _mat_from_json(data):
    return np.array([[complex(a, b) for a, b in row] for row in data], dtype=np.complex128)


def _as_matform(a, n, k):
    if isinstance(a, MatForm):
        return a
    if a is None:
        return MatForm.zeros(n, 1, (k, k))
    return MatForm.from_forms(a)


# gerbe morphisms in the constant regime

def same_gerbe(L, M):
    return L is M or (L.cover == M.cover and L.g == M.g and L.A == M.A and L.B == M.B)


def _twist(L1, L2, s):
    """Constant ``g2_s / g1_s`` as a complex number, or None if it varies."""
    q = (L2.g[s] * L1.g[s].inverse()).q
    if not q.is_constant():
        return None
    return cmath.exp(2j * cmath.pi * complex(q.constant_term()))


class GerbeMorphism:
    """Twisted vector bundle ``E : src -> tgt`` with constant transitions.

    Use :func:`make_morphism`; the constructor trusts its input.
    """

    def __init__(self, src, tgt, rank, alpha, a):
        self.src = src
        self.tgt = tgt
        self.rank = rank
        self.alpha = alpha
        self.a = a

    @property
    def cover(self):
        return self.src.cover

    def connection(self):
        """The connection on a one-patch cover (trivial-gerbe regime)."""
        labs = self.cover.labels
        if len(labs) != 1:
            raise GerbeMismatch("connection() needs a single-patch cover")
        return self.a[labs[0]]

    def to_json(self, src="src", tgt="tgt"):
        return {"src": src, "tgt": tgt, "rank": self.rank,
                "alpha": [{"simplex": list(s), "matrix": _mat_json(M)} for s, M in sorted(self.alpha.items())],
                "a": [{"patch": p, "form": self.a[p].to_json()} for p in self.cover.labels]}

    def __repr__(self):
        return f"GerbeMorphism(rank={self.rank})"


def check_morphism(src, tgt, alpha, a, tol=TAU_U):
    """Residuals of the three morphism conditions, per layer."""
    cov = src.cover
    layers = {"unitarity": [], "twisted_cocycle": [], "connection": []}
    for s in cov.simplices(1):
        M = alpha[s]
        r = float(np.linalg.norm(M.conj().T @ M - np.eye(M.shape[0])))
        if r > tol:
            layers["unitarity"].append({"simplex": list(s), "residual": r})
    for s in cov.simplices(2):
        p, q, t = s
        c = _twist(src, tgt, s)
        if c is None:
            layers["twisted_cocycle"].append({"simplex": list(s), "residual": "non-constant twist"})
            continue
        r = float(np.linalg.norm(c * alpha[(p, q)] @ alpha[(q, t)] - alpha[(p, t)]))
        if r > tol:
            layers["twisted_cocycle"].append({"simplex": list(s), "residual": r})
    for s in cov.simplices(1):
        p, q = s
        M = alpha[s]
        k = M.shape[0]
        shift = MatForm.scalar(src.A[s] - tgt.A[s], k)
        res = a[q] - a[p].left(np.linalg.inv(M)).right(M) - shift if k else None
        r = res.norm() if k else 0.0
        if r > tol:
            layers["connection"].append({"simplex": list(s), "residual": r})
    return layers


_MOR_ERRORS = {"unitarity": UnitarityFail, "twisted_cocycle": TwistedCocycleFail,
               "connection": ConnectionFail}


def make_morphism(src, tgt, alpha, a, tol=TAU_U, fake_flat=False):
    """Build and validate a constant-regime morphism ``src -> tgt``.

    Parameters
    ----------
    src, tgt : LocalGerbe
        Gerbes on a common cover.
    alpha : dict
        Edge (ordered as in the cover) -> (n, n) complex matrix.
    a : dict
        Patch -> matrix 1-form (MatForm or nested list of PolyForms).
    fake_flat : bool
        Also require ``F_a - (B2_a - B1_a) 1 = 0`` on every patch.

    Raises
    ------
    UnitarityFail, TwistedCocycleFail, ConnectionFail
    """
    if src.cover != tgt.cover:
        raise GerbeMismatch("source and target gerbes live on different covers")
    cov = src.cover
    n = cov.dim
    alpha = {cov.canon(s): _orient(cov, s, M) for s, M in alpha.items()}
    rank = None
    for M in alpha.values():
        rank = M.shape[0]
        break
    a = dict(a)
    if rank is None:
        first = a[cov.labels[0]]
        rank = first.shape[0] if isinstance(first, MatForm) else len(first)
    for s in cov.simplices(1):
        alpha.setdefault(s, np.eye(rank, dtype=np.complex128))
    a = {p: _as_matform(a.get(p), n, rank) for p in cov.labels}
    layers = check_morphism(src, tgt, alpha, a, tol)
    if fake_flat:
        layers["fake_curvature"] = []
        for p in cov.labels:
            F = a[p].d() + a[p].wedge(a[p]) - MatForm.scalar(tgt.B[(p,)] - src.B[(p,)], rank)
            if F.norm() > tol:
                layers["fake_curvature"].append({"simplex": [p], "residual": F.norm()})
    for layer, bad in layers.items():
        if bad:
            err = _MOR_ERRORS.get(layer, ConnectionFail)
            raise err(f"morphism {layer} condition fails on {len(bad)} simplices", details=bad)
    return GerbeMorphism(src, tgt, rank, alpha, a)


def _orient(cov, s, M):
    M = np.asarray(M, dtype=np.complex128)
    s = tuple(s)
    if s not in cov:
        raise GerbeMismatch(f"overlap {s} not in the cover")
    return M if cov.sign(s) > 0 else np.linalg.inv(M)


def identity_morphism(L, rank=1):
    cov = L.cover
    return make_morphism(L, L, {s: np.eye(rank) for s in cov.simplices(1)},
                         {p: MatForm.zeros(cov.dim, 1, (rank, rank)) for p in cov.labels})


def compose(F, E, tol=TAU_U):
    """``F o E`` for ``E : L1 -> L2`` and ``F : L2 -> L3``; rank ``n_F n_E``."""
    if not same_gerbe(E.tgt, F.src):
        raise GerbeMismatch("middle gerbes differ")
    cov = E.cover
    alpha = {s: np.kron(F.alpha[s], E.alpha[s]) for s in cov.simplices(1)}
    a = {p: F.a[p].kron_id(E.rank, "right") + E.a[p].kron_id(F.rank, "left") for p in cov.labels}
    return make_morphism(E.src, F.tgt, alpha, a, tol)


def tensor_mor(E, F, tol=TAU_U):
    """``E (x) F : src_E (x) src_F -> tgt_E (x) tgt_F``."""
    if E.cover != F.cover:
        raise GerbeMismatch("morphisms on different covers")
    cov = E.cover
    alpha = {s: np.kron(E.alpha[s], F.alpha[s]) for s in cov.simplices(1)}
    a = {p: E.a[p].kron_id(F.rank, "right") + F.a[p].kron_id(E.rank, "left") for p in cov.labels}
    return make_morphism(tensor(E.src, F.src), tensor(E.tgt, F.tgt), alpha, a, tol)


def direct_sum(E, F, tol=TAU_U):
    if not (same_gerbe(E.src, F.src) and same_gerbe(E.tgt, F.tgt)):
        raise GerbeMismatch("direct sum needs equal source and target gerbes")
    cov = E.cover
    alpha = {}
    for s in cov.simplices(1):
        M = np.zeros((E.rank + F.rank,) * 2, dtype=np.complex128)
        M[:E.rank, :E.rank] = E.alpha[s]
        M[E.rank:, E.rank:] = F.alpha[s]
        alpha[s] = M
    a = {p: E.a[p].block_diag(F.a[p]) for p in cov.labels}
    return make_morphism(E.src, E.tgt, alpha, a, tol)


def det_morphism(E, tol=TAU_U):
    """``(det E, det alpha)`` as a rank-1 morphism ``src^n -> tgt^n``."""
    cov = E.cover
    alpha = {s: np.array([[np.linalg.det(E.alpha[s])]]) for s in cov.simplices(1)}
    a = {}
    for p in cov.labels:
        a[p] = MatForm(cov.dim, 1, (1, 1), {k: np.array([[np.trace(C)]]) for k, C in E.a[p].coeffs.items()})
    return make_morphism(tensor_power(E.src, E.rank), tensor_power(E.tgt, E.rank), alpha, a, tol)


def tensor_power(L, k):
    cov = L.cover
    out = make_gerbe(cov, CechCochain(cov, 2, "u1"), CechCochain(cov, 1, 1), CechCochain(cov, 0, 2))
    for _ in range(k):
        out = tensor(out, L)
    return out


def riesz_theta(obj):
    """Riesz dual: ``alpha -> alpha^{-t}``, ``a -> -a^t`` on morphisms; ``phi -> phi^t`` on 2-morphisms."""
    if isinstance(obj, TwoMorphism):
        return TwoMorphism(riesz_theta(obj.tgt), riesz_theta(obj.src),
                           {p: M.T.copy() for p, M in obj.phi.items()})
    E = obj
    alpha = {s: np.linalg.inv(M).T for s, M in E.alpha.items()}
    a = {p: -E.a[p].transpose() for p in E.cover.labels}
    return GerbeMorphism(dual(E.src), dual(E.tgt), E.rank, alpha, a)


def morphism_close(E, F, tol=TAU_U):
    """Entrywise equality of morphism data (same gerbes, transitions, connections)."""
    if E.rank != F.rank or E.cover != F.cover:
        return False
    for s in E.cover.simplices(1):
        if np.linalg.norm(E.alpha[s] - F.alpha[s]) > tol:
            return False
    return all((E.a[p] - F.a[p]).norm() <= tol for p in E.cover.labels)


# 2-morphisms

class TwoMorphism:
    """Per-patch constant matrices ``phi_a : E_a -> E'_a``."""

    def __init__(self, src, tgt, phi):
        self.src = src
        self.tgt = tgt
        self.phi = phi

    def __matmul__(self, other):
        """Vertical composition ``self o other``."""
        return TwoMorphism(other.src, self.tgt, {p: self.phi[p] @ other.phi[p] for p in self.phi})

    def to_json(self):
        return {"phi": [{"patch": p, "matrix": _mat_json(M)} for p, M in sorted(self.phi.items())]}


def check_2morphism(E, Ep, phi, tol=TAU_U):
    cov = E.cover
    layers = {"intertwining": [], "parallel": []}
    for s in cov.simplices(1):
        p, q = s
        r = float(np.linalg.norm(Ep.alpha[s] @ phi[q] - phi[p] @ E.alpha[s])) if phi[p].size else 0.0
        if r > tol:
            layers["intertwining"].append({"simplex": list(s), "residual": r})
    for p in cov.labels:
        r = (Ep.a[p].right(phi[p]) - E.a[p].left(phi[p])).norm() if phi[p].size else 0.0
        if r > tol:
            layers["parallel"].append({"simplex": [p], "residual": r})
    return layers


def verify_2morphism(E, Ep, phi, tol=TAU_U):
    """Validate ``phi : E => E'``.

    Raises
    ------
    IntertwineFail, ParallelFail
    """
    if not (same_gerbe(E.src, Ep.src) and same_gerbe(E.tgt, Ep.tgt)):
        raise GerbeMismatch("2-morphisms need shared source and target gerbes")
    cov = E.cover
    if isinstance(phi, TwoMorphism):
        phi = phi.phi
    phi = {p: np.asarray(phi[p], dtype=np.complex128).reshape(Ep.rank, E.rank) for p in cov.labels}
    layers = check_2morphism(E, Ep, phi, tol)
    if layers["intertwining"]:
        raise IntertwineFail("phi does not intertwine the transitions", details=layers["intertwining"])
    if layers["parallel"]:
        raise ParallelFail("phi is not parallel", details=layers["parallel"])
    return TwoMorphism(E, Ep, phi)


def horizontal(psi, phi):
    """``psi * phi = psi (x) phi`` for ``phi : E => E'`` and ``psi : F => F'``."""
    return TwoMorphism(compose(psi.src, phi.src), compose(psi.tgt, phi.tgt),
                       {p: np.kron(psi.phi[p], phi.phi[p]) for p in phi.phi})


def direct_sum_2(phi, psi):
    out = {}
    for p in phi.phi:
        A, B = phi.phi[p], psi.phi[p]
        M = np.zeros((A.shape[0] + B.shape[0], A.shape[1] + B.shape[1]), dtype=np.complex128)
        M[:A.shape[0], :A.shape[1]] = A
        M[A.shape[0]:, A.shape[1]:] = B
        out[p] = M
    return TwoMorphism(direct_sum(phi.src, psi.src), direct_sum(phi.tgt, psi.tgt), out)


def distributor(F, E, Ep):
    """Permutation 2-isomorphism ``F o (E + E') => (F o E) + (F o E')``."""
    left = compose(F, direct_sum(E, Ep))
    right = direct_sum(compose(F, E), compose(F, Ep))
    m, k = E.rank, Ep.rank
    N = F.rank * (m + k)
    P = np.zeros((N, N))
    for i in range(F.rank):
        for j in range(m + k):
            src = i * (m + k) + j
            dst = i * m + j if j < m else F.rank * m + i * k + (j - m)
            P[dst, src] = 1.0
    return verify_2morphism(left, right, {p: P for p in E.cover.labels})


def _null_basis(M, tol):
    """Orthonormal basis of ker M (columns) via SVD."""
    n = M.shape[1]
    if n == 0:
        return np.zeros((0, 0), dtype=np.complex128)
    if M.shape[0] == 0:
        return np.eye(n, dtype=np.complex128)
    _, s, Vh = np.linalg.svd(M)
    scale = max(1.0, float(s[0]) if s.size else 0.0)
    r = int(np.sum(s > tol * scale))
    return Vh[r:].conj().T


def _restrict(E, Q, tol):
    """Sub-morphism on per-patch isometries Q_a with alpha Q_b = Q_a alpha~."""
    cov = E.cover
    alpha = {}
    for s in cov.simplices(1):
        p, q = s
        alpha[s] = Q[p].conj().T @ E.alpha[s] @ Q[q]
    a = {p: E.a[p].left(Q[p].conj().T).right(Q[p]) for p in cov.labels}
    k = next(iter(Q.values())).shape[1]
    if k == 0:
        return GerbeMorphism(E.src, E.tgt, 0, {s: np.zeros((0, 0)) for s in cov.simplices(1)},
                             {p: MatForm.zeros(cov.dim, 1, (0, 0)) for p in cov.labels})
    return make_morphism(E.src, E.tgt, alpha, a, max(tol, 10 * TAU_U))


def kernel_2mor(phi, tol=TAU_U):
    """Kernel of ``phi : E => E'`` as a morphism with its inclusion 2-morphism.

    Raises
    ------
    NonConstantRank
        If ``dim ker phi_a`` differs between patches.
    """
    E = phi.src
    Q = {p: _null_basis(phi.phi[p], tol) for p in E.cover.labels}
    dims = {p: Q[p].shape[1] for p in Q}
    if len(set(dims.values())) > 1:
        raise NonConstantRank("kernel dimension varies across patches", details=[dims])
    K = _restrict(E, Q, tol)
    return K, TwoMorphism(K, E, Q)


def _clusters(vals, tol):
    order = sorted(range(len(vals)), key=lambda i: (vals[i].real, vals[i].imag))
    groups = []
    for i in order:
        for g in groups:
            if abs(vals[i] - g[0]) < tol:
                g[1].append(i)
                break
        else:
            groups.append([vals[i], [i]])
    out = []
    for _, idx in groups:
        out.append((complex(np.mean([vals[i] for i in idx])), idx))
    out.sort(key=lambda t: (round(t[0].real, 12), round(t[0].imag, 12)))
    return out


def eigensplit(phi, tol=TAU_U, tol_eig=TAU_EIG):
    """Split an endomorphism ``phi : E => E`` into eigen-summands.

    Returns
    -------
    (summands, U) where ``summands`` is a list of ``(eigenvalue,
    GerbeMorphism)`` sorted by (re, im) and ``U`` is the unitary
    2-isomorphism from their direct sum to ``E``.

    Raises
    ------
    NotNormal, NonConstantRank
    """
    E = phi.src
    cov = E.cover
    per_patch = {}
    for p in cov.labels:
        M = phi.phi[p]
        r = float(np.linalg.norm(M @ M.conj().T - M.conj().T @ M))
        if r > tol * max(1.0, float(np.linalg.norm(M)) ** 2):
            raise NotNormal(f"phi is not normal on patch {p!r}", details=[{"simplex": [p], "residual": r}])
        T, Z = schur(M, output="complex")
        vals = np.diag(T)
        per_patch[p] = (vals, Z, _clusters(list(vals), tol_eig))
    ref = per_patch[cov.labels[0]][2]
    spec = [(lam, len(idx)) for lam, idx in ref]
    for p in cov.labels[1:]:
        other = [(lam, len(idx)) for lam, idx in per_patch[p][2]]
        if len(other) != len(spec) or any(abs(l1 - l2) >= tol_eig or m1 != m2
                                          for (l1, m1), (l2, m2) in zip(spec, other)):
            raise NonConstantRank("eigenspace dimensions vary across patches")
    summands, cols = [], {p: [] for p in cov.labels}
    for k, (lam, mult) in enumerate(spec):
        Q = {}
        for p in cov.labels:
            _, Z, cl = per_patch[p]
            # Schur vectors of a normal matrix are eigenvectors
            Q[p] = Z[:, cl[k][1]]
            cols[p].append(Q[p])
        summands.append((lam, _restrict(E, Q, tol)))
    total = summands[0][1]
    for _, S in summands[1:]:
        total = direct_sum(total, S)
    U = {p: np.hstack(cols[p]) for p in cov.labels}
    return summands, verify_2morphism(total, E, U, 10 * tol)


# R^3 model: sections of the trivial gerbe and parallel homomorphisms

class ModelSection:
    """``u(n)``-valued 1-form on R^n with exact coefficients."""

    def __init__(self, omega):
        self.omega = [list(row) for row in omega]
        self.rank = len(self.omega)
        self.n = self.omega[0][0].n if self.rank else 3
        for i in range(self.rank):
            for j in range(self.rank):
                if self.omega[i][j].deg != 1:
                    raise DegreeMismatch("sections are matrix-valued 1-forms")
                if self.omega[i][j].conj() != -self.omega[j][i]:
                    raise Mismatch("omega is not anti-hermitian", details=[{"entry": [i, j]}])

    @classmethod
    def zero(cls, n, rank):
        return cls([[PolyForm.zero(n, 1) for _ in range(rank)] for _ in range(rank)])

    def to_json(self):
        return {"rank": self.rank, "dim": self.n,
                "omega": [[f.to_json() for f in row] for row in self.omega]}

    @classmethod
    def from_json(cls, data):
        return cls([[PolyForm.from_json(f) for f in row] for row in data["omega"]])


class ModelHom:
    """Matrix of polynomials ``f`` (rows = rank of target)."""

    def __init__(self, f):
        self.f = [list(row) for row in f]

    @property
    def shape(self):
        return len(self.f), (len(self.f[0]) if self.f else 0)

    def adjoint(self):
        r, c = self.shape
        return ModelHom([[self.f[i][j].conj() for i in range(r)] for j in range(c)])

    def to_json(self):
        return {"f": [[p.to_json() for p in row] for row in self.f]}


def _monomials(n, D):
    out = []

    def rec(i, rest, cur):
        if i == n:
            out.append(tuple(cur))
            return
        for k in range(rest + 1):
            rec(i + 1, rest - k, cur + [k])

    rec(0, D, [])
    return sorted(out, key=lambda e: (sum(e), e))


def hom_residual(omega, eta, f):
    """``f omega - eta f - df`` as a nested list of 1-forms."""
    r, c = f.shape
    out = []
    for i in range(r):
        row = []
        for j in range(c):
            acc = -exterior_derivative(PolyForm.function(f.f[i][j]))
            for k in range(c):
                acc = acc + omega.omega[k][j] * f.f[i][k]
            for k in range(r):
                acc = acc - eta.omega[i][k] * f.f[k][j]
            row.append(acc)
        out.append(row)
    return out


def hom_space(omega, eta, D):
    """Basis of parallel homs ``f : omega -> eta`` with entries of degree <= D.

    Exact: the linear system for the unknown coefficients is solved over
    Q(i)(pi), denominators are cleared, and every basis element is
    re-verified symbolically.
    """
    if D < 0:
        raise ValueError("degree bound must be >= 0")
    if omega.n != eta.n:
        raise DimensionMismatch("sections over different dimensions")
    n = omega.n
    r, c = eta.rank, omega.rank
    mons = _monomials(n, D)
    mi = {e: k for k, e in enumerate(mons)}
    nv = r * c * len(mons)

    def var(i, j, e):
        return (i * c + j) * len(mons) + mi[e]

    eqs = {}

    def add(key, col, coeff):
        row = eqs.setdefault(key, {})
        row[col] = row.get(col, to_rf(0)) + to_rf(coeff)

    for i in range(r):
        for j in range(c):
            # - d f_ij
            for e in mons:
                for l in range(n):
                    if e[l]:
                        e2 = tuple(v - (t == l) for t, v in enumerate(e))
                        add((i, j, l, e2), var(i, j, e), -e[l])
            # + sum_k omega_kj f_ik
            for k in range(c):
                for (l,), poly in omega.omega[k][j].terms.items():
                    for eo, s in poly.terms.items():
                        for e in mons:
                            add((i, j, l, tuple(a + b for a, b in zip(e, eo))), var(i, k, e), s)
            # - sum_k eta_ik f_kj
            for k in range(r):
                for (l,), poly in eta.omega[i][k].terms.items():
                    for eo, s in poly.terms.items():
                        for e in mons:
                            add((i, j, l, tuple(a + b for a, b in zip(e, eo))), var(k, j, e), -s)
    rows = [{cl: v for cl, v in row.items() if v} for _, row in sorted(eqs.items())]
    basis = []
    for vec in nullspace(rows, nv):
        f = [[Poly(n, {e: vec[var(i, j, e)] for e in mons if vec[var(i, j, e)]}) for j in range(c)]
             for i in range(r)]
        h = ModelHom(f)
        if any(x for row in hom_residual(omega, eta, h) for x in row):
            raise Mismatch("hom_space solution failed re-verification")
        basis.append(h)
    return basis


AUDIT_POINTS = [(Fraction(1, 2), Fraction(-1, 3), Fraction(2)), (Fraction(3), Fraction(1, 5), Fraction(-2, 7)),
                (Fraction(-1), Fraction(4, 3), Fraction(1, 9)), (Fraction(5, 2), Fraction(-3), Fraction(7, 4)),
                (Fraction(-2, 3), Fraction(-5, 6), Fraction(-1, 11))]


def _tr_adj_prod(f, g, x):
    r, c = f.shape
    tot = Scalar.of(0)
    for i in range(r):
        for j in range(c):
            tot = tot + f.f[i][j].conj()(x) * g.f[i][j](x)
    return tot


def inner_product_hilbert(f, g, audit=AUDIT_POINTS):
    """``tr(f^* g)`` at the origin, audited for x-independence at rational points.

    Returns an exact Scalar.

    Raises
    ------
    XDependence
    """
    if f.shape != g.shape:
        raise DimensionMismatch("homs of different shape")
    n = f.f[0][0].n if f.f and f.f[0] else 3
    v0 = _tr_adj_prod(f, g, (0,) * n)
    for pt in audit:
        pt = tuple(pt[:n]) + (Fraction(0),) * max(0, n - len(pt))
        v = _tr_adj_prod(f, g, pt)
        if v != v0:
            raise XDependence("tr(f* g) depends on x", details=[{"point": [str(t) for t in pt]}])
    return v0


def _transpose_forms(w):
    return [[w[j][i] for j in range(len(w))] for i in range(len(w))]


def gerbe_metric(omega, eta):
    """``h(omega, eta) = -omega^t (x) 1 + 1 (x) eta`` (column-stacking order)."""
    n = omega.n
    m, k = omega.rank, eta.rank
    z = PolyForm.zero(n, 1)
    out = [[z for _ in range(m * k)] for _ in range(m * k)]
    # vec index of entry (i, j) of an (k x m) matrix is j * k + i
    for j in range(m):
        for jp in range(m):
            for i in range(k):
                out[j * k + i][jp * k + i] = out[j * k + i][jp * k + i] - omega.omega[jp][j]
    for j in range(m):
        for i in range(k):
            for ip in range(k):
                out[j * k + i][j * k + ip] = out[j * k + i][j * k + ip] + eta.omega[i][ip]
    return ModelSection(out)


def sylvester_commutant_dim(mats):
    """Dimension of ``{X : M X = X M for all M}`` via exact Kronecker systems."""
    k = len(mats[0])
    rows = []
    for M in mats:
        for i in range(k):
            for j in range(k):
                row = {}
                # (M X - X M)_ij
                for t in range(k):
                    if M[i][t]:
                        row[t * k + j] = row.get(t * k + j, to_rf(0)) + to_rf(M[i][t])
                    if M[t][j]:
                        row[i * k + t] = row.get(i * k + t, to_rf(0)) - to_rf(M[t][j])
                rows.append({c: v for c, v in row.items() if v})
    return len(nullspace(rows, k * k))
