"""Multisymplectic forms on R^n and their observable Lie 2-algebra.

For a closed nondegenerate (p+1)-form ``omega`` the Hamiltonian forms
are (p-1)-forms ``alpha`` admitting a vector field with
``iota_X omega = -d alpha``.  The bracket is
``[alpha, beta] = -iota_{X_alpha} iota_{X_beta} omega`` and, for p = 2,
the Jacobiator 1-cell carries ``iota_{X_a} iota_{X_b} iota_{X_c} omega``.
"""

import random
from fractions import Fraction
from itertools import combinations

from .errors import Degenerate, DegreeMismatch, DimensionMismatch, Mismatch, NotClosed, NotHamiltonian, NotInvariant
from .exterior import (Poly, PolyForm, TWO_PI_I, VectorField, exterior_derivative,
                       interior_product)
from .exterior.linalg import rank, solve, to_rf
from .exterior.scalar import ZERO

NONDEGENERACY_SEED = 7321


class PlecticSpace:
    """Validated multisymplectic space ``(R^n, omega)``.

    Attributes
    ----------
    certificate : dict
        ``{"kind": "exact"}`` for constant forms, otherwise the sample
        points at which the contraction map had full rank.
    """

    def __init__(self, omega, certificate):
        self.omega = omega
        self.n = omega.n
        self.certificate = certificate
        self._const = omega.is_constant()
        self._hcache = {}

    @property
    def p(self):
        return self.omega.deg - 1

    def to_json(self):
        return {"dim": self.n, "omega": self.omega.to_json()}

    def __repr__(self):
        return f"PlecticSpace(n={self.n}, deg={self.omega.deg})"


class Observable:
    """A Hamiltonian form with its function part ``(alpha, f)``."""

    __slots__ = ("alpha", "f")

    def __init__(self, alpha, f=None):
        self.alpha = alpha
        self.f = f if f is not None else Poly.zero(alpha.n)

    def __eq__(self, other):
        return isinstance(other, Observable) and self.alpha == other.alpha and self.f == other.f

    def __hash__(self):
        return hash((self.alpha, self.f))

    def to_json(self):
        return {"alpha": self.alpha.to_json(), "f": self.f.to_json()}

    def __repr__(self):
        return f"Observable(alpha={self.alpha!r}, f={self.f!r})"


def _basis(n, p):
    return list(combinations(range(n), p))


def _contraction_rows(coeffs_at, n, p):
    """Sparse rows of the map X -> iota_X omega for constant coefficients.

    ``coeffs_at`` maps increasing (p+1)-tuples to Scalars.  Row index is
    the output p-tuple, column index the vector component.
    """
    rows = {}
    for idx, s in coeffs_at.items():
        if not s:
            continue
        for pos, i in enumerate(idx):
            out = idx[:pos] + idx[pos + 1:]
            v = s if pos % 2 == 0 else -s
            r = rows.setdefault(out, {})
            r[i] = r[i] + to_rf(v) if i in r else to_rf(v)
    return rows


def _kernel_trivial(coeffs_at, n, p):
    rows = _contraction_rows(coeffs_at, n, p)
    return rank(list(rows.values()), n) == n


def make_plectic(omega, samples=8, seed=NONDEGENERACY_SEED):
    """Validate closedness and nondegeneracy of ``omega``.

    Raises
    ------
    NotClosed
        If ``d omega`` is not exactly zero.
    Degenerate
        If the contraction map has a kernel (exactly for constant forms,
        at one of ``samples`` seeded rational points otherwise), or if
        ``omega`` has degree below 2.
    """
    n, deg = omega.n, omega.deg
    if deg < 2:
        raise Degenerate(f"a multisymplectic form needs degree >= 2, got {deg}")
    dw = exterior_derivative(omega)
    if dw:
        raise NotClosed("d omega != 0", details=[dw.to_json()])
    if omega.is_constant():
        coeffs = {k: p.constant_term() for k, p in omega.terms.items()}
        if not _kernel_trivial(coeffs, n, deg - 1):
            raise Degenerate("contraction map X -> iota_X omega has a kernel")
        return PlecticSpace(omega, {"kind": "exact"})
    r = random.Random(seed)
    pts = []
    for _ in range(samples):
        x = [Fraction(r.randint(-20, 20), r.randint(1, 7)) for _ in range(n)]
        coeffs = {k: p(x) for k, p in omega.terms.items()}
        if not _kernel_trivial(coeffs, n, deg - 1):
            raise Degenerate(f"contraction map has a kernel at {[str(v) for v in x]}")
        pts.append([str(v) for v in x])
    return PlecticSpace(omega, {"kind": "sampled", "points": pts})


def _monomials(n, deg):
    if n == 0:
        return [()]
    out = []
    for k in range(deg + 1):
        for rest in _monomials(n - 1, deg - k):
            out.append((k,) + rest)
    return out


def _solve_constant(P, target):
    """Solve iota_X omega = target for constant omega, monomial by monomial."""
    n, p = P.n, P.omega.deg - 1
    coeffs = {k: q.constant_term() for k, q in P.omega.terms.items()}
    rows_by_out = _contraction_rows(coeffs, n, p)
    outs = sorted(set(rows_by_out) | set(target.terms))
    by_mono = {}
    for idx, q in target.terms.items():
        for e, s in q.terms.items():
            by_mono.setdefault(e, {})[idx] = s
    comps = [dict() for _ in range(n)]
    for e, rhs_map in by_mono.items():
        rows = [rows_by_out.get(o, {}) for o in outs]
        rhs = [to_rf(rhs_map.get(o, ZERO)) for o in outs]
        sol = solve(rows, rhs, n)
        if sol is None:
            return None
        for i, v in enumerate(sol):
            if v:
                if v.den.degree > 0:
                    return None
                comps[i][e] = v.num
    return VectorField([Poly(n, c) for c in comps])


def _solve_general(P, target, D):
    n = P.n
    mons = _monomials(n, D)
    col = {(i, e): k for k, (i, e) in enumerate((i, e) for i in range(n) for e in mons)}
    eqs = {}
    # iota_{x^e d_i} omega = x^e * iota_{d_i} omega
    for idx, q in P.omega.terms.items():
        for pos, i in enumerate(idx):
            out = idx[:pos] + idx[pos + 1:]
            sign = 1 if pos % 2 == 0 else -1
            for e in mons:
                for f, s in q.terms.items():
                    m = tuple(a + b for a, b in zip(e, f))
                    key = (out, m)
                    row = eqs.setdefault(key, {})
                    c = col[(i, e)]
                    v = to_rf(s if sign > 0 else -s)
                    row[c] = row[c] + v if c in row else v
    rhs_map = {}
    for idx, q in target.terms.items():
        for e, s in q.terms.items():
            rhs_map[(idx, e)] = s
            eqs.setdefault((idx, e), {})
    keys = sorted(eqs)
    sol = solve([eqs[k] for k in keys], [to_rf(rhs_map.get(k, ZERO)) for k in keys], len(col))
    if sol is None:
        return None
    comps = [dict() for _ in range(n)]
    for (i, e), k in col.items():
        v = sol[k]
        if v:
            if v.den.degree > 0:
                return None
            comps[i][e] = v.num
    return VectorField([Poly(n, c) for c in comps])


def hamiltonian_vf(P, alpha):
    """The unique polynomial X with ``iota_X omega = -d alpha``.

    Raises
    ------
    NotHamiltonian
        If no polynomial field within the degree bound solves the system.
    """
    if alpha.n != P.n:
        raise DimensionMismatch("form and plectic space dimensions differ")
    if alpha.deg != P.omega.deg - 2:
        raise DegreeMismatch(f"Hamiltonian forms have degree {P.omega.deg - 2}")
    key = alpha
    if key in P._hcache:
        return P._hcache[key]
    target = -exterior_derivative(alpha)
    if not target:
        X = VectorField.zero(P.n)
    elif P._const:
        X = _solve_constant(P, target)
    else:
        D = max(alpha.poly_degree, 0) + max(P.omega.poly_degree, 0)
        X = _solve_general(P, target, D)
    if X is None or interior_product(X, P.omega) != target:
        raise NotHamiltonian("no polynomial vector field solves iota_X omega = -d alpha")
    P._hcache[key] = X
    return X


def _obs(a):
    return a if isinstance(a, Observable) else Observable(a)


def bracket_forms(P, alpha, beta):
    """``-iota_{X_alpha} iota_{X_beta} omega``."""
    Xa = hamiltonian_vf(P, alpha)
    Xb = hamiltonian_vf(P, beta)
    return -interior_product(Xa, interior_product(Xb, P.omega))


def bracket(P, a, b, verify=True):
    """Bracket of observables ``([alpha, beta], 0)``.

    With ``verify`` the result's Hamiltonian field is checked to equal
    ``[X_alpha, X_beta]`` exactly.
    """
    a, b = _obs(a), _obs(b)
    c = bracket_forms(P, a.alpha, b.alpha)
    if verify:
        Xc = hamiltonian_vf(P, c)
        Xab = hamiltonian_vf(P, a.alpha).bracket(hamiltonian_vf(P, b.alpha))
        if Xc != Xab:
            raise NotHamiltonian("X_[a,b] differs from [X_a, X_b]")
    return Observable(c, Poly.zero(P.n))


def jacobiator(P, a, b, c):
    """The 1-cell ``([a,[b,c]], iota_{X_a} iota_{X_b} iota_{X_c} omega)``."""
    a, b, c = _obs(a).alpha, _obs(b).alpha, _obs(c).alpha
    Xa, Xb, Xc = (hamiltonian_vf(P, t) for t in (a, b, c))
    f = interior_product(Xa, interior_product(Xb, interior_product(Xc, P.omega)))
    src = bracket_forms(P, a, bracket_forms(P, b, c))
    return Observable(src, f.as_poly() if f.deg == 0 else f)


def homotopy_jacobi_residual(P, a, b, c):
    """``[[a,b],c] + [b,[a,c]] - [a,[b,c]] + d(iota_a iota_b iota_c omega)``.

    Vanishes exactly.  With ``X_a`` defined by ``iota_X omega = -d a``
    and the bracket ``-iota_{X_a} iota_{X_b} omega``, the Jacobiator
    1-cell ``(src, f)`` therefore has target ``src - df``.
    """
    J = jacobiator(P, a, b, c)
    lhs = (bracket_forms(P, bracket_forms(P, a, b), c) + bracket_forms(P, b, bracket_forms(P, a, c))
           - J.alpha)
    f = J.f if isinstance(J.f, PolyForm) else PolyForm.function(J.f)
    return lhs + exterior_derivative(f)


# closed forms on R^3 with omega = vol

def _eps(i, j, k):
    return (i - j) * (j - k) * (k - i) // 2


def hamiltonian_vf_r3(alpha):
    """``X^i = -eps^{ijk} d_j alpha_k`` on (R^3, vol)."""
    n = 3
    comps = []
    for i in range(n):
        acc = Poly.zero(n)
        for j in range(n):
            for k in range(n):
                e = _eps(i, j, k)
                if e:
                    acc = acc - alpha.coeff(k).partial(j) * e
        comps.append(acc)
    return VectorField(comps)


def bracket_r3(alpha, beta):
    """``eps^{ijk} d_i alpha_k (d_j beta_l - d_l beta_j) dx^l``."""
    n = 3
    terms = {}
    for l in range(n):
        acc = Poly.zero(n)
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    e = _eps(i, j, k)
                    if e:
                        acc = acc + alpha.coeff(k).partial(i) * (
                            beta.coeff(l).partial(j) - beta.coeff(j).partial(l)) * e
        terms[(l,)] = acc
    return PolyForm(n, 1, terms)


class PrequantumReport:
    def __init__(self, ok, difference):
        self.ok = ok
        self.difference = difference

    def __bool__(self):
        return self.ok

    def to_json(self):
        return {"ok": self.ok, "difference": self.difference.to_json()}


def prequantum_check(P, L, raise_on_fail=False):
    """Exact test of ``H = -2 pi i omega``."""
    if L.dim != P.n:
        raise DimensionMismatch("gerbe and plectic space dimensions differ")
    if L.H.deg != P.omega.deg:
        diff = None
        raise DegreeMismatch("curvature and plectic form degrees differ")
    diff = L.H - P.omega * (-TWO_PI_I)
    rep = PrequantumReport(not diff, diff)
    if raise_on_fail and not rep:
        raise Mismatch("H != -2 pi i omega", details=[diff.to_json()])
    return rep


def _drop_index(form, k):
    terms = {}
    for idx, p in form.terms.items():
        if k in idx:
            raise NotInvariant("form still involves the reduced direction")
        terms[tuple(i - (i > k) for i in idx)] = p.drop_var(k)
    return PolyForm(form.n - 1, form.deg, terms)


def reduce_form(form, k):
    """Forms invariant along ``d_k`` contracted with ``d_k`` and pushed to R^{n-1}.

    ``k`` is 0-based.  Functions are pushed forward unchanged.
    """
    if any(p.depends_on(k) for p in form.terms.values()):
        raise NotInvariant(f"form depends on x^{k + 1}")
    if form.deg == 0:
        return _drop_index(form, k)
    e = VectorField([Poly.const(form.n, 1 if i == k else 0) for i in range(form.n)])
    return _drop_index(interior_product(e, form), k)


def reduce_dimension(P, k):
    """Symplectic-type reduction ``omega_red = iota_{d_k} omega`` (k 0-based).

    Raises
    ------
    NotInvariant
        If omega is not constant along the direction.
    Degenerate
        If the reduced form is degenerate or of degree below 2.
    """
    if not 0 <= k < P.n:
        raise DimensionMismatch("direction out of range")
    return make_plectic(reduce_form(P.omega, k))
