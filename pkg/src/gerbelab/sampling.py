"""Seeded random generators for property tests and the suite."""

import os
import random
from fractions import Fraction
from itertools import combinations

from .cech import CechCochain, Cover, DeligneCochain, U1Function
from .exterior import Poly, PolyForm, Scalar, VectorField


def seed_from_env(default=20240917):
    """Seed from GERBELAB_SEED, falling back to a fixed default."""
    v = os.environ.get("GERBELAB_SEED")
    return int(v) if v not in (None, "") else default


def rng(seed=None):
    return random.Random(seed_from_env() if seed is None else seed)


def _monomials(n, deg):
    if n == 0:
        return [()]
    out = []
    for k in range(deg + 1):
        for rest in _monomials(n - 1, deg - k):
            out.append((k,) + rest)
    return out


def random_rational(r, span=5):
    return Fraction(r.randint(-span, span), r.randint(1, 3))


def random_scalar(r, complex_=True, with_pi=True):
    re = random_rational(r)
    im = random_rational(r) if complex_ and r.random() < 0.3 else 0
    k = r.choice([0, 0, 0, 1]) if with_pi else 0
    return Scalar.gauss(re, im, k)


def random_poly(r, n, deg, nterms=3, real=False, with_pi=True):
    mons = _monomials(n, deg)
    terms = {}
    for _ in range(nterms):
        e = r.choice(mons)
        terms[e] = random_scalar(r, complex_=not real, with_pi=with_pi and not real)
    return Poly(n, terms)


def random_form(r, n, p, deg, nterms=3, **kw):
    idxs = list(combinations(range(n), p))
    out = PolyForm.zero(n, p)
    if not idxs:
        return out
    for _ in range(nterms):
        idx = r.choice(idxs)
        out = out + PolyForm(n, p, {idx: random_poly(r, n, deg, 1, **kw)})
    return out


def random_vf(r, n, deg, nterms=2):
    return VectorField([random_poly(r, n, deg, nterms, real=True) for _ in range(n)])


def random_cover(r, dim=3, max_patches=6, connected=True):
    """Random nerve on 2..max_patches labels; connected by default."""
    m = r.randint(2, max_patches)
    labels = [chr(ord("a") + i) for i in range(m)]
    maximal = [(a,) for a in labels]
    if connected:
        for i in range(1, m):
            maximal.append((labels[r.randrange(i)], labels[i]))
    for _ in range(r.randint(0, 4)):
        size = r.choice([2, 3, 3, 4])
        if size <= m:
            maximal.append(tuple(sorted(r.sample(labels, size))))
    return Cover.from_maximal(dim, labels, maximal)


def random_cochain(r, cover, k, kind, deg=2):
    n = cover.dim
    ent = {}
    for s in cover.simplices(k):
        if kind == "u1":
            ent[s] = U1Function(random_poly(r, n, deg, 2, real=True))
        else:
            ent[s] = random_form(r, n, kind, deg, 2)
    return CechCochain(cover, k, kind, ent)


def random_deligne(r, cover, n, k, deg=2):
    comps = []
    for j in range(n + 1):
        if k - j < 0:
            comps.append(None)
        else:
            comps.append(random_cochain(r, cover, k - j, "u1" if j == 0 else j, deg))
    return DeligneCochain(n, k, comps)


def random_gerbe_data(r, cover, broken=False):
    """Raw (g, A, B) cochains, valid by construction unless ``broken``.

    Valid data come from a random trivialization ``(h, a, rho)``, so the
    exponents of g are generic polynomials.  Broken data perturb one
    randomly chosen layer at one simplex in a way every nerve detects.
    """
    from .gerbe import Trivialization
    from .cech import cech_delta
    from .exterior import exterior_derivative
    n = cover.dim
    h = random_cochain(r, cover, 1, "u1", 2)
    a = random_cochain(r, cover, 0, 1, 2)
    rho = random_form(r, n, 2, 2, 3)
    T = Trivialization(cover, h, a, rho)
    g = cech_delta(T.h)
    A = CechCochain(cover, 1, 1, {(p, q): T.a[(q,)] - T.a[(p,)] - T.h[(p, q)].dlog()
                                  for p, q in cover.simplices(1)})
    B = CechCochain(cover, 0, 2, {(p,): rho - exterior_derivative(T.a[(p,)]) for p in cover.labels})
    if broken:
        choices = []
        if cover.simplices(2):
            choices += ["g", "A"]
        if cover.simplices(1):
            choices += ["A", "B"]
        choices.append("Bpatch")
        what = r.choice(choices)
        if what == "g":
            s = r.choice(cover.simplices(2))
            vals = dict(g.values)
            # non-constant twist: a constant one can be invisible without 4-fold overlaps
            vals[s] = vals[s] * U1Function(Poly.var(n, r.randrange(n)) * Fraction(1, r.randint(2, 5)))
            g = CechCochain(cover, 2, "u1", vals)
        elif what == "A":
            s = r.choice(cover.simplices(1))
            vals = dict(A.values)
            i, j = r.sample(range(n), 2)
            # non-closed perturbation, so the curving layer always sees it
            vals[s] = vals[s] + PolyForm(n, 1, {(i,): Poly.var(n, j)})
            A = CechCochain(cover, 1, 1, vals)
        else:
            s = r.choice(cover.simplices(0))
            vals = dict(B.values)
            vals[s] = vals[s] + PolyForm(n, 2, {(0, 1): Poly.const(n, 1)})
            B = CechCochain(cover, 0, 2, vals)
    return g, A, B


def random_unitary(r, k):
    """Haar-ish unitary from the QR of a seeded complex Gaussian matrix."""
    import numpy as np
    g = np.random.default_rng(r.randrange(2 ** 32))
    Z = g.normal(size=(k, k)) + 1j * g.normal(size=(k, k))
    Q, R = np.linalg.qr(Z)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def random_constant_gerbe(r, cover, u1_forms=True):
    """Gerbe from a trivialization with constant rational h and imaginary a, rho."""
    from .gerbe import Trivialization, gerbe_from_trivialization
    from .exterior import I
    n = cover.dim
    h = {s: U1Function(Poly.const(n, Fraction(r.randint(-6, 6), r.randint(1, 6)))) for s in cover.simplices(1)}
    a = {(p,): random_form(r, n, 1, 2, 2, real=True, with_pi=False) * I for p in cover.labels}
    rho = random_form(r, n, 2, 2, 2, real=True, with_pi=False) * I
    T = Trivialization(cover, CechCochain(cover, 1, "u1", h), CechCochain(cover, 0, 1, a), rho)
    return gerbe_from_trivialization(cover, T), T


def random_morphism_data(r, L1, T1, L2, T2, k, m=None):
    """Constant-regime morphism data ``L1 -> L2`` of rank k.

    ``alpha_ab = c_ab U_a U_b^*`` with ``c = exp(2 pi i (h1 - h2))`` and
    ``a_a = U_a m U_a^* + (t1_a - t2_a) 1`` for a global matrix form m.
    Returns (alpha, a, U, m).
    """
    import cmath
    from .twovect import MatForm
    cov = L1.cover
    n = cov.dim
    U = {p: random_unitary(r, k) for p in cov.labels}
    if m is None:
        m = random_anti_hermitian_form(r, n, k)
    alpha = {}
    for s in cov.simplices(1):
        p, q = s
        c = cmath.exp(2j * cmath.pi * complex((T1.h[s].q - T2.h[s].q).constant_term()))
        alpha[s] = c * U[p] @ U[q].conj().T
    a = {p: m.left(U[p]).right(U[p].conj().T) + MatForm.scalar(T1.a[(p,)] - T2.a[(p,)], k)
         for p in cov.labels}
    return alpha, a, U, m


def random_anti_hermitian_form(r, n, k, deg=1, diag_only=False):
    """Matrix 1-form ``sum_i M_i(x) dx^i`` with constant anti-hermitian blocks times monomials."""
    import numpy as np
    from .twovect import MatForm
    g = np.random.default_rng(r.randrange(2 ** 32))
    coeffs = {}
    for i in range(n):
        e = tuple(r.randint(0, deg) if j != i else 0 for j in range(n))
        if diag_only:
            M = np.diag(1j * g.normal(size=k))
        else:
            Z = g.normal(size=(k, k)) + 1j * g.normal(size=(k, k))
            M = (Z - Z.conj().T) / 2
        coeffs[((i,), e)] = M
    return MatForm(n, 1, (k, k), coeffs)


def _np_rng(r):
    import numpy as np
    return np.random.default_rng(r.randrange(2 ** 32))


def random_loop(r, N=256, modes=3, amp=0.5, dim=3):
    """Smooth random closed loop: a few Fourier modes with decaying amplitudes."""
    import numpy as np
    from .loopspace.loops import SampledLoop
    g = _np_rng(r)
    t = np.arange(N) / N
    pts = np.tile(g.normal(size=dim) * 0.3, (N, 1))
    for k in range(1, modes + 1):
        pts += np.outer(np.cos(2 * np.pi * k * t), g.normal(size=dim) * amp / k)
        pts += np.outer(np.sin(2 * np.pi * k * t), g.normal(size=dim) * amp / k)
    return SampledLoop(pts)


def random_path(r, N=65, degree=3, amp=0.5, dim=3):
    """Random open polynomial path on Chebyshev-Lobatto nodes."""
    import numpy as np
    from .loopspace.loops import open_path
    g = _np_rng(r)
    C = g.normal(size=(degree + 1, dim)) * amp

    def fn(t):
        return np.stack([np.polyval(C[:, i], t) for i in range(dim)], axis=1)

    return open_path(fn, N)


def random_tangent(r, loop, modes=2, amp=0.5):
    """Smooth periodic sample tangent (a constant vector field on loop space)."""
    import numpy as np
    g = _np_rng(r)
    t = loop.tau
    X = np.tile(g.normal(size=loop.n) * amp, (loop.N, 1))
    for k in range(1, modes + 1):
        X += np.outer(np.cos(2 * np.pi * k * t), g.normal(size=loop.n) * amp / k)
        X += np.outer(np.sin(2 * np.pi * k * t), g.normal(size=loop.n) * amp / k)
    return X
