"""Line, Wilson, surface and D-brane holonomies.

Conventions: ``hol(gamma) = exp(-oint gamma^* A)``; the Wilson loop of a
matrix connection ``a`` is ``tr P exp(-oint gamma^* a)`` with later
parameter values acting on the left; surface holonomy of a trivialized
gerbe is ``exp(-int rho)``.
"""

import numpy as np
from scipy.linalg import expm

from .. import kernels
from ..cech import CechCochain
from ..errors import DimensionMismatch, PatchGap
from ..numeric import eval_form, eval_poly
from .surfaces import TriangulatedSurface
from .transgression import transgress_form


def line_holonomy(A, gamma):
    """``exp(-oint gamma^* A)`` for a global 1-form ``A``."""
    if A.deg != 1:
        raise DimensionMismatch("line holonomy needs a 1-form")
    return complex(np.exp(-transgress_form(A, gamma)))


def _arc_integral(A, gamma, t0, t1, pieces=8, order=24):
    """Gauss-Legendre integral of ``gamma^* A`` over ``[t0, t1]`` on the interpolant."""
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(t0, t1, pieces + 1)
    total = 0j
    for a, b in zip(edges[:-1], edges[1:]):
        t = (a + b) / 2 + (b - a) / 2 * x
        pts = gamma.at(t % 1.0)
        vel = gamma.at(t % 1.0, derivative=True)
        total += (b - a) / 2 * np.dot(w, eval_form(A, pts, [vel]))
    return total


def line_holonomy_patches(cover, A, f, gamma, arcs):
    """Holonomy from local connection forms and transition functions.

    Parameters
    ----------
    cover : Cover
    A : dict
        Patch label -> 1-form ``A_a``.
    f : CechCochain or dict
        U(1) transitions with ``A_a - A_b = dlog f_ab``.
    gamma : SampledLoop (closed)
    arcs : list of (tau_start, label)
        Arc k runs from its start to the next start (cyclically).

    Returns
    -------
    complex
        ``prod_k exp(-int_{arc_k} A_{a_k}) * prod_k f_{a_k a_{k+1}}(p_k)`` with
        ``p_k`` the end point of arc k.
    """
    if not arcs:
        raise PatchGap("no arcs cover the loop")
    if not isinstance(f, CechCochain):
        f = CechCochain(cover, 1, "u1", f)
    arcs = sorted((float(t) % 1.0, lab) for t, lab in arcs)
    total = 0j
    factor = 1 + 0j
    m = len(arcs)
    for k, (t0, lab) in enumerate(arcs):
        if lab not in A:
            raise PatchGap(f"no connection form on patch {lab!r}", details=[{"arc": k}])
        t1 = arcs[(k + 1) % m][0]
        if t1 <= t0:
            t1 += 1.0
        total += _arc_integral(A[lab], gamma, t0, t1)
        nxt = arcs[(k + 1) % m][1]
        if nxt != lab:
            if (lab, nxt) not in cover:
                raise PatchGap(f"switch {lab!r} -> {nxt!r} outside the nerve", details=[{"arc": k}])
            p = gamma.at(np.array([t1 % 1.0]))
            factor *= np.exp(2j * np.pi * eval_poly(f[(lab, nxt)].q, p)[0])
    return complex(np.exp(-total) * factor)


def matrix_form_eval(a, X, V):
    """Evaluate a matrix of 1-forms ``a[r][c]`` on vectors: (K, r, c) array."""
    if hasattr(a, "evaluate"):
        return a.evaluate(X, V)
    r, c = len(a), len(a[0])
    out = np.empty((X.shape[0], r, c), dtype=np.complex128)
    for i in range(r):
        for j in range(c):
            out[:, i, j] = eval_form(a[i][j], X, [V])
    return out


def path_ordered(a, gamma):
    """Midpoint path-ordered exponential ``M_{N-1} ... M_0`` of ``-gamma^* a``.

    ``M_j = expm(-h a(gamma'))`` at ``tau_j + h/2`` with ``h = 1/N``;
    second order in h.
    """
    N = gamma.N
    h = 1.0 / N
    mid = (np.arange(N) + 0.5) * h
    X = gamma.at(mid)
    V = gamma.at(mid, derivative=True)
    vals = matrix_form_eval(a, X, V)
    mats = np.stack([expm(-h * m) for m in vals])
    return kernels.ordered_product(mats)


def wilson_loop(a, gamma):
    """``tr P exp(-oint gamma^* a)``."""
    return complex(np.trace(path_ordered(a, gamma)))


def transgress_section_wilson(E, gamma):
    """Wilson loop of the connection of a section in the trivial-gerbe regime.

    ``E`` is a :class:`~gerbelab.twovect.GerbeMorphism` on a one-patch
    cover or a bare matrix of 1-forms.
    """
    a = E.connection() if hasattr(E, "connection") else E
    return wilson_loop(a, gamma)


def surface_holonomy(data, surface, mode="trivialized"):
    """Holonomy of a closed triangulated surface.

    Parameters
    ----------
    data : PolyForm or LocalGerbe
        The curving ``rho`` (trivialized mode) or a gerbe (local mode).
    surface : TriangulatedSurface
    mode : {"trivialized", "local"}
    """
    surface.require_closed()
    if mode == "trivialized":
        rho = data if not hasattr(data, "cover") else _single_curving(data)
        return complex(np.exp(-surface.integrate(rho)))
    if mode != "local":
        raise ValueError(f"unknown mode {mode!r}")
    return _local_surface_holonomy(data, surface)


def _single_curving(L):
    if len(L.cover.labels) != 1:
        raise PatchGap("trivialized mode needs a single-patch gerbe; use mode='local'")
    return L.B[(L.cover.labels[0],)]


def _need(cover, labels):
    s = tuple(dict.fromkeys(labels))
    if s not in cover:
        raise PatchGap(f"overlap {s} is not in the nerve", details=[list(s)])


def _local_surface_holonomy(L, S):
    """Face, edge and vertex factors of a patch assignment.

    With face patch ``a_f``, edge patch ``a_e`` and vertex patch ``a_v``::

        hol = prod_f exp(-int_f B_{a_f})
              prod_{(f,e)} exp(eps_fe int_e A_{a_f a_e})
              prod_{(f,e,v)} g_{a_f a_e a_v}(v)^(eps_fe eps_ev)

    where ``eps_fe eps_ev = +1`` when ``e``, run along the boundary of f,
    ends at ``v``.  Reduces to ``exp(-int rho)`` for trivialized data.
    """
    asg = S.assignment
    if asg is None:
        raise PatchGap("local mode needs a patch assignment")
    cov = L.cover
    faces, edges, verts = asg["faces"], asg["edges"], asg["vertices"]
    log = 0j
    # face terms
    fint = {}
    for lab in set(faces):
        fint[lab] = S.integrate_faces(L.B[(lab,)])
    for k, lab in enumerate(faces):
        log -= fint[lab][k]
    pts = S.points()
    edge_cache = {}
    for k, fe in enumerate(S.oriented_edges()):
        af = faces[k]
        for i, j in fe:
            key = (min(i, j), max(i, j))
            if key not in edges:
                raise PatchGap(f"edge {key} has no patch", details=[list(key)])
            ae = edges[key]
            _need(cov, (af, ae))
            if af != ae:
                ck = (af, ae, key)
                if ck not in edge_cache:
                    edge_cache[ck] = S.edge_integral(L.A[(af, ae)], key[0], key[1])
                sgn = 1 if (i, j) == key else -1
                log += sgn * edge_cache[ck]
            # vertex terms: the edge runs i -> j along the face boundary
            for v, s in ((j, 1), (i, -1)):
                av = verts[v]
                _need(cov, (af, ae, av))
                if len({af, ae, av}) == 3:
                    q = L.g[(af, ae, av)].q
                    log += s * 2j * np.pi * eval_poly(q, pts[v:v + 1])[0]
    return complex(np.exp(log))


def dbrane_holonomy(rho, a, disc, boundary):
    """``tr hol_E(boundary) * exp(-int_D rho)`` in the trivial-gerbe regime.

    Parameters
    ----------
    rho : PolyForm
        Curving of the trivial gerbe pulled back to the disc.
    a : matrix of 1-forms (or an object with ``connection()``)
        Connection of the boundary data.  A compatible change of
        trivialization is ``(rho + d lam, a - lam 1)``.
    disc : TriangulatedSurface
    boundary : SampledLoop
        The boundary loop with the induced orientation.
    """
    if not isinstance(disc, TriangulatedSurface):
        raise TypeError("disc must be a TriangulatedSurface")
    w = transgress_section_wilson(a, boundary)
    return complex(w * np.exp(-disc.integrate(rho)))
