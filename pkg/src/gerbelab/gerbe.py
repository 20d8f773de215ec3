"""Local U(1) bundle gerbes with connective structure.

A gerbe over a :class:`~gerbelab.cech.Cover` is the Deligne 2-cocycle
``(g, A, B)`` in the complex of degree 2.  Spelled out with the
package convention this means, exactly:

* ``g_acd g_abc = g_abd g_bcd`` on quadruple overlaps,
* ``A_bc - A_ac + A_ab = -dlog g_abc`` on triple overlaps,
* ``B_a - B_b = dA_ab`` on double overlaps,
* the patchwise ``dB_a`` glue to a global 3-form ``H``.
"""

from fractions import Fraction

from .cech import CechCochain, Cover, DeligneCochain, U1Function, cech_delta
from .errors import (ConnectionMismatch, CoverMismatch, CurvingMismatch, InconsistentPatches,
                     NotACocycle)
from .exterior import Poly, PolyForm, exterior_derivative
from .exterior.linalg import solve, to_rf


class LocalGerbe:
    """Validated gerbe data ``(g, A, B)`` on a cover.

    Use :func:`make_gerbe` to construct; the constructor here trusts its
    input.
    """

    def __init__(self, cover, g, A, B, H):
        self.cover = cover
        self.g = g
        self.A = A
        self.B = B
        self.H = H

    @property
    def dim(self):
        return self.cover.dim

    def to_deligne(self):
        return DeligneCochain(2, 2, [self.g, self.A, self.B])

    def to_json(self, cover_ref="cover"):
        return {"cover_ref": cover_ref,
                "g": [{"simplex": list(s), "value": self.g.values[s].to_json()} for s in self.g.simplices()],
                "A": [{"simplex": list(s), "value": self.A.values[s].to_json()} for s in self.A.simplices()],
                "B": [{"simplex": list(s), "value": self.B.values[s].to_json()} for s in self.B.simplices()]}

    def __repr__(self):
        return f"LocalGerbe({self.cover!r})"


class GerbeReport:
    """Layered validation result."""

    def __init__(self, layers):
        self.layers = layers

    @property
    def ok(self):
        return all(not v for v in self.layers.values())

    def __bool__(self):
        return self.ok

    def first_failure(self):
        for k, v in self.layers.items():
            if v:
                return k, v
        return None

    def to_json(self):
        return {"ok": self.ok, "layers": {k: v for k, v in self.layers.items()}}


def _as_cochain(cover, k, kind, data):
    if isinstance(data, CechCochain):
        if data.cover != cover:
            raise CoverMismatch("cochain on a different cover")
        return data
    return CechCochain(cover, k, kind, data)


def check_gerbe_data(cover, g, A, B):
    """Check the four gerbe conditions independently of the Deligne operator.

    Returns a :class:`GerbeReport` with offending simplices per layer.
    """
    g = _as_cochain(cover, 2, "u1", g)
    A = _as_cochain(cover, 1, 1, A)
    B = _as_cochain(cover, 0, 2, B)
    layers = {"cocycle": [], "connection": [], "curving": [], "curvature": []}
    for a, b, c, d in cover.simplices(3):
        lhs = g[(a, c, d)] * g[(a, b, c)]
        rhs = g[(a, b, d)] * g[(b, c, d)]
        if lhs != rhs:
            r = (lhs * rhs.inverse()).q
            layers["cocycle"].append({"simplex": [a, b, c, d], "residual": r.to_json()})
    for a, b, c in cover.simplices(2):
        r = A[(b, c)] - A[(a, c)] + A[(a, b)] + g[(a, b, c)].dlog()
        if r:
            layers["connection"].append({"simplex": [a, b, c], "residual": r.to_json()})
    for a, b in cover.simplices(1):
        r = B[(a,)] - B[(b,)] - exterior_derivative(A[(a, b)])
        if r:
            layers["curving"].append({"simplex": [a, b], "residual": r.to_json()})
    dB = {a: exterior_derivative(B[(a,)]) for a in cover.labels}
    first = dB[cover.labels[0]]
    for a in cover.labels[1:]:
        if dB[a] != first:
            layers["curvature"].append({"simplex": [a]})
    return GerbeReport(layers), (g, A, B, first)


_LAYER_ERRORS = {"cocycle": NotACocycle, "connection": ConnectionMismatch,
                 "curving": CurvingMismatch, "curvature": InconsistentPatches}


def make_gerbe(cover, g, A, B):
    """Build and validate a :class:`LocalGerbe`.

    Raises
    ------
    NotACocycle, ConnectionMismatch, CurvingMismatch, InconsistentPatches
        For the first failing layer, with offending simplices in
        ``details``.
    """
    rep, (g, A, B, H) = check_gerbe_data(cover, g, A, B)
    bad = rep.first_failure()
    if bad:
        layer, where = bad
        raise _LAYER_ERRORS[layer](f"gerbe {layer} condition fails on {len(where)} simplices", details=where)
    return LocalGerbe(cover, g, A, B, H)


def trivial_gerbe(rho, cover=None):
    """The trivial gerbe with curving ``rho`` (single patch by default)."""
    if cover is None:
        cover = Cover(rho.n, ["U"], [("U",)])
    g = CechCochain(cover, 2, "u1")
    A = CechCochain(cover, 1, 1)
    B = CechCochain(cover, 0, 2, {(a,): rho for a in cover.labels})
    return make_gerbe(cover, g, A, B)


def curvature_3form(L):
    """Global curvature H; agrees with the Deligne curvature of the class."""
    return L.H


def dd_cocycle(L):
    """The U(1) Cech 2-cocycle g."""
    return L.g


def _same_cover(L1, L2):
    if L1.cover != L2.cover:
        raise CoverMismatch("gerbes on different covers")


def tensor(L1, L2):
    _same_cover(L1, L2)
    return make_gerbe(L1.cover, L1.g + L2.g, L1.A + L2.A, L1.B + L2.B)


def dual(L):
    return make_gerbe(L.cover, -L.g, -L.A, -L.B)


class Trivialization:
    """Data ``(h, a, rho)`` with ``h`` on double overlaps, ``a`` per patch.

    The convention, read off from the Deligne operator, is
    ``(g, A, B) = D(h, -a) + (0, 0, rho)``::

        g = dh,   A_ab = a_b - a_a - dlog h_ab,   B_a = rho - da_a.
    """

    def __init__(self, cover, h, a, rho):
        self.cover = cover
        self.h = _as_cochain(cover, 1, "u1", h)
        self.a = _as_cochain(cover, 0, 1, a)
        self.rho = rho

    def to_json(self, cover_ref="cover"):
        return {"cover_ref": cover_ref,
                "h": [{"simplex": list(s), "value": self.h.values[s].to_json()} for s in self.h.simplices()],
                "a": [{"simplex": list(s), "value": self.a.values[s].to_json()} for s in self.a.simplices()],
                "rho": self.rho.to_json()}


def verify_trivialization(L, T):
    """Check a trivialization layer by layer; exact.

    Returns
    -------
    GerbeReport
        Layers ``"g=dh"``, ``"A"``, ``"flatness"``.
    """
    if T.cover != L.cover:
        raise CoverMismatch("trivialization on a different cover")
    layers = {"g=dh": [], "A": [], "flatness": []}
    dh = cech_delta(T.h)
    for s in L.cover.simplices(2):
        if L.g.values[s] != dh.values[s]:
            layers["g=dh"].append({"simplex": list(s)})
    for a, b in L.cover.simplices(1):
        r = L.A[(a, b)] - (T.a[(b,)] - T.a[(a,)] - T.h[(a, b)].dlog())
        if r:
            layers["A"].append({"simplex": [a, b], "residual": r.to_json()})
    for a in L.cover.labels:
        r = exterior_derivative(T.a[(a,)]) - (T.rho - L.B[(a,)])
        if r:
            layers["flatness"].append({"simplex": [a], "residual": r.to_json()})
    return GerbeReport(layers)


def self_trivialization(L):
    """Canonical trivialization of ``L (x) dual(L)``: h = 1, a = 0, rho = 0."""
    LL = tensor(L, dual(L))
    n = L.dim
    return LL, Trivialization(L.cover, CechCochain(L.cover, 1, "u1"), CechCochain(L.cover, 0, 1),
                              PolyForm.zero(n, 2))


def search_trivialization(L):
    """Find a trivialization when all exponents of g are constant.

    Solves ``dh = g`` over Q for constant exponents, then
    ``a_b - a_a = A_ab`` along the nerve and ``rho = B_a + da_a``.
    Returns ``None`` if the exponent system has no rational solution or
    the connection cochain is not exact on the nerve.  This is a
    sufficient search: classes that only die modulo the integer lattice
    are not found.
    """
    cov = L.cover
    n = cov.dim
    for s in cov.simplices(2):
        if not L.g.values[s].q.is_constant():
            return None
    edges = cov.simplices(1)
    col = {e: i for i, e in enumerate(edges)}
    # linear system for constant exponents of h: (dh)_abc = h_bc - h_ac + h_ab
    rows, rhs = [], []
    for a, b, c in cov.simplices(2):
        rows.append({col[(b, c)]: to_rf(1), col[(a, c)]: to_rf(-1), col[(a, b)]: to_rf(1)})
        rhs.append(to_rf(L.g.values[(a, b, c)].q.constant_term()))
    hsol = solve(rows, rhs, len(edges)) if edges else []
    if hsol is None:
        return None
    h = {e: U1Function(Poly.const(n, hsol[col[e]].num)) for e in edges}
    h = CechCochain(cov, 1, "u1", h)
    # solve a_b - a_a = A_ab + dlog h_ab by propagation over each component
    target = {e: L.A.values[e] + h.values[e].dlog() for e in edges}
    a = {}
    for comp in cov.components():
        root = comp[0]
        a[root] = PolyForm.zero(n, 1)
        frontier = [root]
        while frontier:
            u = frontier.pop()
            for e in edges:
                if u not in e:
                    continue
                v = e[1] if e[0] == u else e[0]
                if v in a:
                    continue
                a[v] = a[u] + target[e] if e[0] == u else a[u] - target[e]
                frontier.append(v)
    aco = CechCochain(cov, 0, 1, {(p,): a[p] for p in cov.labels})
    rho = L.B[(cov.labels[0],)] + exterior_derivative(a[cov.labels[0]])
    T = Trivialization(cov, h, aco, rho)
    return T if verify_trivialization(L, T) else None


def gerbe_from_trivialization(cover, T):
    """The gerbe ``D(h, -a) + (0, 0, rho)``; always valid."""
    g = cech_delta(T.h)
    A = CechCochain(cover, 1, 1, {(a, b): T.a[(b,)] - T.a[(a,)] - T.h[(a, b)].dlog()
                                  for a, b in cover.simplices(1)})
    B = CechCochain(cover, 0, 2, {(a,): T.rho - exterior_derivative(T.a[(a,)]) for a in cover.labels})
    return make_gerbe(cover, g, A, B)


def gerbe_from_json(cover, data):
    n = cover.dim
    g = {tuple(e["simplex"]): U1Function.from_json(n, e["value"]) for e in data.get("g", [])}
    A = {tuple(e["simplex"]): PolyForm.from_json(e["value"]) for e in data.get("A", [])}
    B = {tuple(e["simplex"]): PolyForm.from_json(e["value"]) for e in data.get("B", [])}
    return make_gerbe(cover, CechCochain(cover, 2, "u1", g), CechCochain(cover, 1, 1, A),
                      CechCochain(cover, 0, 2, B))


def r3_curving(n=3):
    """``rho = -(2 pi i / 3!) eps_ijk x^i dx^j ^ dx^k`` on R^3, so ``d rho = -2 pi i vol``."""
    if n != 3:
        raise ValueError("the standard curving lives on R^3")
    from .exterior import dx, x, TWO_PI_I
    rho = (x(3, 1) * dx(3, 2, 3)) + (x(3, 2) * dx(3, 3, 1)) + (x(3, 3) * dx(3, 1, 2))
    return rho * (TWO_PI_I * Fraction(-1, 3))
