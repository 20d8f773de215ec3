"""Triangulated surfaces with an optional exact chart.

A surface is stored in parameter space: vertices ``P`` (V, m), oriented
triangles ``T`` (F, 3) and a chart ``phi`` with Jacobian ``jac`` mapping
parameter points to R^n.  Without a chart the parameter points are the
embedded points and triangles are flat.  Integrals of 2-forms use the
3-point rule on each parameter triangle pulled back through the chart,
so curved surfaces (the round sphere, a disc bounded by the exact
circle) are integrated without a polyhedral defect.
"""

from collections import Counter

import numpy as np

from .. import kernels
from ..errors import DimensionMismatch, NotClosed
from ..numeric import eval_form

# barycentric 3-point rule, exact for quadratics; weights sum to the
# reference area 1/2
_QB = np.array([[1 / 6, 1 / 6], [2 / 3, 1 / 6], [1 / 6, 2 / 3]])
_QW = np.array([1 / 6, 1 / 6, 1 / 6])


class TriangulatedSurface:
    """Oriented triangulated surface.

    Parameters
    ----------
    vertices : (V, m) array
        Parameter-space vertex positions.
    triangles : (F, 3) int array
        Oriented triangles.
    chart : callable, optional
        ``chart(Y) -> (K, n)`` for parameter points ``Y`` (K, m).
    jac : callable, optional
        ``jac(Y) -> (K, n, m)``; required with ``chart``.
    assignment : dict, optional
        ``{"faces": [label per triangle], "edges": {(i, j): label},
        "vertices": [label per vertex]}`` for local-mode holonomy.
    """

    def __init__(self, vertices, triangles, chart=None, jac=None, assignment=None):
        self.P = np.array(vertices, dtype=np.float64)
        self.T = np.array(triangles, dtype=np.int64).reshape(-1, 3)
        if (chart is None) != (jac is None):
            raise ValueError("chart and jac must be given together")
        self.chart = chart
        self.jac = jac
        self.assignment = assignment

    @property
    def n(self):
        return self.points().shape[1]

    def points(self, Y=None):
        """Embedded positions of parameter points (default: the vertices)."""
        Y = self.P if Y is None else np.atleast_2d(Y)
        return Y if self.chart is None else self.chart(Y)

    # combinatorics
    def oriented_edges(self):
        """Directed edges ``(i, j)`` of every triangle boundary, per face."""
        return [[(int(t[0]), int(t[1])), (int(t[1]), int(t[2])), (int(t[2]), int(t[0]))] for t in self.T]

    def boundary_edges(self):
        """Directed edges not cancelled by an opposite edge."""
        cnt = Counter(e for f in self.oriented_edges() for e in f)
        return sorted(e for e, c in cnt.items() if cnt.get((e[1], e[0]), 0) < c)

    def is_closed(self):
        cnt = Counter(e for f in self.oriented_edges() for e in f)
        for (i, j), c in cnt.items():
            if c != 1 or cnt.get((j, i), 0) != 1:
                return False
        return True

    def require_closed(self):
        if not self.is_closed():
            raise NotClosed("surface is not closed and consistently oriented",
                            details=[list(e) for e in self.boundary_edges()[:10]])

    # quadrature
    def quadrature(self):
        """Nodes (F*3, n), tangent pairs (F*3, n) x 2 and weights (F, 3)."""
        A = self.P[self.T[:, 0]]
        E1 = self.P[self.T[:, 1]] - A
        E2 = self.P[self.T[:, 2]] - A
        F = len(self.T)
        Y = (A[:, None, :] + _QB[None, :, 0, None] * E1[:, None, :]
             + _QB[None, :, 1, None] * E2[:, None, :]).reshape(F * 3, -1)
        e1 = np.repeat(E1, 3, axis=0)
        e2 = np.repeat(E2, 3, axis=0)
        if self.chart is None:
            X, t1, t2 = Y, e1, e2
        else:
            J = self.jac(Y)
            X = self.chart(Y)
            t1 = np.einsum("kij,kj->ki", J, e1)
            t2 = np.einsum("kij,kj->ki", J, e2)
        W = np.tile(_QW, (F, 1))
        return X, t1, t2, W

    def integrate(self, form):
        """Quadrature value of ``int_Sigma form`` for a 2-form."""
        if form.deg != 2:
            raise DimensionMismatch("surface integrals need a 2-form")
        X, t1, t2, W = self.quadrature()
        if form.n != X.shape[1]:
            raise DimensionMismatch("form and surface live in different dimensions")
        vals = eval_form(form, X, [t1, t2]).reshape(W.shape)
        return kernels.tri_sums(vals, W)

    def integrate_faces(self, form):
        """Per-triangle integrals, shape (F,)."""
        X, t1, t2, W = self.quadrature()
        vals = eval_form(form, X, [t1, t2]).reshape(W.shape)
        return (vals * W).sum(axis=1)

    def edge_integral(self, form, i, j, order=8):
        """``int`` of a 1-form along the chart image of the segment from vertex i to j."""
        x, w = np.polynomial.legendre.leggauss(order)
        s = (x + 1) / 2
        w = w / 2
        Y = self.P[i] + s[:, None] * (self.P[j] - self.P[i])
        e = np.tile(self.P[j] - self.P[i], (order, 1))
        if self.chart is None:
            X, t = Y, e
        else:
            X = self.chart(Y)
            t = np.einsum("kij,kj->ki", self.jac(Y), e)
        return complex(np.dot(w, eval_form(form, X, [t])))

    def to_json(self):
        out = {"vertices": [[float(v) for v in row] for row in self.points()],
               "triangles": [[int(i) for i in t] for t in self.T]}
        if self.assignment is not None:
            a = self.assignment
            out["assignment"] = {"faces": list(a["faces"]),
                                 "edges": [{"edge": list(e), "patch": p} for e, p in sorted(a["edges"].items())],
                                 "vertices": list(a["vertices"])}
        return out

    @classmethod
    def from_json(cls, data):
        asg = data.get("assignment")
        if asg is not None:
            asg = {"faces": list(asg["faces"]),
                   "edges": {tuple(e["edge"]): e["patch"] for e in asg["edges"]},
                   "vertices": list(asg["vertices"])}
        return cls(data["vertices"], data["triangles"], assignment=asg)


def _sphere_chart(radius, center):
    c = np.asarray(center, dtype=float)

    def chart(Y):
        r = np.linalg.norm(Y, axis=1, keepdims=True)
        return c + radius * Y / r

    def jac(Y):
        r = np.linalg.norm(Y, axis=1)
        u = Y / r[:, None]
        P = np.eye(3)[None] - u[:, :, None] * u[:, None, :]
        return radius * P / r[:, None, None]

    return chart, jac


def icosphere(subdivisions=4, radius=1.0, center=(0.0, 0.0, 0.0), exact=True):
    """Outward-oriented icosphere; with ``exact`` triangles are projected onto the round sphere."""
    t = (1 + 5 ** 0.5) / 2
    V = [(-1, t, 0), (1, t, 0), (-1, -t, 0), (1, -t, 0), (0, -1, t), (0, 1, t),
         (0, -1, -t), (0, 1, -t), (t, 0, -1), (t, 0, 1), (-t, 0, -1), (-t, 0, 1)]
    V = [np.array(v, dtype=float) / np.linalg.norm(v) for v in V]
    F = [(0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11), (1, 5, 9), (5, 11, 4),
         (11, 10, 2), (10, 7, 6), (7, 1, 8), (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8),
         (3, 8, 9), (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1)]
    for _ in range(subdivisions):
        mid = {}

        def midpoint(i, j):
            key = (min(i, j), max(i, j))
            if key not in mid:
                m = (V[i] + V[j]) / 2
                V.append(m / np.linalg.norm(m))
                mid[key] = len(V) - 1
            return mid[key]

        F2 = []
        for a, b, c in F:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            F2 += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        F = F2
    P = np.array(V)
    if exact:
        chart, jac = _sphere_chart(radius, center)
        return TriangulatedSurface(P, F, chart, jac)
    return TriangulatedSurface(np.asarray(center) + radius * P, F)


def polar_disc(n_r=16, n_theta=64, radius=1.0, center=(0.0, 0.0, 0.0), plane=(0, 1), dim=3):
    """Disc in a coordinate plane, parametrized by (r, theta).

    The boundary ``r = 1`` maps exactly onto the circle traversed
    counterclockwise, matching :meth:`SampledLoop.circle`.
    """
    rs = np.linspace(0.0, 1.0, n_r + 1)
    ths = np.linspace(0.0, 2 * np.pi, n_theta + 1)
    P = np.array([(r, th) for r in rs for th in ths])
    k = n_theta + 1
    F = []
    for i in range(n_r):
        for j in range(n_theta):
            a, b, c, d = i * k + j, i * k + j + 1, (i + 1) * k + j, (i + 1) * k + j + 1
            F += [(a, c, d), (a, d, b)]
    c0 = np.asarray(center, dtype=float)
    p0, p1 = plane

    def chart(Y):
        X = np.tile(c0, (len(Y), 1))
        X[:, p0] += radius * Y[:, 0] * np.cos(Y[:, 1])
        X[:, p1] += radius * Y[:, 0] * np.sin(Y[:, 1])
        return X

    def jac(Y):
        J = np.zeros((len(Y), dim, 2))
        J[:, p0, 0] = radius * np.cos(Y[:, 1])
        J[:, p1, 0] = radius * np.sin(Y[:, 1])
        J[:, p0, 1] = -radius * Y[:, 0] * np.sin(Y[:, 1])
        J[:, p1, 1] = radius * Y[:, 0] * np.cos(Y[:, 1])
        return J

    return TriangulatedSurface(P, F, chart, jac)
