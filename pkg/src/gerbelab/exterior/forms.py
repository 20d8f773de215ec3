"""Polynomial differential forms and vector fields on R^n.

Indices are 0-based internally and in JSON.  The convenience
constructors :func:`x`, :func:`dx` and :func:`partial` take 1-based
indices so that test code reads like the usual coordinate notation.
"""

from fractions import Fraction
from itertools import permutations

from ..errors import DegreeMismatch, DimensionMismatch
from .poly import Poly, PolyMap
from .scalar import Scalar, ZERO


def perm_sign(seq):
    """Sign of the permutation sorting ``seq`` (0 if it has repeats)."""
    seq = list(seq)
    if len(set(seq)) != len(seq):
        return 0
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


class PolyForm:
    """A p-form ``sum_I f_I dx^I`` with polynomial coefficients.

    Only strictly increasing index tuples ``I`` are stored, so
    antisymmetry is structural.
    """

    __slots__ = ("n", "deg", "terms", "_h")

    def __init__(self, n, deg, terms=None):
        if not 0 <= deg:
            raise DegreeMismatch(f"negative degree {deg}")
        self.n = n
        self.deg = deg
        t = {}
        for idx, p in (terms or {}).items():
            idx = tuple(idx)
            if len(idx) != deg:
                raise DegreeMismatch(f"index {idx} in a {deg}-form")
            if not isinstance(p, Poly):
                p = Poly.const(n, p)
            if p.n != n:
                raise DimensionMismatch("coefficient dimension")
            if any(i < 0 or i >= n for i in idx):
                raise DimensionMismatch(f"index {idx} out of range for dimension {n}")
            s = perm_sign(idx)
            if s == 0:
                continue
            key = tuple(sorted(idx))
            q = p if s > 0 else -p
            q = t[key] + q if key in t else q
            if q:
                t[key] = q
            else:
                t.pop(key, None)
        self.terms = t
        self._h = None

    @classmethod
    def _raw(cls, n, deg, terms):
        f = object.__new__(cls)
        f.n = n
        f.deg = deg
        f.terms = terms
        f._h = None
        return f

    @classmethod
    def zero(cls, n, deg):
        return cls._raw(n, deg, {})

    @classmethod
    def function(cls, p):
        """Degree-0 form from a Poly."""
        return cls._raw(p.n, 0, {(): p} if p else {})

    def as_poly(self):
        if self.deg != 0:
            raise DegreeMismatch("not a 0-form")
        return self.terms.get((), Poly.zero(self.n))

    # linear structure
    def _check(self, other):
        if self.n != other.n:
            raise DimensionMismatch(f"forms on R^{self.n} and R^{other.n}")
        if self.deg != other.deg:
            raise DegreeMismatch(f"adding {self.deg}-form and {other.deg}-form")

    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        self._check(other)
        out = dict(self.terms)
        for k, p in other.terms.items():
            if k in out:
                q = out[k] + p
                if q:
                    out[k] = q
                else:
                    del out[k]
            else:
                out[k] = p
        return PolyForm._raw(self.n, self.deg, out)

    __radd__ = __add__

    def __neg__(self):
        return PolyForm._raw(self.n, self.deg, {k: -p for k, p in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        """Multiply by a scalar or a Poly (function)."""
        if isinstance(other, PolyForm):
            return wedge(self, other)
        if isinstance(other, Poly):
            if other.n != self.n:
                raise DimensionMismatch("function dimension")
        else:
            other = Scalar.of(other)
        out = {}
        for k, p in self.terms.items():
            q = p * other
            if q:
                out[k] = q
        return PolyForm._raw(self.n, self.deg, out)

    __rmul__ = __mul__

    def __xor__(self, other):
        return wedge(self, other)

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self.terms
        if not isinstance(other, PolyForm):
            return NotImplemented
        return (self.n, self.deg, self.terms) == (other.n, other.deg, other.terms)

    def __hash__(self):
        if self._h is None:
            self._h = hash((self.n, self.deg, frozenset(self.terms.items())))
        return self._h

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def conj(self):
        return PolyForm._raw(self.n, self.deg, {k: p.conj() for k, p in self.terms.items()})

    @property
    def poly_degree(self):
        return max((p.degree for p in self.terms.values()), default=-1)

    def is_constant(self):
        return all(p.is_constant() for p in self.terms.values())

    def coeff(self, *idx):
        """Coefficient of dx^idx (0-based, any order, with sign)."""
        s = perm_sign(idx)
        if s == 0:
            return Poly.zero(self.n)
        p = self.terms.get(tuple(sorted(idx)), Poly.zero(self.n))
        return p if s > 0 else -p

    def sorted_terms(self):
        return sorted(self.terms.items())

    def map_coeffs(self, fn):
        out = {}
        for k, p in self.terms.items():
            q = fn(p)
            if q:
                out[k] = q
        return PolyForm._raw(self.n, self.deg, out)

    def to_json(self):
        return {"dim": self.n, "deg": self.deg,
                "terms": [{"idx": list(k), "poly": p.to_json()} for k, p in self.sorted_terms()]}

    @classmethod
    def from_json(cls, data):
        n = data["dim"]
        return cls(n, data["deg"], {tuple(t["idx"]): Poly.from_json(n, t["poly"]) for t in data["terms"]})

    def __repr__(self):
        if not self.terms:
            return f"0[{self.deg}-form]"
        parts = []
        for k, p in self.sorted_terms():
            basis = "^".join(f"dx{i + 1}" for i in k)
            parts.append(f"({p})" + (f" {basis}" if basis else ""))
        return " + ".join(parts)


class VectorField:
    """Polynomial vector field ``sum_i X^i d/dx^i``."""

    __slots__ = ("n", "comps")

    def __init__(self, comps):
        comps = tuple(c if isinstance(c, Poly) else None for c in comps)
        if any(c is None for c in comps):
            raise TypeError("vector field components must be Poly")
        n = len(comps)
        for c in comps:
            if c.n != n:
                raise DimensionMismatch("component dimension differs from field dimension")
        self.n = n
        self.comps = comps

    @classmethod
    def constant(cls, vec):
        n = len(vec)
        return cls([Poly.const(n, v) for v in vec])

    @classmethod
    def zero(cls, n):
        return cls([Poly.zero(n)] * n)

    def __add__(self, other):
        return VectorField([a + b for a, b in zip(self.comps, other.comps)])

    def __neg__(self):
        return VectorField([-a for a in self.comps])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, s):
        return VectorField([a * s for a in self.comps])

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, VectorField) and self.comps == other.comps

    def __hash__(self):
        return hash(self.comps)

    def is_zero(self):
        return all(not c for c in self.comps)

    def apply(self, p):
        """Directional derivative X(p)."""
        out = Poly.zero(self.n)
        for i, c in enumerate(self.comps):
            if c:
                out = out + c * p.partial(i)
        return out

    def bracket(self, other):
        """Lie bracket ``[X, Y]^i = X(Y^i) - Y(X^i)``."""
        return VectorField([self.apply(b) - other.apply(a) for a, b in zip(self.comps, other.comps)])

    def __call__(self, x):
        return [c(x) for c in self.comps]

    def poly_degree(self):
        return max((c.degree for c in self.comps), default=-1)

    def to_json(self):
        return {"dim": self.n, "comps": [c.to_json() for c in self.comps]}

    @classmethod
    def from_json(cls, data):
        return cls([Poly.from_json(data["dim"], c) for c in data["comps"]])

    def __repr__(self):
        return "VectorField(" + ", ".join(repr(c) for c in self.comps) + ")"


def _merge(i, j):
    """Sign and sorted union of two increasing tuples (0 on overlap)."""
    if set(i) & set(j):
        return 0, None
    seq = i + j
    return perm_sign(seq), tuple(sorted(seq))


def wedge(a, b):
    """Exterior product; the zero form when the degree exceeds n."""
    if a.n != b.n:
        raise DimensionMismatch(f"wedge of forms on R^{a.n} and R^{b.n}")
    deg = a.deg + b.deg
    out = {}
    if deg > a.n:
        return PolyForm._raw(a.n, deg, out)
    for i, p in a.terms.items():
        for j, q in b.terms.items():
            s, k = _merge(i, j)
            if not s:
                continue
            r = p * q
            if s < 0:
                r = -r
            if k in out:
                r = out[k] + r
                if not r:
                    del out[k]
                    continue
            if r:
                out[k] = r
    return PolyForm._raw(a.n, deg, out)


def exterior_derivative(a):
    """Exterior derivative d."""
    out = {}
    for idx, p in a.terms.items():
        for j in range(a.n):
            if j in idx:
                continue
            q = p.partial(j)
            if not q:
                continue
            s, k = _merge((j,), idx)
            if s < 0:
                q = -q
            if k in out:
                q = out[k] + q
                if not q:
                    del out[k]
                    continue
            out[k] = q
    return PolyForm._raw(a.n, a.deg + 1, out)


def interior_product(X, a):
    """Contraction ``iota_X a`` into the first slot."""
    if a.deg == 0:
        raise DegreeMismatch("interior product of a 0-form")
    if X.n != a.n:
        raise DimensionMismatch("vector field and form dimensions differ")
    out = {}
    for idx, p in a.terms.items():
        for pos, i in enumerate(idx):
            c = X.comps[i]
            if not c:
                continue
            q = c * p
            if pos % 2:
                q = -q
            k = idx[:pos] + idx[pos + 1:]
            if k in out:
                q = out[k] + q
                if not q:
                    del out[k]
                    continue
            out[k] = q
    return PolyForm._raw(a.n, a.deg - 1, out)


def lie_derivative(X, a):
    """Lie derivative via Cartan's formula."""
    if a.deg == 0:
        return PolyForm.function(X.apply(a.as_poly()))
    da = exterior_derivative(a)
    out = interior_product(X, da) if da.deg <= a.n else PolyForm.zero(a.n, a.deg)
    return exterior_derivative(interior_product(X, a)) + out


def pullback(f, a):
    """Pullback of a form along a polynomial map."""
    if f.n != a.n:
        raise DimensionMismatch(f"map target R^{f.n} but form on R^{a.n}")
    m = f.m
    dfs = [PolyForm(m, 1, {(j,): c.partial(j) for j in range(m)}) for c in f.comps]
    out = PolyForm.zero(m, a.deg)
    for idx, p in a.terms.items():
        t = PolyForm.function(p.substitute(f.comps, m))
        for i in idx:
            t = wedge(t, dfs[i])
        out = out + t
    return out


def _is_exact(v):
    return isinstance(v, (int, Fraction)) and not isinstance(v, bool)


def _det(rows):
    k = len(rows)
    if k == 0:
        return 1
    total = 0
    for perm in permutations(range(k)):
        s = perm_sign(perm)
        t = s
        for r, c in enumerate(perm):
            t = t * rows[r][c]
        total = total + t
    return total


def evaluate(a, x, Xs=()):
    """Evaluate ``a_x(X_1, ..., X_p)``.

    Exact (a :class:`Scalar`) when ``x`` and the vectors are ints or
    Fractions, otherwise a Python complex computed in double precision.
    """
    Xs = list(Xs)
    if len(x) != a.n or any(len(v) != a.n for v in Xs):
        raise DimensionMismatch("point or vector dimension")
    if len(Xs) != a.deg:
        raise DegreeMismatch(f"{a.deg}-form evaluated on {len(Xs)} vectors")
    exact = all(_is_exact(v) for v in x) and all(_is_exact(c) for v in Xs for c in v)
    if exact:
        out = ZERO
        for idx, p in a.terms.items():
            m = _det([[Fraction(v[i]) for v in Xs] for i in idx])
            if m:
                out = out + p(x) * m
        return out
    from ..numeric import compile_poly, eval_compiled
    out = 0j
    for idx, p in a.terms.items():
        m = _det([[complex(v[i]) for v in Xs] for i in idx])
        if m:
            out += complex(eval_compiled(compile_poly(p), [x])[0]) * m
    return out


def x(n, i):
    """Coordinate function x^i as a 0-form (1-based)."""
    return Poly.var(n, i - 1)


def dx(n, *idx):
    """Basis form dx^{i1}^...^dx^{ik} with constant coefficient 1 (1-based)."""
    return PolyForm(n, len(idx), {tuple(i - 1 for i in idx): Poly.const(n, 1)})


def partial(n, i):
    """Constant coordinate field d/dx^i (1-based)."""
    comps = [Poly.zero(n)] * n
    comps[i - 1] = Poly.const(n, 1)
    return VectorField(comps)


def vol(n):
    return dx(n, *range(1, n + 1))


__all__ = ["PolyForm", "VectorField", "PolyMap", "wedge", "exterior_derivative",
           "interior_product", "lie_derivative", "pullback", "evaluate", "x", "dx",
           "partial", "vol", "perm_sign"]
