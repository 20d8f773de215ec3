"""Multivariate polynomials over Q(i)[pi] and polynomial maps."""

from fractions import Fraction

from ..errors import DimensionMismatch
from .scalar import Scalar, ZERO, ONE


class Poly:
    """Polynomial in ``n`` real variables with :class:`Scalar` coefficients.

    Terms are kept in canonical form: a dict from exponent tuples to
    nonzero scalars.  Instances are treated as immutable.
    """

    __slots__ = ("n", "terms", "_h")

    def __init__(self, n, terms=None):
        self.n = n
        t = {}
        if terms:
            for e, s in terms.items():
                e = tuple(e)
                if len(e) != n:
                    raise DimensionMismatch(f"exponent {e} in dimension {n}")
                s = Scalar.of(s)
                if s:
                    t[e] = t[e] + s if e in t else s
                    if not t[e]:
                        del t[e]
        self.terms = t
        self._h = None

    @classmethod
    def _raw(cls, n, terms):
        p = object.__new__(cls)
        p.n = n
        p.terms = terms
        p._h = None
        return p

    @classmethod
    def const(cls, n, s):
        s = Scalar.of(s)
        return cls._raw(n, {(0,) * n: s} if s else {})

    @classmethod
    def zero(cls, n):
        return cls._raw(n, {})

    @classmethod
    def var(cls, n, i):
        """The coordinate function x^i, 0-based index."""
        e = [0] * n
        e[i] = 1
        return cls._raw(n, {tuple(e): ONE})

    @classmethod
    def monomial(cls, exps, s=ONE):
        return cls(len(exps), {tuple(exps): s})

    def _check(self, other):
        if other.n != self.n:
            raise DimensionMismatch(f"polynomials in {self.n} and {other.n} variables")

    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(self.n, other)
        self._check(other)
        if not other.terms:
            return self
        out = dict(self.terms)
        for e, s in other.terms.items():
            if e in out:
                v = out[e] + s
                if v:
                    out[e] = v
                else:
                    del out[e]
            else:
                out[e] = s
        return Poly._raw(self.n, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw(self.n, {e: -s for e, s in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(self.n, other)
        return self + (-other)

    def __rsub__(self, other):
        return Poly.const(self.n, other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            if not isinstance(other, (int, Fraction, complex, Scalar)):
                return NotImplemented
            s = Scalar.of(other)
            if not s:
                return Poly.zero(self.n)
            return Poly._raw(self.n, {e: c * s for e, c in self.terms.items()})
        self._check(other)
        out = {}
        for e1, s1 in self.terms.items():
            for e2, s2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = s1 * s2
                if e in out:
                    v = out[e] + v
                    if v:
                        out[e] = v
                    else:
                        del out[e]
                elif v:
                    out[e] = v
        return Poly._raw(self.n, out)

    __rmul__ = __mul__

    def __pow__(self, k):
        out = Poly.const(self.n, 1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.n == other.n and self.terms == other.terms
        try:
            return self == Poly.const(self.n, other)
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        if self._h is None:
            self._h = hash((self.n, frozenset(self.terms.items())))
        return self._h

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    @property
    def degree(self):
        """Total degree (-1 for the zero polynomial)."""
        return max((sum(e) for e in self.terms), default=-1)

    def is_constant(self):
        return all(not any(e) for e in self.terms)

    def constant_term(self):
        return self.terms.get((0,) * self.n, ZERO)

    def conj(self):
        return Poly._raw(self.n, {e: s.conj() for e, s in self.terms.items()})

    def partial(self, i):
        """Partial derivative with respect to x^i (0-based)."""
        out = {}
        for e, s in self.terms.items():
            k = e[i]
            if k:
                f = list(e)
                f[i] = k - 1
                out[tuple(f)] = s * k
        return Poly._raw(self.n, out)

    def depends_on(self, i):
        return any(e[i] for e in self.terms)

    def sorted_terms(self):
        return sorted(self.terms.items())

    def __call__(self, x):
        """Exact evaluation at a rational point; returns a Scalar."""
        if len(x) != self.n:
            raise DimensionMismatch(f"point of dimension {len(x)} for {self.n} variables")
        x = [Fraction(v) for v in x]
        out = ZERO
        for e, s in self.terms.items():
            m = Fraction(1)
            for v, k in zip(x, e):
                if k:
                    m *= v ** k
            out = out + s * m
        return out

    def substitute(self, comps, m):
        """Compose with polynomials ``comps`` (len n) in ``m`` variables."""
        if len(comps) != self.n:
            raise DimensionMismatch("substitution arity")
        out = Poly.zero(m)
        cache = {}

        def power(i, k):
            key = (i, k)
            if key not in cache:
                cache[key] = comps[i] ** k
            return cache[key]

        for e, s in self.terms.items():
            t = Poly.const(m, s)
            for i, k in enumerate(e):
                if k:
                    t = t * power(i, k)
            out = out + t
        return out

    def drop_var(self, i):
        """Remove variable i; requires independence of x^i."""
        out = {}
        for e, s in self.terms.items():
            if e[i]:
                raise ValueError(f"polynomial depends on variable {i}")
            out[e[:i] + e[i + 1:]] = s
        return Poly._raw(self.n - 1, out)

    def to_json(self):
        return [{"exps": list(e), "scalar": s.to_json()} for e, s in self.sorted_terms()]

    @classmethod
    def from_json(cls, n, data):
        return cls(n, {tuple(d["exps"]): Scalar.from_json(d["scalar"]) for d in data})

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, s in self.sorted_terms():
            mono = "*".join(f"x{i + 1}" + (f"^{k}" if k > 1 else "") for i, k in enumerate(e) if k)
            parts.append(f"({s})" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)


class PolyMap:
    """Polynomial map R^m -> R^n given by n component polynomials."""

    __slots__ = ("m", "n", "comps")

    def __init__(self, comps, m=None):
        comps = tuple(comps)
        if m is None:
            if not comps:
                raise DimensionMismatch("cannot infer source dimension of empty map")
            m = comps[0].n
        for c in comps:
            if c.n != m:
                raise DimensionMismatch("components must share the source dimension")
        self.m = m
        self.n = len(comps)
        self.comps = comps

    @classmethod
    def identity(cls, n):
        return cls([Poly.var(n, i) for i in range(n)], m=n)

    def compose(self, inner):
        """``self o inner``."""
        if inner.n != self.m:
            raise DimensionMismatch("composition dimensions")
        return PolyMap([c.substitute(inner.comps, inner.m) for c in self.comps], m=inner.m)

    def jacobian(self):
        """``J[i][j] = d f^i / d y^j``."""
        return [[c.partial(j) for j in range(self.m)] for c in self.comps]

    def __eq__(self, other):
        return isinstance(other, PolyMap) and self.m == other.m and self.comps == other.comps

    def __hash__(self):
        return hash((self.m, self.comps))
