"""Finite nerves, Cech cochains and the Deligne complex.

Conventions
-----------
Cech differential, for a k-cochain ``c``::

    (dc)(a_0 .. a_{k+1}) = sum_j (-1)^j c(a_0 .. ^a_j .. a_{k+1})

so that ``(dA)_abc = A_bc - A_ac + A_ab``.  Cochains are stored on
increasing simplices and extended alternatingly to all label tuples.

A Deligne k-cochain in the complex of degree n has components
``c_0`` (U(1)-valued, Cech degree k) and ``c_j`` (j-forms, Cech degree
k - j) for ``1 <= j <= min(k, n)``.  Its differential is::

    (D c)_j = (-1)^j (d c_{j-1} + dc_j)

where ``d c_0`` means dlog.  Every local formula for gerbes, line
bundles and trivializations in this package is read off from this one
operator.
"""

from fractions import Fraction
from itertools import combinations

from .errors import CoverMismatch, DegreeMismatch, InconsistentPatches, InvalidNerve, NotACocycle
from .exterior import Poly, PolyForm, TWO_PI_I, exterior_derivative
from .exterior.forms import perm_sign


class Cover:
    """Abstract nerve of a finite good cover of R^n.

    Parameters
    ----------
    dim : int
        Ambient dimension n.
    labels : list of str
        Patch labels; their order defines the orientation of simplices.
    nerve : iterable of label tuples
        Nonempty overlaps.  Must be closed under taking faces.
    """

    def __init__(self, dim, labels, nerve):
        self.dim = dim
        self.labels = tuple(labels)
        if len(set(self.labels)) != len(self.labels):
            raise InvalidNerve("duplicate patch labels")
        self._pos = {a: i for i, a in enumerate(self.labels)}
        simplices = set()
        for s in nerve:
            s = tuple(s)
            for a in s:
                if a not in self._pos:
                    raise InvalidNerve(f"unknown label {a!r} in {s}")
            if len(set(s)) != len(s):
                raise InvalidNerve(f"repeated label in {s}")
            simplices.add(self.canon(s))
        for a in self.labels:
            simplices.add((a,))
        for s in simplices:
            for r in range(1, len(s)):
                for f in combinations(s, r):
                    if f not in simplices:
                        raise InvalidNerve(f"face {f} of {s} missing from the nerve",
                                           details=[{"simplex": list(s), "missing": list(f)}])
        self._simplices = simplices
        self._by_k = {}
        for s in simplices:
            self._by_k.setdefault(len(s) - 1, []).append(s)
        for k in self._by_k:
            self._by_k[k].sort(key=lambda s: [self._pos[a] for a in s])

    @classmethod
    def from_maximal(cls, dim, labels, maximal):
        """Cover whose nerve is the face closure of the given simplices."""
        faces = set()
        for s in maximal:
            s = tuple(s)
            for r in range(1, len(s) + 1):
                faces.update(combinations(s, r))
        return cls(dim, labels, faces)

    def canon(self, s):
        return tuple(sorted(s, key=self._pos.__getitem__))

    def sign(self, s):
        """Sign of the permutation bringing ``s`` into label order."""
        return perm_sign([self._pos[a] for a in s])

    def simplices(self, k):
        """Ordered list of k-simplices ((k+1)-fold overlaps)."""
        return list(self._by_k.get(k, []))

    def __contains__(self, s):
        return self.canon(s) in self._simplices

    def max_dim(self):
        return max(self._by_k)

    def components(self):
        """Connected components of the 1-skeleton (lists of labels)."""
        parent = {a: a for a in self.labels}

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for a, b in self.simplices(1):
            parent[find(a)] = find(b)
        groups = {}
        for a in self.labels:
            groups.setdefault(find(a), []).append(a)
        return [groups[k] for k in sorted(groups, key=lambda r: self._pos[groups[r][0]])]

    def __eq__(self, other):
        return (isinstance(other, Cover) and self.dim == other.dim
                and self.labels == other.labels and self._simplices == other._simplices)

    def __hash__(self):
        return hash((self.dim, self.labels, frozenset(self._simplices)))

    def to_json(self):
        nerve = [list(s) for k in sorted(self._by_k) for s in self._by_k[k]]
        return {"dim": self.dim, "labels": list(self.labels), "nerve": nerve}

    @classmethod
    def from_json(cls, data):
        return cls(data["dim"], data["labels"], [tuple(s) for s in data["nerve"]])

    def __repr__(self):
        return f"Cover(dim={self.dim}, labels={list(self.labels)}, simplices={len(self._simplices)})"


def build_cover(labels, nerve, dim=3):
    return Cover(dim, labels, nerve)


class U1Function:
    """The U(1)-valued function exp(2 pi i q) for a polynomial exponent q."""

    __slots__ = ("q",)

    def __init__(self, q):
        self.q = q

    @classmethod
    def one(cls, n):
        return cls(Poly.zero(n))

    @classmethod
    def const(cls, n, r):
        return cls(Poly.const(n, Fraction(r)))

    @property
    def n(self):
        return self.q.n

    def __mul__(self, other):
        return U1Function(self.q + other.q)

    def inverse(self):
        return U1Function(-self.q)

    def is_one(self):
        """exp(2 pi i q) == 1 identically iff q is an integer constant."""
        if not self.q.is_constant():
            return False
        c = self.q.constant_term()
        return c.is_real_rational() and (not c or c.c[0][0].denominator == 1)

    def __eq__(self, other):
        return isinstance(other, U1Function) and (self * other.inverse()).is_one()

    def __hash__(self):
        # integer constant shifts are identified; hash the non-constant part
        return hash(frozenset((e, s) for e, s in self.q.terms.items() if any(e)))

    def dlog(self):
        """dlog exp(2 pi i q) = 2 pi i dq."""
        return exterior_derivative(PolyForm.function(self.q)) * TWO_PI_I

    def __call__(self, x):
        import cmath
        return cmath.exp(2j * cmath.pi * complex(self.q([Fraction(v) for v in x])))

    def to_json(self):
        return {"exponent": self.q.to_json()}

    @classmethod
    def from_json(cls, n, data):
        return cls(Poly.from_json(n, data["exponent"]))

    def __repr__(self):
        return f"exp(2pi i*({self.q}))"


# value kinds: "u1" or an int p for p-forms

def _vzero(kind, n):
    return U1Function.one(n) if kind == "u1" else PolyForm.zero(n, kind)


def _vadd(kind, a, b):
    return a * b if kind == "u1" else a + b


def _vneg(kind, a):
    return a.inverse() if kind == "u1" else -a


def _vis_zero(kind, a):
    return a.is_one() if kind == "u1" else a.is_zero()


def _vscale_sign(kind, a, s):
    if s > 0:
        return a
    return _vneg(kind, a)


def _vjson(kind, v):
    return v.to_json()


class CechCochain:
    """Cech k-cochain on a cover with values of one kind.

    Parameters
    ----------
    cover : Cover
    k : int
        Cech degree; values live on k-simplices.
    kind : "u1" or int
        U(1)-valued functions, or p-forms for an integer p.
    entries : dict
        Map from k-simplices (label tuples, any order) to values.  Missing
        simplices default to zero (the identity for U(1)).
    """

    def __init__(self, cover, k, kind, entries=None):
        self.cover = cover
        self.k = k
        self.kind = kind
        n = cover.dim
        vals = {}
        for s, v in (entries or {}).items():
            s = tuple(s)
            if len(s) != k + 1:
                raise DegreeMismatch(f"simplex {s} in a {k}-cochain")
            if s not in cover:
                raise CoverMismatch(f"simplex {s} not in the nerve")
            if kind != "u1" and (v.deg != kind or v.n != n):
                raise DegreeMismatch(f"value at {s} is not a {kind}-form on R^{n}")
            sg = cover.sign(s)
            if sg == 0:
                continue
            vals[cover.canon(s)] = _vscale_sign(kind, v, sg)
        for s in cover.simplices(k):
            vals.setdefault(s, _vzero(kind, n))
        self.values = vals

    def __getitem__(self, s):
        """Alternating extension to arbitrary label tuples."""
        s = tuple(s)
        if len(set(s)) != len(s):
            return _vzero(self.kind, self.cover.dim)
        sg = self.cover.sign(s)
        v = self.values[self.cover.canon(s)]
        return _vscale_sign(self.kind, v, sg)

    def simplices(self):
        return self.cover.simplices(self.k)

    def _compat(self, other):
        if self.cover != other.cover:
            raise CoverMismatch("cochains on different covers")
        if (self.k, self.kind) != (other.k, other.kind):
            raise DegreeMismatch("cochains of different degree or kind")

    def __add__(self, other):
        self._compat(other)
        return CechCochain(self.cover, self.k, self.kind,
                           {s: _vadd(self.kind, self.values[s], other.values[s]) for s in self.values})

    def __neg__(self):
        return CechCochain(self.cover, self.k, self.kind,
                           {s: _vneg(self.kind, v) for s, v in self.values.items()})

    def __sub__(self, other):
        return self + (-other)

    def map(self, fn, kind):
        return CechCochain(self.cover, self.k, kind, {s: fn(v) for s, v in self.values.items()})

    def is_zero(self):
        return all(_vis_zero(self.kind, v) for v in self.values.values())

    def nonzero_simplices(self):
        return [s for s in self.simplices() if not _vis_zero(self.kind, self.values[s])]

    def __eq__(self, other):
        if not isinstance(other, CechCochain):
            return NotImplemented
        try:
            return (self - other).is_zero()
        except (CoverMismatch, DegreeMismatch):
            return False

    def to_json(self, cover_ref="cover"):
        return {"cover_ref": cover_ref, "k": self.k, "kind": self.kind,
                "entries": [{"simplex": list(s), "value": _vjson(self.kind, self.values[s])}
                            for s in self.simplices()]}

    @classmethod
    def from_json(cls, cover, data):
        kind = data["kind"]
        n = cover.dim
        ent = {}
        for e in data["entries"]:
            v = U1Function.from_json(n, e["value"]) if kind == "u1" else PolyForm.from_json(e["value"])
            ent[tuple(e["simplex"])] = v
        return cls(cover, data["k"], kind, ent)

    def __repr__(self):
        return f"CechCochain(k={self.k}, kind={self.kind}, {len(self.values)} simplices)"


def cech_delta(c):
    """Cech differential with alternating face signs."""
    cov, kind = c.cover, c.kind
    out = {}
    for s in cov.simplices(c.k + 1):
        acc = _vzero(kind, cov.dim)
        for j in range(len(s)):
            face = s[:j] + s[j + 1:]
            acc = _vadd(kind, acc, _vscale_sign(kind, c.values[face], -1 if j % 2 else 1))
        out[s] = acc
    return CechCochain(cov, c.k + 1, kind, out)


def _dlog_or_d(c):
    """Apply dlog (U(1)) or d (forms) simplexwise."""
    if c.kind == "u1":
        return c.map(lambda v: v.dlog(), 1)
    return c.map(exterior_derivative, c.kind + 1)


class DeligneCochain:
    """Deligne k-cochain in the complex of degree n.

    ``comps[0]`` is U(1)-valued of Cech degree k, ``comps[j]`` holds
    j-forms of Cech degree k - j.  Components with negative Cech degree
    are absent (``None``).
    """

    def __init__(self, n, k, comps):
        self.n = n
        self.k = k
        comps = list(comps) + [None] * (n + 1 - len(comps))
        if len(comps) != n + 1:
            raise DegreeMismatch("too many components")
        cover = None
        for j, c in enumerate(comps):
            want = k - j
            if want < 0:
                if c is not None:
                    raise DegreeMismatch(f"component {j} must be absent in degree {k}")
                continue
            if c is None:
                raise DegreeMismatch(f"component {j} missing")
            kind = "u1" if j == 0 else j
            if c.k != want or c.kind != kind:
                raise DegreeMismatch(f"component {j} has Cech degree {c.k} and kind {c.kind}, "
                                     f"expected {want} and {kind}")
            if cover is None:
                cover = c.cover
            elif c.cover != cover:
                raise CoverMismatch("components on different covers")
        self.comps = comps
        self.cover = cover

    @classmethod
    def zero(cls, cover, n, k):
        comps = []
        for j in range(n + 1):
            if k - j < 0:
                comps.append(None)
            else:
                comps.append(CechCochain(cover, k - j, "u1" if j == 0 else j))
        return cls(n, k, comps)

    def _compat(self, other):
        if (self.n, self.k) != (other.n, other.k):
            raise DegreeMismatch("Deligne cochains of different type")
        if self.cover != other.cover:
            raise CoverMismatch("Deligne cochains on different covers")

    def __add__(self, other):
        self._compat(other)
        return DeligneCochain(self.n, self.k, [None if a is None else a + b
                                               for a, b in zip(self.comps, other.comps)])

    def __neg__(self):
        return DeligneCochain(self.n, self.k, [None if a is None else -a for a in self.comps])

    def __sub__(self, other):
        return self + (-other)

    def is_zero(self):
        return all(c is None or c.is_zero() for c in self.comps)

    def residuals(self):
        out = []
        for j, c in enumerate(self.comps):
            if c is None:
                continue
            for s in c.nonzero_simplices():
                out.append({"component": j, "simplex": list(s), "residual": c.values[s].to_json()})
        return out

    def __eq__(self, other):
        if not isinstance(other, DeligneCochain):
            return NotImplemented
        return (self - other).is_zero()

    def to_json(self, cover_ref="cover"):
        return {"n": self.n, "k": self.k,
                "components": [None if c is None else c.to_json(cover_ref) for c in self.comps]}

    @classmethod
    def from_json(cls, cover, data):
        return cls(data["n"], data["k"], [None if c is None else CechCochain.from_json(cover, c)
                                          for c in data["components"]])


def deligne_delta(c):
    """Deligne differential ``(D c)_j = (-1)^j (d c_{j-1} + dc_j)``."""
    if c.cover is None:
        raise CoverMismatch("empty Deligne cochain")
    n, k = c.n, c.k
    out = []
    for j in range(n + 1):
        if k + 1 - j < 0:
            out.append(None)
            continue
        terms = []
        if j >= 1 and c.comps[j - 1] is not None:
            terms.append(_dlog_or_d(c.comps[j - 1]))
        if c.comps[j] is not None:
            terms.append(cech_delta(c.comps[j]))
        if terms:
            t = terms[0]
            for u in terms[1:]:
                t = t + u
        else:
            t = CechCochain(c.cover, k + 1 - j, "u1" if j == 0 else j)
        out.append(-t if j % 2 else t)
    return DeligneCochain(n, k + 1, out)


class CocycleReport:
    """Verdict plus the list of violated simplices."""

    def __init__(self, ok, residuals):
        self.ok = ok
        self.residuals = residuals

    def __bool__(self):
        return self.ok

    def to_json(self):
        return {"ok": self.ok, "residuals": self.residuals}

    def __repr__(self):
        return f"CocycleReport(ok={self.ok}, violations={len(self.residuals)})"


def is_deligne_cocycle(c):
    dc = deligne_delta(c)
    res = dc.residuals()
    return CocycleReport(not res, res)


def gauge_shift(c, h):
    """``c + D h`` for a Deligne (k-1)-cochain ``h``."""
    if h.n != c.n or h.k != c.k - 1:
        raise DegreeMismatch("gauge parameter must be a Deligne (k-1)-cochain of the same complex")
    if h.cover != c.cover:
        raise CoverMismatch("gauge parameter on a different cover")
    return c + deligne_delta(h)


def curv_of_class(c, check=True):
    """Global curvature form of a Deligne cocycle of degree k <= n.

    The top present Cech-0 component ``c_k`` is differentiated patchwise
    (``dlog`` when k = 0); the patchwise results must agree.
    """
    if check:
        rep = is_deligne_cocycle(c)
        if not rep:
            raise NotACocycle("curvature of a non-cocycle", details=rep.residuals)
    if c.k > c.n:
        raise DegreeMismatch(f"curvature needs k <= n (got k={c.k}, n={c.n})")
    top = c.comps[c.k]
    forms = _dlog_or_d(top)
    labels = top.cover.labels
    first = forms.values[(labels[0],)]
    bad = [{"patch": a} for a in labels[1:] if forms.values[(a,)] != first]
    if bad:
        raise InconsistentPatches("patchwise curvature candidates disagree", details=bad)
    return first


def dd_projection(c, check=True):
    """The U(1)-valued Cech component of a Deligne cocycle."""
    if check:
        rep = is_deligne_cocycle(c)
        if not rep:
            raise NotACocycle("projection of a non-cocycle", details=rep.residuals)
    return c.comps[0]

