"""Exact scalars in Q(i)[pi].

A :class:`Scalar` is a polynomial in a formal symbol ``pi`` whose
coefficients are Gaussian rationals.  Every constant that appears in the
local data of gerbes (``q``, ``i q``, ``2 pi i q`` ...) lives here, so all
algebraic identities can be checked by exact equality.
"""

from fractions import Fraction
import math

_ZERO = Fraction(0)
_ONE = Fraction(1)


def _gauss(z):
    """Coerce an int, Fraction, complex-ish pair or Python complex."""
    if isinstance(z, tuple):
        return (Fraction(z[0]), Fraction(z[1]))
    if isinstance(z, complex):
        return (Fraction(z.real), Fraction(z.imag))
    return (Fraction(z), _ZERO)


def _gmul(a, b):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _ginv(a):
    n = a[0] * a[0] + a[1] * a[1]
    if n == 0:
        raise ZeroDivisionError("Gaussian rational zero")
    return (a[0] / n, -a[1] / n)


def _strip(coeffs):
    coeffs = list(coeffs)
    while coeffs and coeffs[-1][0] == 0 and coeffs[-1][1] == 0:
        coeffs.pop()
    return tuple(coeffs)


class Scalar:
    """Element of Q(i)[pi], immutable.

    Parameters
    ----------
    coeffs : iterable of (Fraction, Fraction)
        ``coeffs[k]`` is the coefficient of ``pi**k`` as (re, im).
    """

    __slots__ = ("c", "_h")

    def __init__(self, coeffs=()):
        self.c = _strip(_gauss(z) for z in coeffs)
        self._h = None

    @classmethod
    def _raw(cls, c):
        s = object.__new__(cls)
        s.c = c
        s._h = None
        return s

    @classmethod
    def of(cls, x):
        """Coerce int, Fraction, complex or Scalar."""
        if isinstance(x, Scalar):
            return x
        g = _gauss(x)
        if g[0] == 0 and g[1] == 0:
            return ZERO
        return cls._raw((g,))

    @classmethod
    def gauss(cls, re, im=0, pi_power=0):
        """``(re + i im) * pi**pi_power``."""
        g = (Fraction(re), Fraction(im))
        if g[0] == 0 and g[1] == 0:
            return ZERO
        return cls._raw(((_ZERO, _ZERO),) * pi_power + (g,))

    # ring structure
    def __add__(self, other):
        other = Scalar.of(other)
        a, b = self.c, other.c
        if not b:
            return self
        if not a:
            return other
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for k, z in enumerate(b):
            w = out[k]
            out[k] = (w[0] + z[0], w[1] + z[1])
        return Scalar._raw(_strip(out))

    __radd__ = __add__

    def __neg__(self):
        return Scalar._raw(tuple((-z[0], -z[1]) for z in self.c))

    def __sub__(self, other):
        return self + (-Scalar.of(other))

    def __rsub__(self, other):
        return Scalar.of(other) + (-self)

    def __mul__(self, other):
        other = Scalar.of(other)
        a, b = self.c, other.c
        if not a or not b:
            return ZERO
        if len(b) == 1 and b[0][1] == 0:
            r = b[0][0]
            if r == 1:
                return self
            return Scalar._raw(tuple((z[0] * r, z[1] * r) for z in a))
        if len(a) == 1 and a[0][1] == 0:
            return other * self
        out = [(_ZERO, _ZERO)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x[0] == 0 and x[1] == 0:
                continue
            for j, y in enumerate(b):
                p = _gmul(x, y)
                w = out[i + j]
                out[i + j] = (w[0] + p[0], w[1] + p[1])
        return Scalar._raw(_strip(out))

    __rmul__ = __mul__

    def __pow__(self, n):
        out = ONE
        for _ in range(n):
            out = out * self
        return out

    def conj(self):
        """Complex conjugate (pi is real)."""
        return Scalar._raw(tuple((z[0], -z[1]) for z in self.c))

    def is_zero(self):
        return not self.c

    def __bool__(self):
        return bool(self.c)

    def __eq__(self, other):
        if not isinstance(other, Scalar):
            try:
                other = Scalar.of(other)
            except (TypeError, ValueError):
                return NotImplemented
        return self.c == other.c

    def __hash__(self):
        if self._h is None:
            self._h = hash(self.c)
        return self._h

    @property
    def degree(self):
        """Degree in pi (-1 for zero)."""
        return len(self.c) - 1

    def is_constant(self):
        return len(self.c) <= 1

    def lead(self):
        return self.c[-1]

    def scale(self, g):
        """Multiply by a Gaussian rational pair."""
        if g[0] == 0 and g[1] == 0:
            return ZERO
        return Scalar._raw(tuple(_gmul(z, g) for z in self.c))

    def shift(self, k):
        """Multiply by pi**k."""
        if not self.c:
            return self
        return Scalar._raw(((_ZERO, _ZERO),) * k + self.c)

    def divmod(self, other):
        """Euclidean division in Q(i)[pi]."""
        if not other.c:
            raise ZeroDivisionError("division by zero scalar")
        inv = _ginv(other.c[-1])
        rem = list(self.c)
        dq = len(rem) - len(other.c)
        if dq < 0:
            return ZERO, self
        q = [(_ZERO, _ZERO)] * (dq + 1)
        for k in range(dq, -1, -1):
            t = rem[k + len(other.c) - 1]
            if t[0] == 0 and t[1] == 0:
                continue
            f = _gmul(t, inv)
            q[k] = f
            for j, y in enumerate(other.c):
                p = _gmul(f, y)
                w = rem[k + j]
                rem[k + j] = (w[0] - p[0], w[1] - p[1])
        return Scalar._raw(_strip(q)), Scalar._raw(_strip(rem))

    def monic(self):
        """Return (monic associate, leading coefficient)."""
        lead = self.c[-1]
        return self.scale(_ginv(lead)), lead

    def is_real_rational(self):
        return len(self.c) <= 1 and (not self.c or self.c[0][1] == 0)

    def __complex__(self):
        out = 0j
        for z in reversed(self.c):
            out = out * math.pi + complex(float(z[0]), float(z[1]))
        return out

    def __float__(self):
        v = complex(self)
        return v.real

    def to_json(self):
        return [{"re": [z[0].numerator, z[0].denominator],
                 "im": [z[1].numerator, z[1].denominator]} for z in self.c]

    @classmethod
    def from_json(cls, data):
        return cls((Fraction(*d["re"]), Fraction(*d["im"])) for d in data)

    def __repr__(self):
        if not self.c:
            return "0"
        parts = []
        for k, (re, im) in enumerate(self.c):
            if re == 0 and im == 0:
                continue
            if im == 0:
                z = str(re)
            elif re == 0:
                z = f"{im}i"
            else:
                z = f"({re}+{im}i)"
            parts.append(z if k == 0 else f"{z}*pi^{k}" if k > 1 else f"{z}*pi")
        return " + ".join(parts)


ZERO = Scalar._raw(())
ONE = Scalar._raw(((_ONE, _ZERO),))
I = Scalar._raw(((_ZERO, _ONE),))
PI = Scalar._raw(((_ZERO, _ZERO), (_ONE, _ZERO)))
TWO_PI_I = Scalar._raw(((_ZERO, _ZERO), (_ZERO, Fraction(2))))


def sgcd(a, b):
    """Monic gcd in Q(i)[pi]."""
    while b.c:
        _, r = a.divmod(b)
        a, b = b, r
    if not a.c:
        return ONE
    return a.monic()[0]
