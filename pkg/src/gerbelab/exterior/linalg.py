"""Exact linear algebra over the fraction field Q(i)(pi).

Linear systems arising from polynomial ansatzes (Hamiltonian vector
fields, parallel homomorphisms, nondegeneracy kernels) have entries in
Q(i)[pi].  Elimination runs in the fraction field; results are cleared
of denominators back into Q(i)[pi].
"""

from .scalar import Scalar, ZERO, ONE, sgcd


class RF:
    """Rational function num/den in pi with monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=ONE, normalize=True):
        if normalize:
            if not den:
                raise ZeroDivisionError("zero denominator")
            if not num:
                num, den = ZERO, ONE
            elif den.is_constant():
                if den != ONE:
                    num = num.scale(_inv(den.c[0]))
                    den = ONE
            else:
                g = sgcd(num, den)
                if g != ONE:
                    num = num.divmod(g)[0]
                    den = den.divmod(g)[0]
                den, lead = den.monic()
                num = num.scale(_inv(lead))
        self.num = num
        self.den = den

    def __add__(self, o):
        if self.den == o.den:
            if self.den == ONE:
                return RF(self.num + o.num, ONE, False)
            return RF(self.num + o.num, self.den)
        return RF(self.num * o.den + o.num * self.den, self.den * o.den)

    def __neg__(self):
        return RF(-self.num, self.den, False)

    def __sub__(self, o):
        return self + (-o)

    def __mul__(self, o):
        if self.den == ONE and o.den == ONE:
            return RF(self.num * o.num, ONE, False)
        return RF(self.num * o.num, self.den * o.den)

    def inv(self):
        if not self.num:
            raise ZeroDivisionError("inverse of zero")
        return RF(self.den, self.num)

    def __truediv__(self, o):
        return self * o.inv()

    def __bool__(self):
        return bool(self.num)

    def __eq__(self, o):
        return self.num == o.num and self.den == o.den

    def __repr__(self):
        return f"({self.num})/({self.den})" if self.den != ONE else repr(self.num)


def _inv(g):
    n = g[0] * g[0] + g[1] * g[1]
    return (g[0] / n, -g[1] / n)


RF_ZERO = RF(ZERO, ONE, False)
RF_ONE = RF(ONE, ONE, False)


def to_rf(s):
    return RF(Scalar.of(s), ONE, False)


def rref(rows, ncols):
    """Reduced row echelon form in place.

    Parameters
    ----------
    rows : list of dict {col: RF}
        Sparse rows.
    ncols : int

    Returns
    -------
    (rows, pivots) with ``pivots[r]`` the pivot column of row r.
    """
    rows = [dict((c, v) for c, v in r.items() if v) for r in rows]
    rows = [r for r in rows if r]
    pivots = []
    done = []
    # simple sparse Gauss-Jordan with smallest-support pivot rows
    pool = rows
    while pool:
        # choose pivot column: the smallest column index present
        col = min(min(r) for r in pool)
        cand = [r for r in pool if col in r]
        piv = min(cand, key=lambda r: (len(r), _cost(r[col])))
        pool = [r for r in pool if r is not piv]
        inv = piv[col].inv()
        piv = {c: v * inv for c, v in piv.items()}
        new_pool = []
        for r in pool:
            if col in r:
                f = r[col]
                r = _axpy(r, piv, f)
                if r:
                    new_pool.append(r)
            else:
                new_pool.append(r)
        pool = new_pool
        for k, r in enumerate(done):
            if col in r:
                done[k] = _axpy(r, piv, r[col])
        done.append(piv)
        pivots.append(col)
    return done, pivots


def _cost(v):
    return len(v.num.c) + len(v.den.c)


def _axpy(r, piv, f):
    """r - f * piv as sparse dicts."""
    out = dict(r)
    for c, v in piv.items():
        t = v * f
        if c in out:
            w = out[c] - t
            if w:
                out[c] = w
            else:
                del out[c]
        else:
            out[c] = -t
    return out


def nullspace(rows, ncols):
    """Basis of the right null space as lists of Scalars (denominators cleared)."""
    red, pivots = rref(rows, ncols)
    pivset = set(pivots)
    free = [c for c in range(ncols) if c not in pivset]
    basis = []
    for fcol in free:
        vec = [RF_ZERO] * ncols
        vec[fcol] = RF_ONE
        for r, pc in zip(red, pivots):
            if fcol in r:
                vec[pc] = -r[fcol]
        basis.append(clear_denominators(vec))
    return basis


def solve(rows, rhs, ncols):
    """One solution of A x = b (free variables zero) or None if inconsistent.

    ``rhs`` is a list of RF aligned with ``rows``.  The augmented column
    is stored at index ``ncols``.
    """
    aug = []
    for r, b in zip(rows, rhs):
        r = dict(r)
        if b:
            r[ncols] = b
        aug.append(r)
    red, pivots = rref(aug, ncols + 1)
    if ncols in pivots:
        return None
    x = [RF_ZERO] * ncols
    for r, pc in zip(red, pivots):
        if ncols in r:
            x[pc] = r[ncols]
    return x


def rank(rows, ncols):
    return len(rref(rows, ncols)[1])


def clear_denominators(vec):
    """Scale an RF vector to Q(i)[pi] entries by the lcm of denominators."""
    lcm = ONE
    for v in vec:
        if v and v.den != ONE:
            g = sgcd(lcm, v.den)
            lcm = (lcm * v.den).divmod(g)[0]
    out = []
    for v in vec:
        if not v:
            out.append(ZERO)
        elif v.den == ONE:
            out.append(v.num * lcm)
        else:
            out.append(v.num * lcm.divmod(v.den)[0])
    return out


def rf_value(v):
    """Scalar value of an RF with trivial denominator."""
    if v.den != ONE:
        raise ValueError("not a polynomial in pi")
    return v.num
