from fractions import Fraction

import pytest

from gerbelab import sampling as S
from gerbelab.errors import DegreeMismatch, DimensionMismatch
from gerbelab.exterior import (I, PI, Poly, PolyForm, PolyMap, Scalar, TWO_PI_I, VectorField, dx, evaluate,
                               exterior_derivative as d, interior_product, lie_derivative, partial, pullback,
                               vol, wedge, x)
from gerbelab.gerbe import r3_curving


def test_scalar_field_ops():
    a = Scalar.gauss(Fraction(1, 2), 3, 1)
    assert a - a == Scalar.of(0)
    assert (I * I) == Scalar.of(-1)
    assert abs(complex(TWO_PI_I) - 2j * 3.141592653589793) < 1e-15
    assert complex(PI * 2) == pytest.approx(6.283185307179586)


def test_wedge_examples():
    assert wedge(dx(3, 1), dx(3, 2)) == dx(3, 1, 2)
    assert wedge(x(3, 3) * dx(3, 1), x(3, 1) * dx(3, 2)) == (x(3, 1) * x(3, 3)) * dx(3, 1, 2)


def test_wedge_odd_self_is_zero(rng):
    for _ in range(20):
        a = S.random_form(rng, 4, rng.choice([1, 3]), 2, 3)
        assert wedge(a, a).is_zero()


def test_wedge_graded_commutative(rng):
    for _ in range(20):
        p, q = rng.randint(0, 3), rng.randint(0, 3)
        a, b = S.random_form(rng, 4, p, 2), S.random_form(rng, 4, q, 2)
        assert wedge(a, b) == wedge(b, a) * ((-1) ** (p * q))


def test_d_examples():
    assert d(x(3, 3) * dx(3, 1)) == -dx(3, 1, 3)
    assert d(r3_curving()) == vol(3) * (-TWO_PI_I)


def test_d_squared_zero(rng):
    for _ in range(40):
        n = rng.randint(1, 4)
        p = rng.randint(0, n)
        a = S.random_form(rng, n, p, 4, 3)
        assert d(d(a)).is_zero()


def test_leibniz(rng):
    for _ in range(20):
        p = rng.randint(0, 2)
        a, b = S.random_form(rng, 3, p, 2), S.random_form(rng, 3, 1, 2)
        assert d(wedge(a, b)) == wedge(d(a), b) + wedge(a, d(b)) * ((-1) ** p)


def test_interior_examples():
    assert interior_product(partial(3, 2), vol(3)) == -dx(3, 1, 3)
    minus_d2 = VectorField([Poly.zero(3), Poly.const(3, -1), Poly.zero(3)])
    assert interior_product(minus_d2, vol(3)) == dx(3, 1, 3)
    assert interior_product(minus_d2, vol(3)) == -d(x(3, 3) * dx(3, 1))


def test_interior_twice_zero(rng):
    for _ in range(20):
        X = S.random_vf(rng, 3, 2)
        a = S.random_form(rng, 3, rng.randint(2, 3), 2)
        assert interior_product(X, interior_product(X, a)).is_zero()


def test_lie_examples(rng):
    assert lie_derivative(partial(3, 1), x(3, 1) * dx(3, 2)) == dx(3, 2)
    for _ in range(10):
        X = S.random_vf(rng, 3, 2)
        p = S.random_poly(rng, 3, 3)
        assert lie_derivative(X, PolyForm.function(p)) == PolyForm.function(X.apply(p))
        a = S.random_form(rng, 3, 1, 2)
        assert lie_derivative(X, d(a)) == d(lie_derivative(X, a))


def test_pullback_examples(rng):
    a = S.random_form(rng, 3, 2, 2)
    assert pullback(PolyMap.identity(3), a) == a
    f = PolyMap([Poly.var(1, 0) ** 2, Poly.zero(1), Poly.zero(1)])
    assert pullback(f, dx(3, 1)) == (Poly.var(1, 0) * 2) * dx(1, 1)
    for _ in range(10):
        g = PolyMap([S.random_poly(rng, 2, 2, 2, real=True) for _ in range(3)])
        b = S.random_form(rng, 3, 1, 2)
        assert pullback(g, d(b)) == d(pullback(g, b))


def test_evaluate_examples():
    e1, e2, e3 = (1, 0, 0), (0, 1, 0), (0, 0, 1)
    assert evaluate(vol(3), (5, -2, 7), [e3, e1, e2]) == Scalar.of(1)
    p = x(3, 1) * x(3, 2) + x(3, 3)
    assert evaluate(PolyForm.function(p), (2, 3, 1)) == Scalar.of(7)
    a = x(3, 1) * dx(3, 1, 2) + dx(3, 2, 3)
    u, v = (0.3, -1.2, 0.5), (1.1, 0.4, -0.7)
    assert evaluate(a, (0.1, 0.2, 0.3), [u, v]) == -evaluate(a, (0.1, 0.2, 0.3), [v, u])


def test_errors():
    with pytest.raises(DegreeMismatch):
        evaluate(vol(3), (0, 0, 0), [(1, 0, 0)])
    with pytest.raises(DimensionMismatch):
        dx(3, 1) + dx(2, 1)


def test_json_roundtrip(rng):
    for _ in range(10):
        a = S.random_form(rng, 3, rng.randint(0, 3), 3)
        assert PolyForm.from_json(a.to_json()) == a
