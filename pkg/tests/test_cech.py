import pytest

from gerbelab import sampling as S
from gerbelab.cech import (CechCochain, Cover, DeligneCochain, U1Function, build_cover, cech_delta,
                           curv_of_class, dd_projection, deligne_delta, gauge_shift, is_deligne_cocycle)
from gerbelab.errors import InvalidNerve, NotACocycle
from gerbelab.exterior import PolyForm, TWO_PI_I, dx, x


def two_patch():
    return build_cover(["a", "b"], [("a",), ("b",), ("a", "b")])


def test_build_cover_examples():
    assert len(two_patch().simplices(1)) == 1
    with pytest.raises(InvalidNerve):
        build_cover(["a", "b", "c"], [("a",), ("b",), ("c",), ("a", "b"), ("b", "c"), ("a", "b", "c")])
    tet = Cover.from_maximal(3, list("abcd"), [tuple("abcd")])
    assert len(tet.simplices(2)) == 4
    assert len(tet.simplices(1)) == 6


def test_cech_delta_face_convention(rng):
    cov = Cover.from_maximal(3, list("abc"), [tuple("abc")])
    f = {(p,): S.random_form(rng, 3, 1, 2) for p in cov.labels}
    df = cech_delta(CechCochain(cov, 0, 1, f))
    assert df[("a", "b")] == f[("b",)] - f[("a",)]
    A = {s: S.random_form(rng, 3, 1, 2) for s in cov.simplices(1)}
    dA = cech_delta(CechCochain(cov, 1, 1, A))
    c = CechCochain(cov, 1, 1, A)
    assert dA[("a", "b", "c")] == c[("b", "c")] - c[("a", "c")] + c[("a", "b")]


def test_delta_squared(rng):
    for _ in range(30):
        cov = S.random_cover(rng, 3, 6)
        c = S.random_cochain(rng, cov, rng.randint(0, 2), rng.choice(["u1", 1, 2]))
        assert cech_delta(cech_delta(c)).is_zero()
        D = S.random_deligne(rng, cov, 2, rng.randint(0, 2))
        assert deligne_delta(deligne_delta(D)).is_zero()


def line_bundle(q, A_a):
    """Two-patch line bundle with f_ab = exp(2 pi i q) and A_b = A_a - dlog f_ab."""
    cov = two_patch()
    f = U1Function(q)
    g = CechCochain(cov, 1, "u1", {("a", "b"): f})
    A = CechCochain(cov, 0, 1, {("a",): A_a, ("b",): A_a - f.dlog()})
    return DeligneCochain(1, 1, [g, A])


def test_line_bundle_cocycle():
    c = line_bundle(x(3, 1) * x(3, 2), x(3, 1) * dx(3, 2) * (-TWO_PI_I))
    assert deligne_delta(c).is_zero()
    assert is_deligne_cocycle(c)
    assert curv_of_class(c) == dx(3, 1, 2) * (-TWO_PI_I)
    assert deligne_delta(DeligneCochain.zero(two_patch(), 1, 1)).is_zero()


def test_flat_datum_curvature_zero():
    c = line_bundle(x(3, 3), PolyForm.zero(3, 1))
    assert curv_of_class(c).is_zero()


def test_non_cocycle_residuals(rng):
    cov = two_patch()
    g = CechCochain(cov, 1, "u1", {("a", "b"): U1Function(x(3, 1))})
    A = CechCochain(cov, 0, 1, {("a",): dx(3, 2), ("b",): dx(3, 2)})
    rep = is_deligne_cocycle(DeligneCochain(1, 1, [g, A]))
    assert not rep
    assert rep.residuals
    with pytest.raises(NotACocycle):
        curv_of_class(DeligneCochain(1, 1, [g, A]))


def test_gauge_shift(rng):
    c = line_bundle(x(3, 1), dx(3, 2))
    assert gauge_shift(c, DeligneCochain.zero(c.cover, 1, 0)) == c
    h = S.random_deligne(rng, c.cover, 1, 0)
    c2 = gauge_shift(c, h)
    assert is_deligne_cocycle(c2)
    assert curv_of_class(c2) == curv_of_class(c)


def test_dd_projection_trivial_gerbe():
    from gerbelab.gerbe import r3_curving, trivial_gerbe
    L = trivial_gerbe(r3_curving())
    assert all(v.is_one() for v in dd_projection(L.to_deligne()).values.values())


def test_cover_json():
    cov = Cover.from_maximal(3, list("abcd"), [tuple("abc"), ("c", "d")])
    assert Cover.from_json(cov.to_json()) == cov
