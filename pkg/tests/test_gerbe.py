import pytest

from gerbelab import sampling as S
from gerbelab.cech import CechCochain, Cover, U1Function, is_deligne_cocycle
from gerbelab.errors import ConnectionMismatch, CoverMismatch, GerbelabError
from gerbelab.exterior import TWO_PI_I, PolyForm, dx, exterior_derivative as d, vol, x
from gerbelab.gerbe import (Trivialization, curvature_3form, dd_cocycle, dual, gerbe_from_trivialization,
                            make_gerbe, r3_curving, self_trivialization, tensor, trivial_gerbe,
                            verify_trivialization)


def test_trivial_gerbe_curvature():
    L = trivial_gerbe(r3_curving())
    assert curvature_3form(L) == vol(3) * (-TWO_PI_I)
    assert all(v.is_one() for v in dd_cocycle(L).values.values())


def test_perturbed_connection_rejected(rng):
    cov = Cover.from_maximal(3, list("abc"), [tuple("abc")])
    g, A, B = S.random_gerbe_data(rng, cov)
    make_gerbe(cov, g, A, B)
    vals = dict(A.values)
    s = cov.simplices(1)[0]
    vals[s] = vals[s] + x(3, 2) * dx(3, 1)
    with pytest.raises(ConnectionMismatch):
        make_gerbe(cov, g, CechCochain(cov, 1, 1, vals), B)


def test_make_gerbe_matches_deligne(rng):
    for _ in range(25):
        cov = S.random_cover(rng, 3, 5)
        g, A, B = S.random_gerbe_data(rng, cov, rng.random() < 0.5)
        try:
            make_gerbe(cov, g, A, B)
            ok = True
        except GerbelabError:
            ok = False
        from gerbelab.cech import DeligneCochain
        assert ok == bool(is_deligne_cocycle(DeligneCochain(2, 2, [g, A, B])))


def test_two_patch_degenerate_overlaps():
    cov = Cover.from_maximal(3, ["a", "b"], [("a", "b")])
    rho = r3_curving()
    h = CechCochain(cov, 1, "u1", {("a", "b"): U1Function(x(3, 1) * x(3, 2))})
    a = CechCochain(cov, 0, 1, {("a",): dx(3, 1), ("b",): x(3, 3) * dx(3, 2)})
    L = gerbe_from_trivialization(cov, Trivialization(cov, h, a, rho))
    assert curvature_3form(L) == d(rho)


def test_tensor_and_dual(rng):
    r1, r2 = r3_curving(), S.random_form(rng, 3, 2, 2)
    L1, L2 = trivial_gerbe(r1), trivial_gerbe(r2)
    T = tensor(L1, L2)
    assert T.B[("U",)] == r1 + r2
    assert curvature_3form(T) == curvature_3form(L1) + curvature_3form(L2)
    assert curvature_3form(dual(L1)) == -curvature_3form(L1)
    cov = S.random_cover(rng, 3, 4)
    L, _ = S.random_constant_gerbe(rng, cov)
    LL = tensor(L, dual(L))
    assert all(v.is_one() for v in dd_cocycle(LL).values.values())
    with pytest.raises(CoverMismatch):
        tensor(L1, L)


def test_trivializations(rng):
    rho = r3_curving()
    L = trivial_gerbe(rho)
    cov = L.cover
    T = Trivialization(cov, CechCochain(cov, 1, "u1"), CechCochain(cov, 0, 1), rho)
    assert verify_trivialization(L, T)
    # rho' = rho + 2 pi i sigma with sigma = d beta, and a with d a = rho' - rho
    beta = S.random_form(rng, 3, 1, 2, real=True, with_pi=False)
    T2 = Trivialization(cov, CechCochain(cov, 1, "u1"), CechCochain(cov, 0, 1, {("U",): beta * TWO_PI_I}),
                        rho + d(beta) * TWO_PI_I)
    assert verify_trivialization(L, T2)
    cov2 = S.random_cover(rng, 3, 4)
    M, _ = S.random_constant_gerbe(rng, cov2)
    LL, Ts = self_trivialization(M)
    assert verify_trivialization(LL, Ts)


def test_wrong_trivialization_rejected():
    L = trivial_gerbe(r3_curving())
    cov = L.cover
    T = Trivialization(cov, CechCochain(cov, 1, "u1"), CechCochain(cov, 0, 1), PolyForm.zero(3, 2))
    assert not verify_trivialization(L, T)
