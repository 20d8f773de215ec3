import cmath

import numpy as np
import pytest

from gerbelab import sampling as S
from gerbelab import twovect as TV
from gerbelab.cech import Cover
from gerbelab.errors import (GerbeMismatch, IntertwineFail, NonConstantRank, NotNormal, ParallelFail,
                             TwistedCocycleFail, UnitarityFail, XDependence)
from gerbelab.exterior import I, TWO_PI_I, Poly, PolyForm, Scalar, dx, x
from gerbelab.gerbe import r3_curving, trivial_gerbe
from gerbelab.loopspace import SampledLoop, wilson_loop

TOL = TV.TAU_U


@pytest.fixture
def setup(rng):
    cov = Cover.from_maximal(3, list("abc"), [tuple("abc")])
    L1, T1 = S.random_constant_gerbe(rng, cov)
    L2, T2 = S.random_constant_gerbe(rng, cov)
    return rng, cov, L1, T1, L2, T2


def mor(rng, L1, T1, L2, T2, k, m=None):
    al, a, U, m = S.random_morphism_data(rng, L1, T1, L2, T2, k, m)
    return TV.make_morphism(L1, L2, al, a, TOL), U


def test_identity_and_sections():
    I0 = trivial_gerbe(PolyForm.zero(3, 2))
    TV.identity_morphism(I0, 2)
    Irho = trivial_gerbe(r3_curving())
    a = (x(3, 1) * dx(3, 2) + dx(3, 3)) * I
    E = TV.make_morphism(I0, Irho, {}, {"U": [[a]]})
    assert E.rank == 1


def test_twist_violation(setup):
    rng, cov, L1, T1, L2, T2 = setup
    al, a, _, _ = S.random_morphism_data(rng, L1, T1, L2, T2, 2)
    TV.make_morphism(L1, L2, al, a, TOL)
    bad = dict(al)
    s = cov.simplices(1)[0]
    bad[s] = bad[s] * cmath.exp(2j * cmath.pi / 3)
    with pytest.raises(TwistedCocycleFail):
        TV.make_morphism(L1, L2, bad, a, TOL)
    bad = dict(al)
    bad[s] = bad[s] * 2
    with pytest.raises(UnitarityFail):
        TV.make_morphism(L1, L2, bad, a, TOL)


def test_compose_and_sum(setup):
    rng, cov, L1, T1, L2, T2 = setup
    E, _ = mor(rng, L1, T1, L2, T2, 2)
    F, _ = mor(rng, L2, T2, L1, T1, 3)
    assert TV.compose(F, E).rank == 6
    assert TV.morphism_close(TV.compose(TV.identity_morphism(L2), E), E)
    Ep, _ = mor(rng, L1, T1, L2, T2, 1)
    assert TV.direct_sum(E, Ep).rank == 3
    TV.distributor(F, E, Ep)
    with pytest.raises(GerbeMismatch):
        TV.direct_sum(E, F)
    G, _ = mor(rng, L1, T1, L2, T2, 2)
    H = TV.compose(TV.compose(F, E), TV.identity_morphism(L1))
    assert TV.morphism_close(H, TV.compose(F, E))
    assert TV.compose(G, TV.identity_morphism(L1)).rank == 2


def test_tensor_and_det(setup):
    rng, cov, L1, T1, L2, T2 = setup
    E, _ = mor(rng, L1, T1, L2, T2, 2)
    F, _ = mor(rng, L2, T2, L1, T1, 2)
    assert TV.tensor_mor(E, F).rank == 4
    one = TV.identity_morphism(TV.tensor_power(L1, 0))
    assert TV.tensor_mor(E, one).rank == 2
    D = TV.det_morphism(E)
    assert D.rank == 1


def test_theta(setup):
    rng, cov, L1, T1, L2, T2 = setup
    E, U = mor(rng, L1, T1, L2, T2, 2)
    assert TV.morphism_close(TV.riesz_theta(TV.riesz_theta(E)), E)
    ThE = TV.riesz_theta(E)
    for s, M in E.alpha.items():
        assert np.allclose(ThE.alpha[s], M.conj(), atol=1e-12)
    Id = TV.identity_morphism(L1, 2)
    ThId = TV.riesz_theta(Id)
    assert all(np.allclose(M, np.eye(2)) for M in ThId.alpha.values())
    assert all(ThId.a[p].norm() == 0 for p in cov.labels)
    # the dual gerbe data make Theta(E) a valid morphism again
    TV.make_morphism(ThE.src, ThE.tgt, ThE.alpha, ThE.a, TOL)


def scalar_pair(rng, L1, T1, L2, T2, k):
    mu = S.random_form(rng, 3, 1, 1, 2, real=True, with_pi=False) * I
    m = TV.MatForm.scalar(mu, k)
    B, UB = mor(rng, L1, T1, L2, T2, k, m)
    C, UC = mor(rng, L1, T1, L2, T2, k, m)
    return B, UB, C, UC


def test_2morphisms(setup):
    rng, cov, L1, T1, L2, T2 = setup
    B, UB, C, UC = scalar_pair(rng, L1, T1, L2, T2, 2)
    TV.verify_2morphism(B, B, {p: np.eye(2) for p in cov.labels})
    TV.verify_2morphism(B, B, {p: 3.5 * np.eye(2) for p in cov.labels})
    M = rng.random() + np.arange(4).reshape(2, 2)
    phi = TV.verify_2morphism(B, C, {p: UC[p] @ M @ UB[p].conj().T for p in cov.labels}, 10 * TOL)
    with pytest.raises(IntertwineFail):
        TV.verify_2morphism(B, C, {p: M for p in cov.labels})
    # inclusion into a direct sum
    Sm = TV.direct_sum(B, C)
    inc = np.vstack([np.eye(2), np.zeros((2, 2))])
    TV.verify_2morphism(B, Sm, {p: inc for p in cov.labels})
    # Theta is contravariant
    psi = TV.verify_2morphism(C, B, {p: UB[p] @ M.T @ UC[p].conj().T for p in cov.labels}, 10 * TOL)
    lhs, rhs = TV.riesz_theta(psi @ phi), TV.riesz_theta(phi) @ TV.riesz_theta(psi)
    assert all(np.allclose(lhs.phi[p], rhs.phi[p]) for p in cov.labels)


def test_parallel_fail(setup):
    rng, cov, L1, T1, L2, T2 = setup
    E, U = mor(rng, L1, T1, L2, T2, 2)
    # a generic non-scalar connection has trivial commutant, so a generic
    # intertwiner of the transitions is not parallel
    M = np.array([[1, 2], [0, 1]], dtype=complex)
    with pytest.raises(ParallelFail):
        TV.verify_2morphism(E, E, {p: U[p] @ M @ U[p].conj().T for p in cov.labels})


def test_interchange_and_sum_functoriality(setup):
    rng, cov, L1, T1, L2, T2 = setup
    B, UB, C, UC = scalar_pair(rng, L1, T1, L2, T2, 2)
    F1, UF1, F2, UF2 = scalar_pair(rng, L2, T2, L1, T1, 1)
    M1, M2 = np.array([[1, 2], [3, 4]]), np.array([[0, 1], [1, 0]])
    phi = TV.verify_2morphism(B, C, {p: UC[p] @ M1 @ UB[p].conj().T for p in cov.labels}, 10 * TOL)
    phi2 = TV.verify_2morphism(C, B, {p: UB[p] @ M2 @ UC[p].conj().T for p in cov.labels}, 10 * TOL)
    psi = TV.verify_2morphism(F1, F2, {p: UF2[p] @ np.array([[2.0]]) @ UF1[p].conj().T for p in cov.labels}, 10 * TOL)
    psi2 = TV.verify_2morphism(F2, F1, {p: UF1[p] @ np.array([[-1.0]]) @ UF2[p].conj().T for p in cov.labels}, 10 * TOL)
    lhs = TV.horizontal(psi2 @ psi, phi2 @ phi)
    rhs = TV.horizontal(psi2, phi2) @ TV.horizontal(psi, phi)
    assert all(np.linalg.norm(lhs.phi[p] - rhs.phi[p]) < TOL for p in cov.labels)
    a = TV.direct_sum_2(phi2, phi2) @ TV.direct_sum_2(phi, phi)
    b = TV.direct_sum_2(phi2 @ phi, phi2 @ phi)
    assert all(np.linalg.norm(a.phi[p] - b.phi[p]) < TOL for p in cov.labels)


def test_kernel(setup):
    rng, cov, L1, T1, L2, T2 = setup
    B, UB, C, UC = scalar_pair(rng, L1, T1, L2, T2, 2)
    zero = TV.verify_2morphism(B, C, {p: np.zeros((2, 2)) for p in cov.labels})
    K, _ = TV.kernel_2mor(zero)
    assert K.rank == 2
    inv = TV.verify_2morphism(B, B, {p: 2 * np.eye(2) for p in cov.labels})
    assert TV.kernel_2mor(inv)[0].rank == 0
    D = np.diag([0.0, 1.0])
    blk = TV.verify_2morphism(B, B, {p: UB[p] @ D @ UB[p].conj().T for p in cov.labels}, 10 * TOL)
    K, inc = TV.kernel_2mor(blk)
    assert K.rank == 1
    for p in cov.labels:
        v = UB[p].conj().T @ inc.phi[p]
        assert abs(abs(v[0, 0]) - 1) < 1e-9
    bad = TV.TwoMorphism(B, B, {p: (D if p == "a" else np.eye(2)) for p in cov.labels})
    with pytest.raises(NonConstantRank):
        TV.kernel_2mor(bad)


def test_eigensplit(setup):
    rng, cov, L1, T1, L2, T2 = setup
    B, UB, _, _ = scalar_pair(rng, L1, T1, L2, T2, 2)
    one = TV.verify_2morphism(B, B, {p: 1.5 * np.eye(2) for p in cov.labels})
    assert len(TV.eigensplit(one)[0]) == 1
    D = np.diag([1.0, 2.0])
    phi = TV.verify_2morphism(B, B, {p: UB[p] @ D @ UB[p].conj().T for p in cov.labels}, 10 * TOL)
    summ, U = TV.eigensplit(phi)
    assert [round(l.real, 9) for l, _ in summ] == [1.0, 2.0]
    assert all(Sx.rank == 1 for _, Sx in summ)
    nn = TV.TwoMorphism(B, B, {p: np.array([[1, 1], [0, 1]], dtype=complex) for p in cov.labels})
    with pytest.raises(NotNormal):
        TV.eigensplit(nn)


def test_wilson_of_composite():
    I0 = trivial_gerbe(PolyForm.zero(3, 2))
    a1 = TV.MatForm(3, 1, (2, 2), {((0,), (0, 1, 0)): np.array([[1j, 0.5], [-0.5, 0]]),
                                    ((2,), (0, 0, 0)): np.array([[0, 1j], [1j, 2j]])})
    a2 = TV.MatForm(3, 1, (1, 1), {((1,), (1, 0, 0)): np.array([[2j]])})
    E = TV.make_morphism(I0, I0, {}, {"U": a1})
    F = TV.make_morphism(I0, I0, {}, {"U": a2})
    g = SampledLoop.circle(256, 0.7, (0.1, 0.2, 0.3), (0, 2))
    w = wilson_loop(TV.compose(F, E).connection(), g)
    assert abs(w - wilson_loop(a1, g) * wilson_loop(a2, g)) < 1e-12


# R^3 model

def const_section(mats):
    k = len(mats[0])
    z = PolyForm.zero(3, 1)
    out = [[z for _ in range(k)] for _ in range(k)]
    for l, M in enumerate(mats):
        for i in range(k):
            for j in range(k):
                if M[i][j]:
                    out[i][j] = out[i][j] + dx(3, l + 1) * M[i][j]
    return TV.ModelSection(out)


def test_hom_space_oracles():
    z = TV.ModelSection.zero(3, 1)
    w = TV.ModelSection([[dx(3, 1) * TWO_PI_I]])
    for D in range(3):
        assert len(TV.hom_space(z, z, D)) == 1
        assert len(TV.hom_space(w, z, D)) == 0
    o, i = Scalar.of(0), I
    mats = [[[o, i], [i, o]], [[i, o], [o, -i]], [[o, o], [o, o]]]
    sec = const_section(mats)
    assert len(TV.hom_space(sec, sec, 1)) == TV.sylvester_commutant_dim(mats) == 1


def test_hom_space_solutions_verified():
    o, i = Scalar.of(0), I
    sec = const_section([[[i, o], [o, i * 2]], [[o, o], [o, o]], [[i * 3, o], [o, o]]])
    basis = TV.hom_space(sec, sec, 2)
    assert len(basis) == 2
    for f in basis:
        res = TV.hom_residual(sec, sec, f)
        assert all(e.is_zero() for row in res for e in row)


def test_inner_product():
    z2 = TV.ModelSection.zero(3, 2)
    basis = TV.hom_space(z2, z2, 0)
    assert len(basis) == 4
    one = TV.ModelHom([[Poly.const(3, 1), Poly.zero(3)], [Poly.zero(3), Poly.const(3, 1)]])
    assert TV.inner_product_hilbert(one, one) == Scalar.of(2)
    e12 = TV.ModelHom([[Poly.zero(3), Poly.const(3, 1)], [Poly.zero(3), Poly.zero(3)]])
    assert TV.inner_product_hilbert(one, e12) == Scalar.of(0)
    for f in basis:
        assert complex(TV.inner_product_hilbert(f, f)).real > 0
    xf = TV.ModelHom([[x(3, 1)]])
    with pytest.raises(XDependence):
        TV.inner_product_hilbert(xf, xf)


def test_gerbe_metric_naturality():
    z = TV.ModelSection.zero(3, 1)
    h = TV.gerbe_metric(z, z)
    assert all(e.is_zero() for row in h.omega for e in row)
    o, i = Scalar.of(0), I
    cases = [[[[i, o], [o, i * 2]], [[o, o], [o, o]], [[i * 3, o], [o, o]]],
             [[[o, i], [i, o]], [[i, o], [o, -i]], [[o, o], [o, o]]]]
    secs = [const_section(c) for c in cases] + [z, TV.ModelSection([[dx(3, 1) * TWO_PI_I]])]
    for om in secs:
        for et in secs:
            assert len(TV.hom_space(om, et, 1)) == len(TV.hom_space(TV.ModelSection.zero(3, 1),
                                                                    TV.gerbe_metric(om, et), 1))


def test_model_section_validation():
    from gerbelab.errors import Mismatch
    with pytest.raises(Mismatch):
        TV.ModelSection([[dx(3, 1)]])


def test_matform_json():
    a = S.random_anti_hermitian_form(S.rng(3), 3, 2)
    b = TV.MatForm.from_json(a.to_json())
    assert (a - b).norm() == 0
