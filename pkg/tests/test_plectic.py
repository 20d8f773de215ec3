import pytest

from gerbelab import sampling as S
from gerbelab.errors import Degenerate, Mismatch, NotClosed, NotHamiltonian, NotInvariant
from gerbelab.exterior import Poly, PolyForm, VectorField, dx, exterior_derivative as d, vol, x
from gerbelab.gerbe import r3_curving, trivial_gerbe
from gerbelab.plectic import (bracket, bracket_forms, bracket_r3, hamiltonian_vf, hamiltonian_vf_r3,
                              homotopy_jacobi_residual, jacobiator, make_plectic, prequantum_check,
                              reduce_dimension, reduce_form)


@pytest.fixture(scope="module")
def R3():
    return make_plectic(vol(3))


def test_make_plectic_examples():
    make_plectic(vol(3))
    make_plectic(dx(2, 1, 2))
    with pytest.raises(Degenerate):
        make_plectic(dx(3, 1, 2))
    with pytest.raises(NotClosed):
        make_plectic(x(3, 3) * dx(3, 1, 2))


def test_nonconstant_plectic_sampled():
    w = (Poly.const(3, 1) + x(3, 1) ** 2) * vol(3)
    P = make_plectic(w)
    assert P.certificate["kind"] == "sampled"
    a = (x(3, 3) * (Poly.const(3, 1) + x(3, 1) ** 2)) * dx(3, 1)
    X = hamiltonian_vf(P, a)
    assert X == VectorField([Poly.zero(3), Poly.const(3, -1), Poly.zero(3)])
    # here X would be -d_2 / (1 + x1^2), which is not polynomial
    with pytest.raises(NotHamiltonian):
        hamiltonian_vf(P, x(3, 3) * dx(3, 1))


def test_hamiltonian_examples(R3):
    m = VectorField([Poly.zero(3), Poly.const(3, -1), Poly.zero(3)])
    assert hamiltonian_vf(R3, x(3, 3) * dx(3, 1)) == m
    assert hamiltonian_vf(R3, x(3, 1) * dx(3, 2)) == VectorField([Poly.zero(3), Poly.zero(3), Poly.const(3, -1)])
    f = S.random_poly(S.rng(1), 3, 3)
    assert hamiltonian_vf(R3, d(PolyForm.function(f))).is_zero()


def test_bracket_examples(R3):
    a, b = x(3, 3) * dx(3, 1), x(3, 1) * dx(3, 2)
    assert bracket_forms(R3, a, b) == dx(3, 1)
    assert bracket_r3(a, b) == dx(3, 1)
    assert bracket_forms(R3, a, a).is_zero()
    assert bracket(R3, a, b).f.is_zero()


def test_r3_formula_agrees(R3, rng):
    for _ in range(30):
        a = S.random_form(rng, 3, 1, 3, real=True, with_pi=False)
        b = S.random_form(rng, 3, 1, 3, real=True, with_pi=False)
        assert hamiltonian_vf(R3, a) == hamiltonian_vf_r3(a)
        assert bracket_forms(R3, a, b) == bracket_r3(a, b)
        bracket(R3, a, b, verify=True)


def test_jacobiator_examples(R3, rng):
    a, b, c = x(3, 3) * dx(3, 1), x(3, 1) * dx(3, 2), x(3, 2) * dx(3, 3)
    J = jacobiator(R3, a, b, c)
    assert J.f == Poly.const(3, 1)
    assert homotopy_jacobi_residual(R3, a, b, c).is_zero()
    exact = d(PolyForm.function(x(3, 1) * x(3, 2)))
    assert jacobiator(R3, a, exact, c).f.is_zero()
    for _ in range(10):
        t = [S.random_form(rng, 3, 1, 2, real=True, with_pi=False) for _ in range(3)]
        assert homotopy_jacobi_residual(R3, *t).is_zero()


def test_prequantum(R3):
    L = trivial_gerbe(r3_curving())
    assert prequantum_check(R3, L)
    assert not prequantum_check(make_plectic(vol(3) * 2), L)
    with pytest.raises(Mismatch):
        prequantum_check(make_plectic(vol(3) * 2), L, raise_on_fail=True)


def test_reduction(R3, rng):
    P2 = reduce_dimension(R3, 2)
    assert P2.omega == dx(2, 1, 2)
    with pytest.raises(Degenerate):
        reduce_dimension(P2, 1)
    with pytest.raises(NotInvariant):
        reduce_form(x(3, 3) * dx(3, 1), 2)
    emb = [Poly.var(3, 0), Poly.var(3, 1)]
    for _ in range(10):
        A = PolyForm(3, 1, {(i,): S.random_poly(rng, 2, 2, 2, real=True).substitute(emb, 3) for i in range(3)})
        B = PolyForm(3, 1, {(i,): S.random_poly(rng, 2, 2, 2, real=True).substitute(emb, 3) for i in range(3)})
        assert reduce_form(bracket_forms(R3, A, B), 2) == bracket_forms(P2, reduce_form(A, 2), reduce_form(B, 2))
