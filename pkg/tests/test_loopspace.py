import numpy as np
import pytest

from gerbelab import sampling as S
from gerbelab import twovect as TV
from gerbelab.cech import CechCochain, Cover, U1Function
from gerbelab.errors import NotClosed, PatchGap
from gerbelab.exterior import (I, TWO_PI_I, PolyForm, dx, exterior_derivative as d, lie_derivative,
                               vol, x)
from gerbelab.gerbe import Trivialization, gerbe_from_trivialization, r3_curving, trivial_gerbe
from gerbelab.loopspace import (LoopFunctional, SampledLoop, TriangulatedSurface, boundary_term,
                                d_transgression, dbrane_holonomy, deform_derivative, hamiltonian_naturality,
                                holonomy_variation, icosphere, ks_apply, ks_commutator_residual,
                                lie_transgression, line_holonomy, line_holonomy_patches, loop_curvature,
                                open_path, path_ordered, polar_disc, section_covariant_derivative,
                                surface_holonomy, transgress_d, transgress_form, transgress_lie,
                                transgress_section_wilson, transgressed_connection, wilson_loop)
from gerbelab.plectic import make_plectic


@pytest.fixture
def circle():
    return SampledLoop.circle(256)


def radial(g):
    p = g.points.copy()
    p[:, 2] = 0
    return p


def e3(g):
    return np.tile([0.0, 0.0, 1.0], (g.N, 1))


# transgression

def test_transgress_examples(circle):
    v = transgress_form(vol(3), circle, [e3(circle), radial(circle)])
    assert abs(v - 2 * np.pi) / (2 * np.pi) <= 1e-10
    w = transgress_form(vol(3), circle, [radial(circle), e3(circle)])
    assert w == -v
    f = S.random_poly(S.rng(5), 3, 3, 3, real=True)
    g = S.random_loop(S.rng(6))
    assert abs(transgress_form(d(PolyForm.function(f)), g)) <= 1e-12


def test_velocity_options():
    g = SampledLoop.circle(256)
    g4 = SampledLoop(g.points, velocity="fd4")
    exact = 2 * np.pi * np.stack([-np.sin(2 * np.pi * g.tau), np.cos(2 * np.pi * g.tau), 0 * g.tau], axis=1)
    assert np.max(np.abs(g.velocity() - exact)) < 1e-10
    assert np.max(np.abs(g4.velocity() - exact)) < 1e-6


def test_deform_derivative(rng):
    g = S.random_loop(rng)
    X = S.random_tangent(rng, g)
    assert deform_derivative(lambda loop: 3.0, g, X) == 0
    theta = S.random_form(rng, 3, 1, 2, 3)
    V = S.random_vf(rng, 3, 1)
    Xg = g.pullback_field(V)
    F = lambda loop: transgress_form(theta, loop)
    ref = transgress_form(lie_derivative(V, theta), g)
    assert abs(deform_derivative(F, g, Xg, 1e-4, True) - ref) <= 1e-6
    e1 = abs(deform_derivative(F, g, Xg, 2e-2) - ref)
    e2 = abs(deform_derivative(F, g, Xg, 1e-2) - ref)
    assert 3.5 < e1 / e2 < 4.5


def test_chain_map_and_boundary(rng):
    for p in (1, 2, 3):
        w = S.random_form(rng, 3, p, 2, 3)
        fields = [S.random_vf(rng, 3, 1) for _ in range(p)]
        g = S.random_loop(rng)
        assert abs(d_transgression(w, g, fields) - transgress_d(w, g, fields)) <= 1e-5
        path = S.random_path(rng, 257)
        lhs = d_transgression(w, path, fields)
        assert abs(lhs - transgress_d(w, path, fields) - boundary_term(w, path, fields)) <= 1e-5
        X = S.random_vf(rng, 3, 2)
        assert abs(lie_transgression(w, g, X, fields[:p - 1]) - transgress_lie(w, g, X, fields[:p - 1])) <= 1e-5


# holonomy

def test_line_holonomy_examples():
    g = SampledLoop.circle(512)
    assert line_holonomy(PolyForm.zero(3, 1), g) == 1
    A = x(3, 1) * dx(3, 2) * (-TWO_PI_I)
    h = line_holonomy(A, g)
    assert abs(h / np.exp(2j * np.pi ** 2) - 1) <= 1e-8


def test_two_patch_gauge_invariance():
    cov = Cover.from_maximal(3, ["a", "b"], [("a", "b")])
    A = x(3, 1) * dx(3, 2) * (-TWO_PI_I) + x(3, 3) * dx(3, 1) * I
    f = U1Function(x(3, 1) * x(3, 2) + x(3, 1))
    conn = {"a": A, "b": A - f.dlog()}
    g = SampledLoop.circle(512, 1.0, (0.2, -0.1, 0.3))
    h = line_holonomy_patches(cov, conn, {("a", "b"): f}, g, [(0.1, "a"), (0.6, "b")])
    assert abs(h - line_holonomy(A, g)) <= 1e-8
    with pytest.raises(PatchGap):
        line_holonomy_patches(cov, {"a": A}, {("a", "b"): f}, g, [(0.1, "a"), (0.6, "b")])


def test_wilson_basics(rng):
    g = S.random_loop(rng)
    z = TV.MatForm.zeros(3, 1, (3, 3))
    assert abs(wilson_loop(z, g) - 3) < 1e-14
    A = S.random_form(rng, 3, 1, 2, 3, real=True, with_pi=False) * I
    assert abs(wilson_loop(TV.MatForm.scalar(A, 1), g) - line_holonomy(A, g)) <= 1e-5


def test_wilson_step_halving(rng):
    a = S.random_anti_hermitian_form(rng, 3, 3, deg=1)
    g = S.random_loop(rng, 4096)
    ref = path_ordered(a, g)
    errs = []
    for N in (64, 128):
        gN = SampledLoop.from_function(lambda t: g.at(t), N)
        errs.append(np.linalg.norm(path_ordered(a, gN) - ref))
    assert 3.5 < errs[0] / errs[1] < 4.5


def test_wilson_metric_compatibility(rng):
    g = S.random_loop(rng)
    for _ in range(3):
        w1 = S.random_form(rng, 3, 1, 1, 2, real=True, with_pi=False) * I
        w2 = S.random_form(rng, 3, 1, 1, 2, real=True, with_pi=False) * I
        E, F = TV.ModelSection([[w1]]), TV.ModelSection([[w2]])
        h = TV.gerbe_metric(E, F)
        lhs = np.conj(wilson_loop(E.omega, g)) * wilson_loop(F.omega, g)
        assert abs(lhs - wilson_loop(h.omega, g)) <= 1e-8


def test_surface_holonomy_sphere(rng):
    Sph = icosphere(4)
    oracle = np.exp(8j * np.pi ** 2 / 3)
    assert abs(surface_holonomy(r3_curving(), Sph) / oracle - 1) <= 1e-3
    assert abs(surface_holonomy(trivial_gerbe(r3_curving()), Sph) / oracle - 1) <= 1e-3
    assert abs(surface_holonomy(PolyForm.zero(3, 2), Sph) - 1) < 1e-14
    sigma = d(S.random_form(rng, 3, 1, 2, 3, real=True, with_pi=False))
    assert abs(surface_holonomy(r3_curving() + sigma * TWO_PI_I, Sph) / oracle - 1) <= 1e-3


def test_surface_needs_closed():
    with pytest.raises(NotClosed):
        surface_holonomy(r3_curving(), polar_disc())


def test_local_surface_holonomy(rng):
    cov = Cover.from_maximal(3, ["a", "b"], [("a", "b")])
    h = CechCochain(cov, 1, "u1", {("a", "b"): U1Function(x(3, 1) * x(3, 2) * 2)})
    a = CechCochain(cov, 0, 1, {("a",): x(3, 2) * dx(3, 3) * I, ("b",): x(3, 1) * dx(3, 2) * I})
    rho = r3_curving()
    L = gerbe_from_trivialization(cov, Trivialization(cov, h, a, rho))
    Sph = icosphere(4)
    P = Sph.points()
    faces = ["a" if P[list(t)].mean(axis=0)[2] > 0 else "b" for t in Sph.T]
    edges = {}
    for k, t in enumerate(Sph.T):
        for i, j in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0])):
            edges.setdefault((min(i, j), max(i, j)), faces[k])
    verts = ["a" if p[0] > 0 else "b" for p in P]
    Sph.assignment = {"faces": faces, "edges": edges, "vertices": verts}
    loc = surface_holonomy(L, Sph, mode="local")
    assert abs(loc - np.exp(-Sph.integrate(rho))) <= 1e-3
    with pytest.raises(PatchGap):
        surface_holonomy(L, Sph)


def test_dbrane(rng):
    disc = polar_disc(16, 64)
    bnd = SampledLoop.circle(256)
    z = TV.MatForm.zeros(3, 1, (1, 1))
    assert abs(dbrane_holonomy(PolyForm.zero(3, 2), z, disc, bnd) - 1) < 1e-14
    rho = S.random_form(rng, 3, 2, 2, 3, real=True, with_pi=False) * I
    a = S.random_anti_hermitian_form(rng, 3, 2)
    lam = S.random_form(rng, 3, 1, 2, 3, real=True, with_pi=False) * I
    h0 = dbrane_holonomy(rho, a, disc, bnd)
    h1 = dbrane_holonomy(rho + d(lam), a - TV.MatForm.scalar(lam, 2), disc, bnd)
    assert abs(h1 - h0) <= 1e-3 * abs(h0)
    # rank-2 block: sum of the two phases times the disc factor
    A1 = S.random_form(rng, 3, 1, 2, 2, real=True, with_pi=False) * I
    A2 = S.random_form(rng, 3, 1, 2, 2, real=True, with_pi=False) * I
    blk = TV.MatForm.scalar(A1, 1).block_diag(TV.MatForm.scalar(A2, 1))
    want = (line_holonomy(A1, bnd) + line_holonomy(A2, bnd)) * np.exp(-disc.integrate(rho))
    assert abs(dbrane_holonomy(rho, blk, disc, bnd) - want) <= 1e-3 * abs(want)


def test_surface_json():
    S1 = icosphere(1, exact=False)
    S2 = TriangulatedSurface.from_json(S1.to_json())
    assert np.allclose(S1.points(), S2.points())


def test_loop_json(rng):
    g = S.random_loop(rng, 64)
    assert np.array_equal(SampledLoop.from_json(g.to_json()).points, g.points)


# loop-space connection and KS

def test_transgressed_connection(circle):
    rho = r3_curving()
    assert transgressed_connection(PolyForm.zero(3, 2), circle, e3(circle)) == 0
    v = transgressed_connection(rho, circle, e3(circle))
    assert abs(v - 4j * np.pi ** 2 / 3) <= 1e-10
    X, Y = e3(circle), radial(circle)
    assert transgressed_connection(rho, circle, X + Y) == pytest.approx(
        transgressed_connection(rho, circle, X) + transgressed_connection(rho, circle, Y), abs=1e-13)


def test_curvature_and_variation(rng):
    g = S.random_loop(rng)
    rho = r3_curving() + S.random_form(rng, 3, 2, 2, 2, real=True, with_pi=False) * I
    X1, X2 = S.random_tangent(rng, g), S.random_tangent(rng, g)
    assert abs(loop_curvature(rho, g, X1, X2) - transgress_form(d(rho), g, [X1, X2])) <= 1e-4
    A = S.random_form(rng, 3, 1, 2, 3, real=True, with_pi=False) * I
    fd, pred = holonomy_variation(A, g, X1)
    assert abs(fd - pred) <= 1e-4


def test_hamiltonian_naturality(rng):
    P = make_plectic(vol(3))
    g = S.random_loop(rng)
    a = S.random_form(rng, 3, 1, 2, 3, real=True, with_pi=False)
    lhs, rhs = hamiltonian_naturality(P, a, g, S.random_tangent(rng, g))
    assert abs(lhs - rhs) <= 1e-5


def test_functional_derivative(rng):
    g = S.random_loop(rng)
    Psi = LoopFunctional.exp(S.random_form(rng, 3, 1, 2, 2, real=True, with_pi=False), I)
    X = S.random_tangent(rng, g)
    assert abs(deform_derivative(Psi, g, X, 1e-4, True) - Psi.derivative(g, X)) <= 1e-6
    assert abs(LoopFunctional.from_json(Psi.to_json())(g) - Psi(g)) == 0


def test_ks(rng):
    P = make_plectic(vol(3))
    rho = r3_curving()
    g = SampledLoop.circle(256, 0.8, (0.1, 0.2, -0.3), (0, 2))
    a, b = x(3, 3) * dx(3, 1), x(3, 1) * dx(3, 2)
    Psi = LoopFunctional.exp(x(3, 2) * dx(3, 3))
    res, nrm = ks_commutator_residual(P, rho, a, b, Psi, g)
    assert abs(res) <= 1e-3 * nrm
    f = S.random_poly(rng, 3, 3, 3, real=True, with_pi=False)
    assert abs(ks_apply(P, rho, d(PolyForm.function(f)), Psi, g)) <= 1e-10
    assert ks_apply(P, rho, a, Psi * 2, g) == 2 * ks_apply(P, rho, a, Psi, g)
    for _ in range(3):
        a = S.random_form(rng, 3, 1, 2, 2, real=True, with_pi=False)
        b = S.random_form(rng, 3, 1, 2, 2, real=True, with_pi=False)
        Psi = LoopFunctional.exp(S.random_form(rng, 3, 1, 2, 2, real=True, with_pi=False), I)
        gl = S.random_loop(rng)
        res, nrm = ks_commutator_residual(P, rho, a, b, Psi, gl)
        assert abs(res) <= 1e-3 * nrm


def test_fake_flat_section_parallel(rng):
    rho = dx(3, 1, 2) * I
    I0, Ir = trivial_gerbe(PolyForm.zero(3, 2)), trivial_gerbe(rho)
    w1 = x(3, 1) * dx(3, 2) * I + dx(3, 3) * I
    w2 = x(3, 1) * dx(3, 2) * I + dx(3, 1) * (I * 2)
    z = PolyForm.zero(3, 1)
    E = TV.make_morphism(I0, Ir, {}, {"U": [[w1, z], [z, w2]]}, fake_flat=True)
    g = S.random_loop(rng)
    X = S.random_tangent(rng, g)
    assert abs(section_covariant_derivative(E, rho, g, X)) <= 1e-4
    # a section that is not fake-flat is not parallel
    E2 = TV.make_morphism(I0, Ir, {}, {"U": [[w1 + x(3, 3) * dx(3, 1) * I]]})
    assert abs(section_covariant_derivative(E2, rho, g, X)) > 1e-3
    assert transgress_section_wilson(E, g) == wilson_loop(E.connection(), g)


def test_open_path_quadrature():
    p = open_path(lambda t: np.stack([t, t ** 2, 0 * t], axis=1), 65)
    assert abs(transgress_form(x(3, 1) * dx(3, 2), p) - 2 / 3) < 1e-12
