"""Transgressed connection, its curvature and the Kostant-Souriau operator.

In the trivial-gerbe regime the transgressed line bundle over loop
space is trivial with connection ``A = T(rho)``.  Sections are loop
functionals; the prequantum operator of a Hamiltonian 1-form is

    Q(alpha) Psi = D_{X_alpha} Psi + A(X_alpha) Psi + 2 pi i T(alpha) Psi.
"""

import numpy as np

from ..exterior import exterior_derivative
from ..plectic import bracket_forms, hamiltonian_vf
from .holonomy import line_holonomy, transgress_section_wilson
from .transgression import deform_derivative, transgress_form


def transgressed_connection(rho, gamma, X):
    """``A|_gamma(X) = T(rho)|_gamma(X)``."""
    return transgress_form(rho, gamma, [X])


def loop_curvature(rho, gamma, X1, X2, eps=1e-4, richardson=False):
    """Antisymmetrized second differences of the connection.

    Sample tangents are constant fields on the loop space, so their
    bracket vanishes and ``F(X1, X2) = D_{X1} A(X2) - D_{X2} A(X1)``.
    Compare with ``transgress_form(d rho, gamma, [X1, X2])``.
    """
    def A2(loop):
        return transgressed_connection(rho, loop, X2)

    def A1(loop):
        return transgressed_connection(rho, loop, X1)

    return (deform_derivative(A2, gamma, X1, eps, richardson)
            - deform_derivative(A1, gamma, X2, eps, richardson))


def holonomy_variation(A, gamma, Y, eps=1e-4, richardson=False):
    """Finite-difference and predicted ``d/ds hol(gamma + s Y)`` at s = 0.

    Returns
    -------
    (fd, predicted) : tuple of complex
        ``predicted = -hol * int F(Y, gamma') d tau`` with ``F = dA``.
    """
    fd = deform_derivative(lambda loop: line_holonomy(A, loop), gamma, Y, eps, richardson)
    F = exterior_derivative(A)
    pred = -line_holonomy(A, gamma) * transgress_form(F, gamma, [Y])
    return fd, pred


def hamiltonian_naturality(P, alpha, gamma, Y, eps=1e-4, richardson=True):
    """Both sides of ``iota_{X_alpha} T(omega) = -d T(alpha)`` on a tangent Y."""
    X = gamma.pullback_field(hamiltonian_vf(P, alpha))
    lhs = transgress_form(P.omega, gamma, [X, Y])
    rhs = -deform_derivative(lambda loop: transgress_form(alpha, loop), gamma, Y, eps, richardson)
    return lhs, rhs


def section_covariant_derivative(E, rho, gamma, X, eps=1e-4, richardson=True):
    """``D_X W + A(X) W`` for the Wilson loop ``W`` of a section ``E``.

    Vanishes for fake-flat sections ``F_E = rho 1`` of ``I_rho``.
    """
    D = deform_derivative(lambda loop: transgress_section_wilson(E, loop), gamma, X, eps, richardson)
    return D + transgressed_connection(rho, gamma, X) * transgress_section_wilson(E, gamma)


def ks_apply(P, rho, alpha, Psi, gamma, eps=1e-4, richardson=False):
    """``(Q(alpha) Psi)(gamma)``; ``Psi`` is any callable on loops."""
    V = hamiltonian_vf(P, alpha)
    if not any(c for c in V.comps):
        D = 0j
        A = 0j
    else:
        X = gamma.pullback_field(V)
        D = deform_derivative(Psi, gamma, X, eps, richardson)
        A = transgressed_connection(rho, gamma, X)
    return D + (A + 2j * np.pi * transgress_form(alpha, gamma)) * Psi(gamma)


def ks_operator(P, rho, alpha, eps=1e-4, richardson=False):
    """``Psi -> Q(alpha) Psi`` as a map on loop callables."""
    hamiltonian_vf(P, alpha)

    def apply(Psi):
        return lambda gamma: ks_apply(P, rho, alpha, Psi, gamma, eps, richardson)

    return apply


def ks_commutator_residual(P, rho, alpha, beta, Psi, gamma, eps=1e-3, richardson=True):
    """``([Q(alpha), Q(beta)] - Q([alpha, beta])) Psi`` at gamma, and ``|Psi(gamma)|``.

    Nested central differences at ``eps = 1e-3`` carry an O(eps^2) bias
    of relative size up to 1e-1 on generic quadratic data, hence the
    Richardson default.
    """
    Qa = ks_operator(P, rho, alpha, eps, richardson)
    Qb = ks_operator(P, rho, beta, eps, richardson)
    Qab = ks_operator(P, rho, bracket_forms(P, alpha, beta), eps, richardson)
    lhs = Qa(Qb(Psi))(gamma) - Qb(Qa(Psi))(gamma)
    rhs = Qab(Psi)(gamma)
    return lhs - rhs, abs(Psi(gamma))
