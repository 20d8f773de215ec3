"""Exact exterior calculus on R^n with Q(i)[pi] coefficients."""

from .scalar import Scalar, ZERO, ONE, I, PI, TWO_PI_I
from .poly import Poly, PolyMap
from .forms import (PolyForm, VectorField, wedge, exterior_derivative, interior_product,
                    lie_derivative, pullback, evaluate, x, dx, partial, vol, perm_sign)

d = exterior_derivative

__all__ = ["Scalar", "ZERO", "ONE", "I", "PI", "TWO_PI_I", "Poly", "PolyMap", "PolyForm",
           "VectorField", "wedge", "exterior_derivative", "d", "interior_product",
           "lie_derivative", "pullback", "evaluate", "x", "dx", "partial", "vol", "perm_sign"]
