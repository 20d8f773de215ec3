"""Symbolic functionals on loop space.

A :class:`LoopFunctional` is a finite sum of products of exponentials
``exp(c * T(theta))`` of transgressed 1-forms.  Each one can be
evaluated on any sampled loop and has a closed-form directional
derivative, used to cross-check finite differences.
"""

import numpy as np

from ..exterior import PolyForm, Scalar, exterior_derivative
from ..numeric import eval_form
from .transgression import transgress_form


def _scalar(c):
    return c if isinstance(c, Scalar) else Scalar.of(c)


class LoopFunctional:
    """``sum_k w_k prod_m exp(c_km T(theta_km))``.

    Parameters
    ----------
    terms : list of (weight, [(c, theta), ...])
        Weights and exponent factors; ``c`` is a Scalar (or rational) and
        ``theta`` a 1-form.
    """

    def __init__(self, terms):
        self.terms = [(_scalar(w), [(_scalar(c), th) for c, th in fs]) for w, fs in terms]

    @classmethod
    def exp(cls, theta, c=1):
        return cls([(1, [(c, theta)])])

    @classmethod
    def constant(cls, w):
        return cls([(w, [])])

    def __add__(self, other):
        return LoopFunctional(self.terms + other.terms)

    def __mul__(self, other):
        if not isinstance(other, LoopFunctional):
            return LoopFunctional([(w * _scalar(other), fs) for w, fs in self.terms])
        return LoopFunctional([(w1 * w2, f1 + f2) for w1, f1 in self.terms for w2, f2 in other.terms])

    __rmul__ = __mul__

    def _exponent(self, fs, gamma):
        return sum((complex(c) * transgress_form(th, gamma) for c, th in fs), 0j)

    def __call__(self, gamma):
        return complex(sum(complex(w) * np.exp(self._exponent(fs, gamma)) for w, fs in self.terms))

    def derivative(self, gamma, X):
        """Exact directional derivative along a loop tangent ``X`` (closed loops).

        Uses ``D_X T(theta) = int d theta(X, gamma') d tau``.
        """
        X = np.asarray(X)
        vel = gamma.velocity()
        total = 0j
        for w, fs in self.terms:
            dexp = 0j
            for c, th in fs:
                dth = exterior_derivative(th)
                dexp += complex(c) * complex(gamma.integrate(eval_form(dth, gamma.points, [X, vel])))
            total += complex(w) * np.exp(self._exponent(fs, gamma)) * dexp
        return complex(total)

    def to_json(self):
        return {"terms": [{"weight": w.to_json(),
                           "factors": [{"c": c.to_json(), "theta": th.to_json()} for c, th in fs]}
                          for w, fs in self.terms]}

    @classmethod
    def from_json(cls, data):
        return cls([(Scalar.from_json(t["weight"]),
                     [(Scalar.from_json(f["c"]), PolyForm.from_json(f["theta"])) for f in t["factors"]])
                    for t in data["terms"]])

    def __repr__(self):
        return f"LoopFunctional({len(self.terms)} terms)"
