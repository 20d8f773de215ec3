"""Sampled loops and paths.

A closed loop is sampled on the uniform periodic grid ``tau_j = j/N``;
integrals use the trapezoid rule, which is spectrally accurate for
smooth periodic integrands.  Velocities default to spectral (FFT)
differentiation; order-4 central differences are available as
``velocity="fd4"``.

Open paths on ``[0, 1]`` use Chebyshev-Lobatto nodes with Chebyshev
interpolation for derivatives and Clenshaw-Curtis weights for
integrals.
"""

import numpy as np
from numpy.polynomial import chebyshev as C

from ..errors import DimensionMismatch
from ..numeric import eval_vf


def clenshaw_curtis(N):
    """Nodes on [0, 1] (increasing) and weights for N+1 Lobatto points."""
    theta = np.pi * np.arange(N + 1) / N
    x = -np.cos(theta)
    w = np.zeros(N + 1)
    v = np.ones(N - 1)
    ii = np.arange(1, N)
    if N % 2 == 0:
        w[0] = w[N] = 1.0 / (N * N - 1)
        for k in range(1, N // 2):
            v -= 2.0 * np.cos(2 * k * theta[ii]) / (4 * k * k - 1)
        v -= np.cos(N * theta[ii]) / (N * N - 1)
    else:
        w[0] = w[N] = 1.0 / (N * N)
        for k in range(1, (N - 1) // 2 + 1):
            v -= 2.0 * np.cos(2 * k * theta[ii]) / (4 * k * k - 1)
    w[ii] = 2.0 * v / N
    # map [-1, 1] -> [0, 1]
    return (x + 1) / 2, w / 2


class SampledLoop:
    """Discretized loop or path in R^n.

    Parameters
    ----------
    points : (N, n) array
        Samples; for closed loops at ``tau_j = j/N``, for open paths at
        the Chebyshev-Lobatto nodes of :func:`clenshaw_curtis`.
    closed : bool
    velocity : {"spectral", "fd4"}
        Differentiation scheme for closed loops.
    """

    def __init__(self, points, closed=True, velocity="spectral"):
        pts = np.array(points, dtype=np.float64)
        if pts.ndim != 2:
            raise DimensionMismatch("loop samples must be an (N, n) array")
        self.points = pts
        self.closed = closed
        self.scheme = velocity
        N = pts.shape[0]
        if closed:
            if N < 16 or N % 2:
                raise ValueError("closed loops need an even number N >= 16 of samples")
            self.tau = np.arange(N) / N
            self.weights = np.full(N, 1.0 / N)
        else:
            self.tau, self.weights = clenshaw_curtis(N - 1)
        self._vel = None

    @property
    def N(self):
        return self.points.shape[0]

    @property
    def n(self):
        return self.points.shape[1]

    @classmethod
    def from_function(cls, fn, N=256, closed=True, velocity="spectral"):
        """Sample ``fn(tau) -> (len(tau), n)`` on the appropriate grid."""
        tau = np.arange(N) / N if closed else clenshaw_curtis(N - 1)[0]
        return cls(fn(tau), closed=closed, velocity=velocity)

    @classmethod
    def circle(cls, N=256, radius=1.0, center=(0.0, 0.0, 0.0), plane=(0, 1)):
        def fn(t):
            p = np.tile(np.asarray(center, dtype=float), (len(t), 1))
            p[:, plane[0]] += radius * np.cos(2 * np.pi * t)
            p[:, plane[1]] += radius * np.sin(2 * np.pi * t)
            return p
        return cls.from_function(fn, N)

    def velocity(self):
        """Samples of d gamma / d tau."""
        if self._vel is None:
            self._vel = self._differentiate(self.points)
        return self._vel

    def _differentiate(self, f):
        if self.closed:
            N = self.N
            if self.scheme == "fd4":
                h = 1.0 / N
                return (-np.roll(f, -2, 0) + 8 * np.roll(f, -1, 0) - 8 * np.roll(f, 1, 0)
                        + np.roll(f, 2, 0)) / (12 * h)
            k = np.fft.fftfreq(N, d=1.0 / N)
            k[N // 2] = 0.0
            F = np.fft.fft(f, axis=0)
            return np.real(np.fft.ifft(2j * np.pi * k[:, None] * F, axis=0))
        # Chebyshev interpolation on [0, 1]
        x = 2 * self.tau - 1
        deg = self.N - 1
        out = np.empty_like(f)
        for i in range(f.shape[1]):
            c = C.chebfit(x, f[:, i], deg)
            out[:, i] = 2 * C.chebval(x, C.chebder(c))
        return out

    def integrate(self, values):
        """Quadrature of samples over the parameter interval."""
        return np.dot(self.weights, values)

    def deformed(self, X, eps):
        """The loop ``gamma + eps X`` with the same grid and scheme."""
        return SampledLoop(self.points + eps * np.real_if_close(X), closed=self.closed, velocity=self.scheme)

    def pullback_field(self, V):
        """Samples of a polynomial vector field along the loop (real)."""
        v = eval_vf(V, self.points)
        return np.real(v)

    # trigonometric interpolation for off-grid evaluation (closed loops)
    def _coeffs(self):
        F = np.fft.fft(self.points, axis=0) / self.N
        return F

    def at(self, tau, derivative=False):
        """Trigonometric interpolant (or its derivative) at arbitrary tau."""
        if not self.closed:
            x = 2 * np.asarray(tau, dtype=float) - 1
            out = []
            for i in range(self.n):
                c = C.chebfit(2 * self.tau - 1, self.points[:, i], self.N - 1)
                out.append(2 * C.chebval(x, C.chebder(c)) if derivative else C.chebval(x, c))
            return np.stack(out, axis=-1)
        N = self.N
        F = self._coeffs()
        k = np.fft.fftfreq(N, d=1.0 / N)
        tau = np.atleast_1d(np.asarray(tau, dtype=float))
        # symmetric treatment of the Nyquist mode keeps the interpolant real
        w = np.ones(N)
        w[N // 2] = 0.5
        ph = np.exp(2j * np.pi * np.outer(tau, k))
        res = np.zeros((len(tau), self.n), dtype=complex)
        fac = (2j * np.pi * k) if derivative else np.ones(N)
        res += (ph * (w * fac)) @ F
        if not derivative:
            # the Nyquist cosine appears with both signs of k
            res += 0.5 * np.outer(np.exp(2j * np.pi * tau * (N // 2)), F[N // 2])
        else:
            res += 0.5 * np.outer(2j * np.pi * (N // 2) * np.exp(2j * np.pi * tau * (N // 2)), F[N // 2])
        return np.real(res)

    def to_json(self):
        return {"dim": self.n, "closed": self.closed,
                "samples": [[float(v) for v in row] for row in self.points]}

    @classmethod
    def from_json(cls, data):
        return cls(np.array(data["samples"], dtype=float), closed=data.get("closed", True))


def open_path(fn, N=65):
    """Sample an open path on N Chebyshev-Lobatto nodes of [0, 1]."""
    return SampledLoop.from_function(fn, N, closed=False)
