"""Compare the compiled kernels with the numpy fallback.

Run ``python benchmarks/bench_kernels.py``.  Prints best-of-5 timings
and the largest deviation between the two backends.
"""

import timeit

import numpy as np

from gerbelab import _kernels_py

try:
    from gerbelab import _kernels
except ImportError:
    _kernels = None


def cases(rng):
    X = rng.normal(size=(4096, 3))
    E = rng.integers(0, 4, size=(20, 3))
    mats = rng.normal(size=(1024, 4, 4)) + 1j * rng.normal(size=(1024, 4, 4))
    mats /= np.linalg.norm(mats, axis=(1, 2), keepdims=True)
    vals = rng.normal(size=(5120, 3)) + 1j * rng.normal(size=(5120, 3))
    w = rng.random(size=(5120, 3))
    return {"monomials": (X, E), "ordered_product": (mats,), "tri_sums": (vals, w)}


def main():
    rng = np.random.default_rng(0)
    data = cases(rng)
    print(f"{'kernel':18s} {'python [ms]':>12s} {'cython [ms]':>12s} {'speedup':>8s} {'max dev':>10s}")
    for name, args in data.items():
        fpy = getattr(_kernels_py, name)
        tpy = min(timeit.repeat(lambda: fpy(*args), number=1, repeat=5)) * 1e3
        if _kernels is None:
            print(f"{name:18s} {tpy:12.3f} {'n/a':>12s}")
            continue
        fcy = getattr(_kernels, name)
        tcy = min(timeit.repeat(lambda: fcy(*args), number=1, repeat=5)) * 1e3
        dev = float(np.max(np.abs(np.asarray(fpy(*args)) - np.asarray(fcy(*args)))))
        print(f"{name:18s} {tpy:12.3f} {tcy:12.3f} {tpy / tcy:8.1f} {dev:10.2e}")


if __name__ == "__main__":
    main()
