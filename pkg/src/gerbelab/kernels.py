"""Kernel backend selection.

The compiled extension is used when it was built; otherwise, or when
the environment variable ``GERBELAB_PURE`` is set to ``1``, the numpy
fallback is used.  ``BACKEND`` names the active choice.
"""

import os

from . import _kernels_py

if os.environ.get("GERBELAB_PURE", "") == "1":
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

monomials = _impl.monomials
ordered_product = _impl.ordered_product
tri_sums = _impl.tri_sums

__all__ = ["BACKEND", "monomials", "ordered_product", "tri_sums"]
