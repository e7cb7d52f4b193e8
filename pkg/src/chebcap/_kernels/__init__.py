"""Numerical inner-loop kernels.

The compiled Cython extension is used when it was built; otherwise the NumPy
reference implementation is selected at import time. `BACKEND` reports which
one is active. Both backends are importable directly (`_core`, `_ref`) for
the comparison benchmark.
"""

import numpy as np

from . import _ref

try:
    from . import _core as _impl

    BACKEND = "cython"
except ImportError:  # extension not built; fall back to NumPy
    _impl = _ref
    BACKEND = "numpy"


def clenshaw_cheb(coeffs, x):
    """Chebyshev-series evaluation sum_k c_k T_k(x) at real points."""
    c = np.ascontiguousarray(coeffs, dtype=np.float64)
    xx = np.ascontiguousarray(x, dtype=np.float64)
    return _impl.clenshaw_cheb(c, xx)


def horner(coeffs, z):
    """Power-series evaluation sum_k c_k z^k at complex points."""
    c = np.ascontiguousarray(coeffs, dtype=np.complex128)
    zz = np.ascontiguousarray(z, dtype=np.complex128)
    return _impl.horner(c, zz)


def log_abs_sum(nodes, weights, z):
    """Weighted sums of log|z - node| over all nodes, per evaluation point."""
    t = np.ascontiguousarray(nodes, dtype=np.complex128)
    w = np.ascontiguousarray(weights, dtype=np.float64)
    zz = np.ascontiguousarray(z, dtype=np.complex128)
    return _impl.log_abs_sum(t, w, zz)
