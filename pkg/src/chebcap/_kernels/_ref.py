"""NumPy reference implementations of the hot numerical kernels.

These are the fallback used when the compiled extension is unavailable; the
extension module `_core` implements the same three functions with identical
signatures.
"""

import numpy as np

BACKEND_NAME = "numpy"

_CHUNK = 2048


def clenshaw_cheb(coeffs, x):
    """Evaluate sum_k coeffs[k] * T_k(x) by the Clenshaw recurrence.

    `coeffs` is a 1-D float64 array (degree = len - 1), `x` a 1-D float64
    array. Returns a float64 array of the same length as `x`.
    """
    n = coeffs.shape[0]
    if n == 1:
        return np.full_like(x, coeffs[0])
    two_x = 2.0 * x
    b1 = np.zeros_like(x)
    b2 = np.zeros_like(x)
    for k in range(n - 1, 0, -1):
        b1, b2 = coeffs[k] + two_x * b1 - b2, b1
    return coeffs[0] + x * b1 - b2


def horner(coeffs, z):
    """Evaluate sum_k coeffs[k] * z**k (ascending powers) by Horner's rule.

    `coeffs` is complex128, `z` a 1-D complex128 array.
    """
    acc = np.full_like(z, coeffs[-1])
    for k in range(coeffs.shape[0] - 2, -1, -1):
        acc = acc * z + coeffs[k]
    return acc


def log_abs_sum(nodes, weights, z):
    """Weighted log-distance sums: out[i] = sum_j weights[j]*log|z[i]-nodes[j]|.

    `nodes` is complex128, `weights` float64, `z` complex128. Chunked to keep
    the broadcast temporaries bounded.
    """
    out = np.empty(z.shape[0], dtype=np.float64)
    for lo in range(0, z.shape[0], _CHUNK):
        hi = min(lo + _CHUNK, z.shape[0])
        d = z[lo:hi, None] - nodes[None, :]
        out[lo:hi] = np.log(np.abs(d)) @ weights
    return out
