"""Pure-Python reference versions of the compiled kernels."""
import numpy as np


def var_filter(A, x0, E):
    """Run ``x[t] = A x[t-1] + E[t]`` starting from ``x[-1] = x0``."""
    A = np.ascontiguousarray(A, dtype=np.float64)
    E = np.ascontiguousarray(E, dtype=np.float64)
    T, p = E.shape
    out = np.empty((T, p))
    if p == 1:
        a = float(A[0, 0])
        prev = float(x0[0])
        col = E[:, 0].tolist()
        vals = [0.0] * T
        for t in range(T):
            prev = a * prev + col[t]
            vals[t] = prev
        out[:, 0] = vals
        return out
    prev = np.array(x0, dtype=np.float64)
    for t in range(T):
        prev = A @ prev + E[t]
        out[t] = prev
    return out


def contingency_phi2(cx, cy, bins):
    """Chi-square statistic divided by n for two integer-coded samples."""
    cx = np.asarray(cx, dtype=np.int64)
    cy = np.asarray(cy, dtype=np.int64)
    n = cx.shape[0]
    counts = np.bincount(cx * bins + cy, minlength=bins * bins).reshape(bins, bins)
    rows = counts.sum(axis=1).astype(float)
    cols = counts.sum(axis=0).astype(float)
    expected = np.outer(rows, cols) / n
    mask = expected > 0
    diff = counts[mask] - expected[mask]
    return float(np.sum(diff * diff / expected[mask]) / n)
