"""Kernel dispatch: compiled extension when importable, pure Python otherwise.

Set ``RHOMIX_PURE_PYTHON=1`` to force the fallback. ``BACKEND`` names the
implementation in use.
"""
import os

import numpy as np

from . import _pykernels

if os.environ.get("RHOMIX_PURE_PYTHON"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"


def var_filter(A, x0, E):
    """Return the ``(T, p)`` path of ``x[t] = A x[t-1] + E[t]`` with ``x[-1] = x0``."""
    A = np.ascontiguousarray(A, dtype=np.float64)
    x0 = np.ascontiguousarray(x0, dtype=np.float64)
    E = np.ascontiguousarray(E, dtype=np.float64)
    if (A.ndim != 2 or A.shape[0] != A.shape[1] or E.ndim != 2 or E.shape[1] != A.shape[0]
            or x0.shape != (A.shape[0],)):
        raise ValueError("var_filter: incompatible shapes %s, %s" % (A.shape, E.shape))
    return _impl.var_filter(A, x0, E)


def contingency_phi2(cx, cy, bins):
    """Pearson chi-square / n for integer codes in ``[0, bins)``."""
    cx = np.ascontiguousarray(cx, dtype=np.int64)
    cy = np.ascontiguousarray(cy, dtype=np.int64)
    bins = int(bins)
    if cx.shape != cy.shape or cx.ndim != 1 or cx.size == 0:
        raise ValueError("contingency_phi2: codes must be equal-length non-empty vectors")
    # the compiled loop indexes without bounds checks
    if min(cx.min(), cy.min()) < 0 or max(cx.max(), cy.max()) >= bins:
        raise ValueError("contingency_phi2: codes outside [0, bins)")
    return float(_impl.contingency_phi2(cx, cy, bins))
