"""Small dense linear-algebra helpers shared by the modules."""
import numpy as np
import scipy.linalg as sla

from .errors import DimensionMismatch, NotPositiveDefinite

# relative floor used when validating covariance inputs
PD_RTOL = 1e-12


def as_matrix(M, name="matrix", square=True):
    M = np.array(M, dtype=np.float64, ndmin=2)
    if M.ndim != 2:
        raise DimensionMismatch("%s must be 2-D, got shape %s" % (name, M.shape))
    if square and M.shape[0] != M.shape[1]:
        raise DimensionMismatch("%s must be square, got shape %s" % (name, M.shape))
    return M


def symmetrize(M):
    return 0.5 * (M + M.T)


def frozen(M):
    M = np.array(M, dtype=np.float64, copy=True)
    M.setflags(write=False)
    return M


def require_pd(M, name="matrix", rtol=PD_RTOL):
    """Validate a symmetric positive definite matrix and return it symmetrized.

    Accepts ``M`` when its smallest eigenvalue exceeds ``rtol * max(1, lmax)``.
    """
    M = as_matrix(M, name)
    scale = max(1.0, float(np.max(np.abs(M)))) if M.size else 1.0
    if not np.allclose(M, M.T, rtol=0.0, atol=1e-10 * scale):
        raise NotPositiveDefinite("%s is not symmetric" % name)
    M = symmetrize(M)
    if not np.all(np.isfinite(M)):
        raise NotPositiveDefinite("%s has non-finite entries" % name)
    w = np.linalg.eigvalsh(M)
    if w[0] <= rtol * max(1.0, w[-1]):
        raise NotPositiveDefinite(
            "%s is not positive definite (lambda_min = %.3e)" % (name, w[0]))
    return M


def sqrt_sym(M):
    w, V = np.linalg.eigh(symmetrize(M))
    w = np.clip(w, 0.0, None)
    return (V * np.sqrt(w)) @ V.T


def inv_sqrt_sym(M, floor=1e-12):
    """Return ``M^{-1/2}`` with eigenvalues floored at ``floor * lambda_max``."""
    w, V = np.linalg.eigh(symmetrize(M))
    if w[-1] <= 0:
        raise NotPositiveDefinite("matrix has no positive eigenvalue")
    w = np.maximum(w, floor * w[-1])
    return (V / np.sqrt(w)) @ V.T


def logdet_pd(M, name="matrix"):
    try:
        c = sla.cholesky(symmetrize(M), lower=True)
    except np.linalg.LinAlgError:
        raise NotPositiveDefinite("%s failed Cholesky factorization" % name) from None
    return 2.0 * float(np.sum(np.log(np.diag(c))))


def spectral_norm(M):
    M = np.asarray(M, dtype=np.float64)
    if M.size == 0:
        return 0.0
    return float(np.linalg.norm(M, 2))


def spectral_radius(M):
    M = np.asarray(M, dtype=np.float64)
    if M.size == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(M))))


def numerical_rank(M, rank_tol=1e-10):
    """Count singular values above ``rank_tol * sigma_1``."""
    s = np.linalg.svd(np.asarray(M, dtype=np.float64), compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > rank_tol * s[0]))


def haar_orthogonal(rng, n):
    """Haar-distributed orthogonal matrix from the QR of a Gaussian matrix."""
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def block_joint(gamma, gamma1):
    """``[[G, G1^T], [G1, G]]``, the covariance of ``(X(t), X(t+1))``."""
    return np.block([[gamma, gamma1.T], [gamma1, gamma]])
