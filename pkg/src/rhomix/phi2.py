"""Pearson's phi-squared for the stationary Gaussian pair ``(X(t), X(t+1))``.

Three routes are provided and cross-checked:

* :func:`phi2_general` evaluates the determinant formula on the assembled
  ``2p x 2p`` covariances;
* :func:`phi2_var1_closed` / :func:`phi2_varma_closed` evaluate
  ``-1 + 1 / det(I - M)`` for the model-specific ``p x p`` matrix ``M``;
* :func:`phi2_from_canonical_corrs` uses ``-1 + prod 1 / (1 - r_i^2)``.

All determinants are handled as log-determinants.
"""
import math
from dataclasses import dataclass

import numpy as np

from . import _linalg as la
from .errors import OutOfRange, Phi2Overflow, SingularDeterminant
from .lemmas import invcovdiff_matrix

SINGULAR_EIG = 1e-14
EIG_FLOOR = 1e-300
CLAMP_NEG = 1e-12
_MAX_LOG = math.log(np.finfo(np.float64).max)

PAPER_BOUND_NOTE = (
    "VAR(1) bound uses (zeta/delta)^k - 1: lambda_min(Gamma^-1 Sigma_xi) >= "
    "lambda_min(Sigma_xi)/lambda_max(Gamma) > delta/zeta, so the printed "
    "ratio delta/zeta is inverted in the source derivation")


def _finish(log1p_phi2):
    if log1p_phi2 > _MAX_LOG:
        raise Phi2Overflow(log1p_phi2)
    val = math.expm1(log1p_phi2)
    if -CLAMP_NEG < val <= 0.0:
        val = 0.0  # also normalizes -0.0
    return val


def log1p_phi2_general(cov):
    """``log(1 + phi2)`` from the joint and block-diagonal covariances."""
    K = invcovdiff_matrix(cov.gamma, cov.gamma1.T)
    ld_kernel = la.logdet_pd(K, "2 Sigma^-1 - Sigma_tilde^-1")
    ld_joint = la.logdet_pd(cov.sigma2p, "Sigma_2p")
    ld_tilde = 2.0 * la.logdet_pd(cov.gamma, "Gamma")
    return 0.5 * ld_tilde - 0.5 * ld_kernel - ld_joint


def phi2_general(cov):
    return _finish(log1p_phi2_general(cov))


def _log1p_from_eigs(s):
    """``-sum log(1 - s_i)`` for the eigenvalues ``s_i`` of the matrix inside
    the determinant ``det(I - M)``."""
    s = np.clip(np.asarray(s, dtype=np.float64), 0.0, None)
    one_minus = 1.0 - s
    if one_minus.size and one_minus.min() <= SINGULAR_EIG:
        raise SingularDeterminant(
            "det(I - M) has an eigenvalue %.3e; dependence is numerically maximal"
            % one_minus.min())
    return -float(np.sum(np.log(np.maximum(one_minus, EIG_FLOOR))))


def _congruent_eigs(gamma, N):
    """Eigenvalues of ``Gamma^{-1} N`` through the symmetric form
    ``Gamma^{-1/2} N Gamma^{-1/2}``."""
    W = la.inv_sqrt_sym(gamma)
    return np.linalg.eigvalsh(la.symmetrize(W @ N @ W))


def log1p_phi2_var1(A, gamma):
    A = np.asarray(A, dtype=np.float64)
    gamma = np.asarray(gamma, dtype=np.float64)
    return _log1p_from_eigs(_congruent_eigs(gamma, A @ gamma @ A.T))


def phi2_var1_closed(A, gamma):
    """``-1 + 1 / det(I - Gamma^{-1} A Gamma A^T)``."""
    return _finish(log1p_phi2_var1(A, gamma))


def log1p_phi2_varma(L, gamma, sigma_xi):
    L = np.asarray(L, dtype=np.float64)
    gamma = np.asarray(gamma, dtype=np.float64)
    C = L @ (gamma - np.asarray(sigma_xi, dtype=np.float64))
    N = C.T @ np.linalg.solve(gamma, C)
    return _log1p_from_eigs(_congruent_eigs(gamma, N))


def phi2_varma_closed(L, gamma, sigma_xi):
    """``-1 + 1 / det(I - Gamma^{-1}(Gamma - S) L^T Gamma^{-1} L (Gamma - S))``."""
    return _finish(log1p_phi2_varma(L, gamma, sigma_xi))


def phi2_from_canonical_corrs(r):
    r = np.asarray(r, dtype=np.float64).ravel()
    if r.size and (np.any(r < 0.0) or np.any(r >= 1.0)):
        raise OutOfRange("canonical correlations must lie in [0, 1)")
    return _finish(-float(np.sum(np.log1p(-r * r))))


def phi2_bound_var1(k, delta, zeta):
    """Assumption-based upper bound ``(zeta/delta)^k - 1``."""
    if not 0.0 < delta < zeta:
        raise OutOfRange("need 0 < delta < zeta")
    if k < 0:
        raise OutOfRange("k must be non-negative")
    return math.expm1(k * math.log(zeta / delta))


def phi2_bound_varma(k, delta, zeta, mu):
    """``(zeta / (delta (1 - mu)^2))^k - 1``."""
    if not (delta > 0.0 and 0.0 <= mu < 1.0):
        raise OutOfRange("need delta > 0 and 0 <= mu < 1")
    floor = delta * (1.0 - mu) ** 2
    if not zeta > floor:
        raise OutOfRange("need zeta > delta (1 - mu)^2")
    if k < 0:
        raise OutOfRange("k must be non-negative")
    return math.expm1(k * math.log(zeta / floor))


def bound_holds(phi2, bound, k):
    """Strict ``phi2 < bound`` for ``k >= 1``; at ``k = 0`` both are exactly zero."""
    if k == 0:
        return phi2 == 0.0 and bound == 0.0
    return phi2 < bound


# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Phi2Report:
    phi2_general: float
    phi2_closed: float
    bound: float
    canonical_corrs: np.ndarray
    log1p_phi2: float
    paper_bound_note: str = ""

    @property
    def phi2_canonical(self):
        return phi2_from_canonical_corrs(self.canonical_corrs)

    def route_gap(self):
        """Largest normalized disagreement between the three routes."""
        scale = 1.0 + self.phi2_closed
        return max(abs(self.phi2_general - self.phi2_closed),
                   abs(self.phi2_canonical - self.phi2_closed)) / scale


def phi2_closed(model, gamma):
    if model.kind == "var1":
        return phi2_var1_closed(model.A, gamma)
    return phi2_varma_closed(model.L, gamma, model.sigma_xi)


def phi2_bound(model, delta, zeta, mu=None):
    """Bound for the model family; for factor models ``mu`` defaults to ``||L||``."""
    if model.kind == "var1":
        return phi2_bound_var1(model.k, delta, zeta)
    if mu is None:
        mu = la.spectral_norm(model.L)
    return phi2_bound_varma(model.k, delta, zeta, mu)


def phi2_report(model, cov, delta, zeta, mu=None):
    from .mixing import canonical_correlations

    closed = phi2_closed(model, cov.gamma)
    if model.kind == "var1":
        log1p = log1p_phi2_var1(model.A, cov.gamma)
    else:
        log1p = log1p_phi2_varma(model.L, cov.gamma, model.sigma_xi)
    return Phi2Report(
        phi2_general=phi2_general(cov),
        phi2_closed=closed,
        bound=phi2_bound(model, delta, zeta, mu),
        canonical_corrs=canonical_correlations(cov.gamma, cov.gamma1),
        log1p_phi2=log1p,
        paper_bound_note=PAPER_BOUND_NOTE if model.kind == "var1" else "")
