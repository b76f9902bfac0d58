"""Stationary covariances of the VAR(1) and factor models.

The discrete Lyapunov equation ``G = A G A^T + Q`` is solved by the doubling
iteration ``G <- G + A_j G A_j^T``, ``A_j <- A_j^2``, with a Kronecker-product
linear solve as fallback for small ``p``.
"""
from dataclasses import dataclass

import numpy as np

from . import _linalg as la
from .errors import ConsistencyFailure, DimensionMismatch, NoConvergence, NotPositiveDefinite

LYAP_RTOL = 1e-12
LYAP_MAX_ITER = 200
KRON_MAX_P = 64
VARMA_CONSISTENCY_RTOL = 1e-8


def lyapunov_residual(A, Q, G):
    """Relative Frobenius residual ``||G - A G A^T - Q|| / ||G||``."""
    num = np.linalg.norm(G - A @ G @ A.T - Q)
    den = np.linalg.norm(G)
    return float(num / den) if den > 0 else float(num)


def solve_lyapunov_kron(A, Q):
    """Solve ``(I - A kron A) vec(G) = vec(Q)`` directly."""
    p = A.shape[0]
    M = np.eye(p * p) - np.kron(A, A)
    G = np.linalg.solve(M, Q.reshape(-1)).reshape(p, p)
    return la.symmetrize(G)


def solve_lyapunov(A, Q, rtol=LYAP_RTOL, max_iter=LYAP_MAX_ITER):
    """Return ``(G, residual)`` for ``G = A G A^T + Q``."""
    A = np.asarray(A, dtype=np.float64)
    Q = la.symmetrize(np.asarray(Q, dtype=np.float64))
    if A.shape != Q.shape or A.shape[0] != A.shape[1]:
        raise DimensionMismatch("A %s and Q %s must be square and equal" % (A.shape, Q.shape))
    G = Q.copy()
    Aj = A.copy()
    res = lyapunov_residual(A, Q, G)
    for _ in range(max_iter):
        if res <= rtol:
            return G, res
        G = la.symmetrize(G + Aj @ G @ Aj.T)
        Aj = Aj @ Aj
        if not np.all(np.isfinite(G)):
            break
        res = lyapunov_residual(A, Q, G)
    if res <= rtol:
        return G, res
    if A.shape[0] <= KRON_MAX_P:
        G = solve_lyapunov_kron(A, Q)
        res = lyapunov_residual(A, Q, G)
        if res <= 1e-10:
            return G, res
    raise NoConvergence("Lyapunov iteration did not converge (residual %.3e)" % res)


def solve_stationary_var1(model):
    G, _ = solve_lyapunov(model.A, model.sigma_xi)
    return G


def factor_covariance(model):
    """Stationary covariance of the factor process ``F``."""
    G, _ = solve_lyapunov(model.H, model.sigma_eta)
    return G


def varma_noise_term(model):
    """``Lambda S_eta Lambda^T + S_xi - L S_xi L^T``, the forcing of the
    ``X``-level equation ``G = L G L^T + noise``."""
    Lam, L, Sx = model.Lambda, model.L, model.sigma_xi
    return la.symmetrize(Lam @ model.sigma_eta @ Lam.T + Sx - L @ Sx @ L.T)


def varma_consistency_residual(model, gamma):
    L = model.L
    r = gamma - L @ gamma @ L.T - varma_noise_term(model)
    return float(np.linalg.norm(r) / np.linalg.norm(gamma))


def solve_stationary_varma11(model):
    """``Gamma_X = Lambda Gamma_F Lambda^T + Sigma_xi``, cross-checked against
    the observation-level recursion."""
    GF = factor_covariance(model)
    gamma = la.symmetrize(model.Lambda @ GF @ model.Lambda.T + model.sigma_xi)
    res = varma_consistency_residual(model, gamma)
    if res > VARMA_CONSISTENCY_RTOL:
        raise ConsistencyFailure("factor and observation routes disagree (rel %.3e)" % res)
    return gamma


def solve_stationary(model):
    if model.kind == "var1":
        return solve_stationary_var1(model)
    return solve_stationary_varma11(model)


def lag_cross_cov(model, gamma, n):
    """``Cov(X(t+n), X(t))`` for ``n >= 1``."""
    if int(n) != n or n < 1:
        raise DimensionMismatch("lag must be a positive integer, got %r" % (n,))
    gamma = np.asarray(gamma, dtype=np.float64)
    if gamma.shape != (model.p, model.p):
        raise DimensionMismatch("gamma must be %d x %d" % (model.p, model.p))
    if model.kind == "var1":
        T = model.A
        C = T @ gamma
    else:
        T = model.L
        C = T @ (gamma - model.sigma_xi)
    for _ in range(int(n) - 1):
        C = T @ C
    return C


@dataclass(frozen=True)
class StationaryCovariances:
    gamma: np.ndarray
    gamma1: np.ndarray
    sigma2p: np.ndarray
    sigma2p_tilde: np.ndarray
    residual: float = 0.0

    @property
    def p(self):
        return self.gamma.shape[0]


def assemble_joint(gamma, gamma1, residual=0.0):
    """Joint covariance of ``(X(t), X(t+1))`` and its block-diagonal twin."""
    gamma = la.require_pd(gamma, "gamma")
    gamma1 = la.as_matrix(gamma1, "gamma1")
    if gamma1.shape != gamma.shape:
        raise DimensionMismatch("gamma1 must match gamma")
    p = gamma.shape[0]
    sigma = la.block_joint(gamma, gamma1)
    try:
        la.require_pd(sigma, "Sigma_2p")
    except NotPositiveDefinite as exc:
        raise NotPositiveDefinite(
            "joint covariance is not positive definite; lag-1 dependence is "
            "degenerate or inputs are inconsistent (%s)" % exc) from None
    tilde = np.zeros((2 * p, 2 * p))
    tilde[:p, :p] = gamma
    tilde[p:, p:] = gamma
    return StationaryCovariances(gamma=la.frozen(gamma), gamma1=la.frozen(gamma1),
                                 sigma2p=la.frozen(sigma), sigma2p_tilde=la.frozen(tilde),
                                 residual=float(residual))


def stationary_covariances(model):
    if model.kind == "var1":
        gamma, res = solve_lyapunov(model.A, model.sigma_xi)
    else:
        gamma = solve_stationary_varma11(model)
        res = varma_consistency_residual(model, gamma)
    return assemble_joint(gamma, lag_cross_cov(model, gamma, 1), residual=res)
