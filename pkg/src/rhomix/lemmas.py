"""Numerical checks of the auxiliary matrix lemmas.

Each ``check_*`` function evaluates one instance and returns a
:class:`LemmaCheck`; :func:`run_suite` draws random instances and
aggregates them. Inputs outside a lemma's hypotheses raise
:class:`PreconditionFailed` and are not counted as lemma failures.
"""
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from . import _linalg as la
from ._rng import make_rng
from .errors import NotPositiveDefinite, PreconditionFailed

TOL_INVCOVDIFF = 1e-10
TOL_SCHUR = 1e-8
TOL_PRODUCT = 1e-8
TOL_SINGULAR = 1e-10


@dataclass
class LemmaCheck:
    name: str
    passed: bool
    worst_violation: float
    witness: dict | None = field(default=None, repr=False)


def _verdict(name, violation, tol, witness):
    passed = bool(violation <= tol)
    return LemmaCheck(name, passed, float(violation), None if passed else witness)


def invcovdiff_matrix(A, B):
    """``2 [[A, B], [B^T, A]]^{-1} - blockdiag(A, A)^{-1}``.

    This is the Gaussian contingency kernel; both blocks are inverted by
    Cholesky so a non-PD input raises :class:`NotPositiveDefinite`.
    """
    n = A.shape[0]
    joint = np.block([[A, B], [B.T, A]])
    try:
        cj = sla.cho_factor(joint, lower=True)
        ca = sla.cho_factor(A, lower=True)
    except np.linalg.LinAlgError:
        raise NotPositiveDefinite("joint block covariance is not positive definite") from None
    inv_joint = sla.cho_solve(cj, np.eye(2 * n))
    inv_a = sla.cho_solve(ca, np.eye(n))
    K = 2.0 * inv_joint
    K[:n, :n] -= inv_a
    K[n:, n:] -= inv_a
    return la.symmetrize(K)


def check_invcovdiff_pd(A, B, tol=TOL_INVCOVDIFF):
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    try:
        la.require_pd(A, "A")
        la.require_pd(np.block([[A, B], [B.T, A]]), "[[A, B], [B^T, A]]")
    except NotPositiveDefinite as exc:
        raise PreconditionFailed(str(exc)) from None
    w = np.linalg.eigvalsh(invcovdiff_matrix(A, B))
    violation = max(0.0, -w[0]) / max(abs(w[-1]), np.finfo(float).tiny)
    return _verdict("invcovdiff_pd", violation, tol, {"A": A, "B": B})


def check_schur_eig_map(D, tol=TOL_SCHUR):
    """Schur complement ``W`` of ``2 [[I, D], [D^T, I]]^{-1} - I`` has spectrum
    ``(1 - l) / (1 + l)`` over the eigenvalues ``l`` of ``D D^T``.

    Also checks the auxiliary identity
    ``(2 P^{-1} - I)^{-1} = P - P D^T S^{-1} D P`` with ``S = I - D D^T D D^T``.
    """
    D = la.as_matrix(D, "D")
    n = D.shape[0]
    I = np.eye(n)
    DDt = D @ D.T
    lam = np.linalg.eigvalsh(la.symmetrize(DDt))
    if lam[-1] >= 1.0 or lam[0] < -1e-12:
        raise PreconditionFailed("eigenvalues of D D^T must lie in [0, 1)")
    lam = np.clip(lam, 0.0, None)
    Omega = I - DDt
    P = I - D.T @ D
    P_inv = np.linalg.inv(P)
    core = np.linalg.inv(2.0 * P_inv - I)
    W = (2.0 * np.linalg.inv(Omega) - I) - 4.0 * D @ P_inv @ core @ P_inv @ D.T
    got = np.linalg.eigvalsh(la.symmetrize(W))
    want = np.sort((1.0 - lam) / (1.0 + lam))
    S = I - DDt @ DDt
    alt = P - P @ D.T @ np.linalg.solve(S, D @ P)
    violation = max(float(np.max(np.abs(got - want))),
                    float(np.max(np.abs(core - alt))))
    return _verdict("schur_eig_map", violation, tol, {"D": D})


def check_product_spectrum(A, B, tol=TOL_PRODUCT):
    """Eigenvalues of ``A B`` (A PD, B PSD) are real, non-negative, and equal
    to those of ``A^{1/2} B A^{1/2}``."""
    A = np.asarray(A, dtype=np.float64)
    B = la.symmetrize(np.asarray(B, dtype=np.float64))
    try:
        la.require_pd(A, "A")
    except NotPositiveDefinite as exc:
        raise PreconditionFailed(str(exc)) from None
    wb = np.linalg.eigvalsh(B)
    if wb[0] < -1e-12 * max(1.0, abs(wb[-1])):
        raise PreconditionFailed("B is not positive semidefinite")
    ev = np.linalg.eigvals(A @ B)
    Ah = la.sqrt_sym(A)
    ref = np.linalg.eigvalsh(la.symmetrize(Ah @ B @ Ah))
    scale = 1.0 + float(np.max(np.abs(ref)))
    got = np.sort(ev.real)
    violation = max(float(np.max(np.abs(ev.imag))),
                    max(0.0, -float(got[0])),
                    float(np.max(np.abs(got - ref)))) / scale
    return _verdict("product_spectrum", violation, tol, {"A": A, "B": B})


def check_singular_min_bound(L, tol=TOL_SINGULAR):
    """``sigma_min(I - L) >= 1 - ||L||`` for ``||L|| < 1``."""
    L = la.as_matrix(L, "L")
    norm = la.spectral_norm(L)
    if norm >= 1.0:
        raise PreconditionFailed("||L|| = %.6g >= 1" % norm)
    smin = float(np.linalg.svd(np.eye(L.shape[0]) - L, compute_uv=False)[-1])
    violation = max(0.0, (1.0 - norm) - smin)
    return _verdict("singular_min_bound", violation, tol, {"L": L})


# ---------------------------------------------------------------------------
# randomized suites

def _random_pd(rng, n):
    Q = la.haar_orthogonal(rng, n)
    w = np.exp(rng.uniform(np.log(0.1), np.log(10.0), n))
    return la.symmetrize((Q * w) @ Q.T)


def _scaled(rng, n, norm):
    M = rng.standard_normal((n, n))
    return M * (norm / la.spectral_norm(M))


def _draw_invcovdiff(rng, n):
    A = _random_pd(rng, n)
    D = _scaled(rng, n, rng.uniform(0.0, 0.95))
    Ah = la.sqrt_sym(A)
    return (A, Ah @ D @ Ah)


def _draw_schur(rng, n):
    return (_scaled(rng, n, 0.9),)


def _draw_product(rng, n):
    A = _random_pd(rng, n)
    r = int(rng.integers(0, n + 1))
    G = rng.standard_normal((n, r))
    return (A, G @ G.T)


def _draw_singular(rng, n):
    return (_scaled(rng, n, 0.8),)


SUITES = {
    "invcovdiff_pd": (check_invcovdiff_pd, _draw_invcovdiff, TOL_INVCOVDIFF),
    "schur_eig_map": (check_schur_eig_map, _draw_schur, TOL_SCHUR),
    "product_spectrum": (check_product_spectrum, _draw_product, TOL_PRODUCT),
    "singular_min_bound": (check_singular_min_bound, _draw_singular, TOL_SINGULAR),
}


@dataclass
class SuiteResult:
    name: str
    instances: int
    passed: int
    worst_violation: float
    witness: dict | None = field(default=None, repr=False)

    @property
    def ok(self):
        return self.passed == self.instances


def run_suite(name, instances=500, sizes=(1, 2, 5, 20), seed=0, tol=None):
    """Run ``instances`` random checks at every size in ``sizes``.

    ``tol`` overrides the lemma's tolerance (used to exercise the failure
    path).
    """
    check, draw, default_tol = SUITES[name]
    tol = default_tol if tol is None else tol
    total = npass = 0
    worst = 0.0
    witness = None
    for n in sizes:
        rng = make_rng(seed, sorted(SUITES).index(name), n)
        for _ in range(instances):
            res = check(*draw(rng, n), tol=tol)
            total += 1
            npass += res.passed
            if res.worst_violation >= worst:
                worst = res.worst_violation
            if not res.passed and witness is None:
                witness = res.witness
    return SuiteResult(name, total, npass, worst, witness)


def run_all(instances=500, sizes=(1, 2, 5, 20), seed=0, tol=None):
    return [run_suite(name, instances, sizes, seed, tol) for name in SUITES]
