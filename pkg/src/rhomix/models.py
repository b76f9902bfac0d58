"""Model types, validated constructors, random generators and certificates.

Two generating models are supported::

    VAR(1):       X(t) = A X(t-1) + xi(t)
    factor form:  X(t) = Lambda F(t) + xi(t),   F(t) = H F(t-1) + eta(t)

The factor model has the VARMA(1,1) representation
``X(t) = L X(t-1) + eps(t)`` with ``L = Lambda H Lambda^+``.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from . import _linalg as la
from ._rng import make_rng
from .errors import (DimensionMismatch, InfeasibleTargets, NotContractive,
                     NotPositiveDefinite, NotStable, OutOfRange,
                     RankDeficientLoading)

DEFAULT_RANK_TOL = 1e-10
MAX_GENERATOR_ATTEMPTS = 50


@dataclass(frozen=True)
class Var1Model:
    p: int
    A: np.ndarray
    sigma_xi: np.ndarray
    k: int

    kind = "var1"

    @property
    def transition(self):
        return self.A


@dataclass(frozen=True)
class Varma11Model:
    p: int
    k: int
    Lambda: np.ndarray
    H: np.ndarray
    sigma_eta: np.ndarray
    sigma_xi: np.ndarray
    L: np.ndarray = field(repr=False)

    kind = "varma11"

    @property
    def transition(self):
        return self.L


def make_var1(A, sigma_xi, rank_tol=DEFAULT_RANK_TOL):
    """Validate a VAR(1) model; ``k`` is set to the numerical rank of ``A``."""
    A = la.as_matrix(A, "A")
    sigma_xi = la.as_matrix(sigma_xi, "sigma_xi")
    if A.shape != sigma_xi.shape:
        raise DimensionMismatch("A is %s but sigma_xi is %s" % (A.shape, sigma_xi.shape))
    sigma_xi = la.require_pd(sigma_xi, "sigma_xi")
    if not np.all(np.isfinite(A)):
        raise DimensionMismatch("A has non-finite entries")
    rad = la.spectral_radius(A)
    if rad >= 1.0:
        raise NotStable("spectral radius of A is %.6g >= 1" % rad)
    return Var1Model(p=A.shape[0], A=la.frozen(A), sigma_xi=la.frozen(sigma_xi),
                     k=la.numerical_rank(A, rank_tol))


def left_inverse(Lambda):
    """Moore-Penrose left inverse ``(Lambda^T Lambda)^{-1} Lambda^T``."""
    return np.linalg.pinv(Lambda)


def make_varma11(Lambda, H, sigma_eta, sigma_xi, rank_tol=DEFAULT_RANK_TOL):
    Lambda = la.as_matrix(Lambda, "Lambda", square=False)
    H = la.as_matrix(H, "H")
    sigma_eta = la.as_matrix(sigma_eta, "sigma_eta")
    sigma_xi = la.as_matrix(sigma_xi, "sigma_xi")
    p, k = Lambda.shape
    if p < k or k < 1:
        raise DimensionMismatch("Lambda must be p x k with p >= k >= 1, got %s" % (Lambda.shape,))
    if H.shape != (k, k) or sigma_eta.shape != (k, k):
        raise DimensionMismatch("H and sigma_eta must be %d x %d" % (k, k))
    if sigma_xi.shape != (p, p):
        raise DimensionMismatch("sigma_xi must be %d x %d" % (p, p))
    if la.numerical_rank(Lambda, rank_tol) != k:
        raise RankDeficientLoading("Lambda does not have full column rank %d" % k)
    sigma_eta = la.require_pd(sigma_eta, "sigma_eta")
    sigma_xi = la.require_pd(sigma_xi, "sigma_xi")
    rad = la.spectral_radius(H)
    if rad >= 1.0:
        raise NotStable("spectral radius of H is %.6g >= 1" % rad)
    L = Lambda @ H @ left_inverse(Lambda)
    norm_L = la.spectral_norm(L)
    if norm_L >= 1.0:
        raise NotContractive("||L|| = %.6g >= 1" % norm_L)
    return Varma11Model(p=p, k=k, Lambda=la.frozen(Lambda), H=la.frozen(H),
                        sigma_eta=la.frozen(sigma_eta), sigma_xi=la.frozen(sigma_xi),
                        L=la.frozen(L))


# ---------------------------------------------------------------------------
# random generators

def _check_targets(p, k, mu_target, delta, zeta):
    if not (isinstance(p, (int, np.integer)) and p >= 1):
        raise OutOfRange("p must be a positive integer")
    if not (isinstance(k, (int, np.integer)) and 0 <= k):
        raise OutOfRange("k must be a non-negative integer")
    if k > p:
        raise DimensionMismatch("k = %d exceeds p = %d" % (k, p))
    if not 0.0 < mu_target < 1.0:
        raise OutOfRange("mu_target must lie in (0, 1)")
    if not 0.0 < delta < zeta:
        raise OutOfRange("need 0 < delta < zeta, got delta=%r zeta=%r" % (delta, zeta))


def _random_cov(rng, n, lo, hi):
    Q = la.haar_orthogonal(rng, n)
    d = rng.uniform(lo, hi, n)
    return la.symmetrize((Q * d) @ Q.T)


def _low_rank(rng, n, k):
    U = la.haar_orthogonal(rng, n)[:, :k]
    V = la.haar_orthogonal(rng, n)[:, :k]
    s = rng.uniform(0.5, 1.0, k)
    return (U * s) @ V.T


def _noise_scale(lam_max_gamma, lam_min_sigma, delta, zeta):
    """Downward scale ``c <= 1`` putting ``c*lam_max < zeta`` and ``c*lam_min > delta``.

    Returns None when no such ``c`` exists.
    """
    if lam_max_gamma < zeta:
        return 1.0
    hi = zeta / lam_max_gamma
    lo = delta / lam_min_sigma
    if lo >= hi:
        return None
    return math.sqrt(lo * hi)


def random_var1(p, k, mu_target, delta, zeta, seed, rank_tol=DEFAULT_RANK_TOL):
    """Random VAR(1) with rank-``k`` transition and ``||A|| = mu_target``.

    ``sigma_xi`` has eigenvalues in ``[1.01 delta, 4 delta]`` and is scaled
    down when needed so that ``lambda_max(Gamma) < zeta``.
    """
    from .stationary import solve_stationary_var1

    _check_targets(p, k, mu_target, delta, zeta)
    rng = make_rng(seed)
    for _ in range(MAX_GENERATOR_ATTEMPTS):
        if k == 0:
            A = np.zeros((p, p))
        else:
            A = _low_rank(rng, p, k)
            A *= mu_target / la.spectral_norm(A)
        sigma = _random_cov(rng, p, 1.01 * delta, 4.0 * delta)
        model = make_var1(A, sigma, rank_tol)
        gamma = solve_stationary_var1(model)
        c = _noise_scale(np.linalg.eigvalsh(gamma)[-1],
                         np.linalg.eigvalsh(model.sigma_xi)[0], delta, zeta)
        if c is None:
            continue
        if c != 1.0:
            model = make_var1(A, c * sigma, rank_tol)
            gamma = solve_stationary_var1(model)
        if model.k == k and certify_assumptions(model, delta, zeta, gamma).passed:
            return model
    raise InfeasibleTargets(
        "could not meet mu=%g, delta=%g, zeta=%g at p=%d, k=%d after %d attempts"
        % (mu_target, delta, zeta, p, k, MAX_GENERATOR_ATTEMPTS))


def random_varma11(p, k, mu_target, delta, zeta, seed, rank_tol=DEFAULT_RANK_TOL):
    """Random factor model with ``||L|| = mu_target``.

    Both noise covariances are drawn with eigenvalues in ``[1.01 delta,
    4 delta]`` and scaled down together when ``lambda_max(Gamma) >= zeta``.
    """
    from .stationary import solve_stationary_varma11

    _check_targets(p, k, mu_target, delta, zeta)
    if k < 1 or k >= p:
        raise DimensionMismatch("factor model needs 1 <= k < p, got k=%d, p=%d" % (k, p))
    rng = make_rng(seed)
    for _ in range(MAX_GENERATOR_ATTEMPTS):
        Lambda = rng.standard_normal((p, k)) / math.sqrt(p)
        H = _low_rank(rng, k, k)
        L = Lambda @ H @ left_inverse(Lambda)
        H *= mu_target / la.spectral_norm(L)
        sigma_eta = _random_cov(rng, k, 1.01 * delta, 4.0 * delta)
        sigma_xi = _random_cov(rng, p, 1.01 * delta, 4.0 * delta)
        model = make_varma11(Lambda, H, sigma_eta, sigma_xi, rank_tol)
        gamma = solve_stationary_varma11(model)
        c = _noise_scale(np.linalg.eigvalsh(gamma)[-1],
                         np.linalg.eigvalsh(model.sigma_xi)[0], delta, zeta)
        if c is None:
            continue
        if c != 1.0:
            model = make_varma11(Lambda, H, c * sigma_eta, c * sigma_xi, rank_tol)
            gamma = solve_stationary_varma11(model)
        if certify_assumptions(model, delta, zeta, gamma).passed:
            return model
    raise InfeasibleTargets(
        "could not meet mu=%g, delta=%g, zeta=%g at p=%d, k=%d after %d attempts"
        % (mu_target, delta, zeta, p, k, MAX_GENERATOR_ATTEMPTS))


# ---------------------------------------------------------------------------
# assumption certificate

@dataclass(frozen=True)
class AssumptionCertificate:
    kind: str
    k_declared: int
    k_measured: int
    transition_norm: float
    lambda_min_sigma_xi: float
    lambda_max_gamma: float
    delta: float
    zeta: float
    mu: float | None
    a1_pass: bool
    a2_pass: bool
    a3_pass: bool
    a1_margin: float
    a2_margin: float
    a3_margin: float

    @property
    def passed(self):
        return self.a1_pass and self.a2_pass and self.a3_pass

    def to_dict(self):
        d = dict(self.__dict__)
        d["passed"] = self.passed
        return d


def certify_assumptions(model, delta, zeta, gamma_X, mu=None, k=None,
                        rank_tol=DEFAULT_RANK_TOL):
    """Measure the rank, noise-floor and covariance-ceiling assumptions.

    Never raises on a failed assumption; failures are reported as flags.
    ``k`` defaults to the model's declared rank. For factor models the
    transition check is ``||L|| < 1``, tightened to ``||L|| <= mu`` when a
    contraction constant is given.
    """
    gamma_X = np.asarray(gamma_X, dtype=np.float64)
    k_declared = model.k if k is None else int(k)
    T = model.transition
    k_measured = la.numerical_rank(T, rank_tol)
    norm = la.spectral_norm(T)
    lam_min = float(np.linalg.eigvalsh(model.sigma_xi)[0])
    lam_max = float(np.linalg.eigvalsh(la.symmetrize(gamma_X))[-1])
    if model.kind == "var1":
        a1_margin = 1.0 - la.spectral_radius(T)
        a1 = k_measured == k_declared and a1_margin > 0
    else:
        ceiling = 1.0 if mu is None else float(mu)
        a1_margin = ceiling - norm
        contract = norm < 1.0
        if mu is not None:
            # generators hit ||L|| = mu exactly, up to rounding
            contract = contract and norm <= ceiling * (1 + 1e-12)
        a1 = k_measured == k_declared and contract
    return AssumptionCertificate(
        kind=model.kind, k_declared=k_declared, k_measured=k_measured,
        transition_norm=norm, lambda_min_sigma_xi=lam_min, lambda_max_gamma=lam_max,
        delta=float(delta), zeta=float(zeta), mu=None if mu is None else float(mu),
        a1_pass=bool(a1), a2_pass=bool(lam_min > delta), a3_pass=bool(lam_max < zeta),
        a1_margin=float(a1_margin), a2_margin=lam_min - delta, a3_margin=zeta - lam_max)


# ---------------------------------------------------------------------------
# triangular array dimension schedule

@dataclass(frozen=True)
class DimensionSchedule:
    """Growth rule ``T -> p_T``: ``linear(c)``, ``power(c, a)`` or ``fixed(p)``."""

    rule: str
    params: tuple
    T_max: int = 10**9

    def __post_init__(self):
        if self.rule not in ("linear", "power", "fixed"):
            raise OutOfRange("unknown schedule rule %r" % self.rule)
        nparams = {"linear": 1, "power": 2, "fixed": 1}[self.rule]
        if len(self.params) != nparams:
            raise OutOfRange("%s schedule takes %d parameter(s)" % (self.rule, nparams))
        if any(not (isinstance(v, (int, float)) and v > 0) for v in self.params):
            raise OutOfRange("schedule parameters must be positive")
        if self.rule == "fixed" and int(self.params[0]) != self.params[0]:
            raise OutOfRange("fixed schedule needs an integer dimension")
        if self.T_max < 1:
            raise OutOfRange("T_max must be positive")

    @classmethod
    def linear(cls, c, T_max=10**9):
        return cls("linear", (c,), T_max)

    @classmethod
    def power(cls, c, a, T_max=10**9):
        return cls("power", (c, a), T_max)

    @classmethod
    def fixed(cls, p, T_max=10**9):
        return cls("fixed", (p,), T_max)

    @classmethod
    def parse(cls, text, T_max=10**9):
        """Parse ``"linear:2"``, ``"power:1,0.5"`` or ``"fixed:8"``."""
        try:
            rule, _, rest = text.partition(":")
            params = tuple(float(v) for v in rest.split(",")) if rest else ()
        except ValueError:
            raise OutOfRange("cannot parse schedule %r" % text) from None
        params = tuple(int(v) if v == int(v) else v for v in params)
        return cls(rule.strip(), params, T_max)

    def __str__(self):
        return "%s:%s" % (self.rule, ",".join(repr(v) for v in self.params))


def dimension_schedule(schedule, T):
    if not (isinstance(T, (int, np.integer)) and 1 <= T <= schedule.T_max):
        raise OutOfRange("T = %r outside [1, %d]" % (T, schedule.T_max))
    if schedule.rule == "fixed":
        return int(schedule.params[0])
    if schedule.rule == "linear":
        x = schedule.params[0] * T
    else:
        c, a = schedule.params
        x = c * float(T) ** a
    # guard against 4.000000000000001-style round-up
    return max(1, int(math.ceil(x - 1e-9)))
