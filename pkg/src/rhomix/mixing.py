"""Exact rho-mixing coefficients of stationary Gaussian chains.

For jointly Gaussian vectors the maximal correlation over all square
integrable functions is attained by linear functions, so ``rho(n)`` is the
top canonical correlation between ``X(t)`` and ``X(t+n)``.
"""
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _linalg as la
from .errors import DegenerateInput, NotMonotone, NotPositiveDefinite, OutOfRange, PremiseViolated
from .stationary import lag_cross_cov

DEFAULT_N_MAX = 20
SLACK = 1e-10
CORR_EXCESS = 1e-10


def canonical_correlations(gamma, cross):
    """Singular values of ``Gamma^{-1/2} cross Gamma^{-1/2}``, descending."""
    gamma = np.asarray(gamma, dtype=np.float64)
    cross = np.asarray(cross, dtype=np.float64)
    w = np.linalg.eigvalsh(la.symmetrize(gamma))
    if w[0] <= 0.0:
        raise NotPositiveDefinite("gamma is not positive definite")
    W = la.inv_sqrt_sym(gamma)
    r = np.linalg.svd(W @ cross @ W, compute_uv=False)
    if r.size and r[0] > 1.0 + CORR_EXCESS:
        raise OutOfRange("canonical correlation %.12g > 1: inconsistent covariances" % r[0])
    return np.clip(r, 0.0, 1.0)


def rho_n(model, gamma, n):
    r = canonical_correlations(gamma, lag_cross_cov(model, gamma, n))
    return float(r[0]) if r.size else 0.0


def rho_sequence(model, gamma, n_max=DEFAULT_N_MAX):
    """``rho(1), ..., rho(n_max)`` as an array indexed from lag 1."""
    W = la.inv_sqrt_sym(gamma)
    T = model.transition
    C = lag_cross_cov(model, gamma, 1)
    out = np.empty(n_max)
    for i in range(n_max):
        if i:
            C = T @ C
        r = np.linalg.svd(W @ C @ W, compute_uv=False)
        out[i] = min(max(r[0], 0.0), 1.0)
    return out


class SlackCheck(NamedTuple):
    passed: bool
    worst: float


def submultiplicativity_check(rho, N, slack=SLACK):
    """Check ``rho(m N) <= rho(N)^m + slack`` for every ``m N <= len(rho)``.

    ``rho[0]`` is lag 1. ``worst`` is the largest ``rho(mN) - rho(N)^m``.
    """
    rho = np.asarray(rho, dtype=np.float64)
    if N < 1:
        raise OutOfRange("N must be a positive integer")
    base = rho[N - 1]
    worst = -math.inf
    for m in range(2, len(rho) // N + 1):
        worst = max(worst, rho[m * N - 1] - base ** m)
    if worst == -math.inf:
        worst = 0.0
    return SlackCheck(bool(worst <= slack), float(worst))


def product_contraction_check(rho, slack=SLACK):
    """``rho(n + m) <= rho(n) rho(m) + slack`` over all computed lags."""
    rho = np.asarray(rho, dtype=np.float64)
    worst = 0.0
    n_max = len(rho)
    for n in range(1, n_max):
        for m in range(1, n_max - n + 1):
            worst = max(worst, rho[n + m - 1] - rho[n - 1] * rho[m - 1])
    return SlackCheck(bool(worst <= slack), float(worst))


def decay_fit(rho):
    """Envelope ``rho(n) <= A exp(-gamma n)`` fitted to the positive lags.

    ``gamma`` is minus the least-squares slope of ``log rho(n)`` on ``n``;
    ``A`` is the smallest constant that makes the envelope dominate every
    computed lag.
    """
    rho = np.asarray(rho, dtype=np.float64)
    n = np.arange(1, len(rho) + 1, dtype=np.float64)
    pos = rho > 0.0
    if pos.sum() < 2:
        raise DegenerateInput("need at least two positive rho values to fit a decay rate")
    slope, _ = np.polyfit(n[pos], np.log(rho[pos]), 1)
    gamma = -float(slope)
    if not gamma > 0.0:
        raise DegenerateInput("rho does not decay (fitted slope %.3g >= 0)" % slope)
    A = float(np.max(rho[pos] * np.exp(gamma * n[pos])))
    # rounding in A * exp(-gamma n) can undercut the maximizing lag by an ulp
    while np.any(rho > envelope(A, gamma, len(rho))):
        A = float(np.nextafter(A, np.inf))
    return A, gamma


def envelope(A, gamma, n_max):
    return A * np.exp(-gamma * np.arange(1, n_max + 1))


def expodecay_lift(a, M, c, C):
    """Lift ``a_{nM} <= C c^n`` on a non-increasing sequence to all ``n``.

    Returns ``(A, gamma) = (C / c, -log(c) / M)``. ``a[0]`` is ``a_1``; the
    premise includes ``a_n <= C`` for ``n < M``.
    """
    a = np.asarray(a, dtype=np.float64)
    if not (0.0 < c < 1.0 and C > 0 and int(M) == M and M >= 1):
        raise OutOfRange("need integer M >= 1, 0 < c < 1, C > 0")
    if np.any(np.diff(a) > 0.0):
        raise NotMonotone("sequence is not non-increasing")
    n = np.arange(1, len(a) + 1)
    premise = C * c ** (n // M).astype(np.float64)
    on_grid = (n % M == 0) | (n < M)
    bad = on_grid & (a > premise)
    if np.any(bad):
        first = int(n[bad][0])
        raise PremiseViolated("a_%d = %.6g exceeds C c^%d" % (first, a[first - 1], first // M))
    A = C / c
    gamma = -math.log(c) / M
    if np.any(a > A * np.exp(-gamma * n) * (1 + 1e-12)):
        raise PremiseViolated("envelope check failed")
    return A, gamma


@dataclass(frozen=True)
class MixingReport:
    rho: np.ndarray
    fitted_A: float | None
    fitted_gamma: float | None
    kappa: float
    N: int
    non_increasing: bool
    envelope_holds: bool

    @property
    def n_max(self):
        return len(self.rho)


def mixing_report(model, gamma, n_max=DEFAULT_N_MAX):
    rho = rho_sequence(model, gamma, n_max)
    try:
        A, g = decay_fit(rho)
    except DegenerateInput:
        A = g = None
    if A is None:
        env_ok = bool(np.all(rho == 0.0))
    else:
        env_ok = bool(np.all(rho <= envelope(A, g, n_max) * (1 + 1e-12)))
    below = np.nonzero(rho < 1.0)[0]
    N = int(below[0]) + 1 if below.size else n_max
    return MixingReport(rho=la.frozen(rho), fitted_A=A, fitted_gamma=g,
                        kappa=float(rho[N - 1]), N=N,
                        non_increasing=bool(np.all(np.diff(rho) <= SLACK)),
                        envelope_holds=env_ok)
