"""Simulation, empirical estimators and triangular-array sweeps."""
import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _linalg as la
from . import kernels
from ._rng import make_rng
from .errors import DegenerateBins, DegenerateInput, InsufficientData, NotPositiveDefinite, OutOfRange
from .mixing import canonical_correlations, decay_fit, rho_sequence
from .models import dimension_schedule, random_var1, random_varma11
from .phi2 import phi2_bound, phi2_closed, phi2_general
from .stationary import factor_covariance, stationary_covariances

DEFAULT_BURN_IN = 1000
RIDGE = 1e-8


# ---------------------------------------------------------------------------
# simulation

@dataclass(frozen=True)
class InitMode:
    kind: str = "exact_stationary"
    burn_in: int = 0

    @classmethod
    def parse(cls, text):
        """``"exact"`` / ``"exact_stationary"`` or ``"burn_in[:m]"``."""
        if isinstance(text, InitMode):
            return text
        name, _, arg = str(text).partition(":")
        if name in ("exact", "exact_stationary"):
            return cls()
        if name == "burn_in":
            m = int(arg) if arg else DEFAULT_BURN_IN
            if m < 0:
                raise OutOfRange("burn-in length must be non-negative")
            return cls("burn_in", m)
        raise OutOfRange("unknown init mode %r" % text)

    def __str__(self):
        return self.kind if self.kind == "exact_stationary" else "burn_in:%d" % self.burn_in


@dataclass(frozen=True)
class SimulationRun:
    seed: int
    T: int
    p: int
    path: np.ndarray
    init_mode: InitMode


def _recursion(rng, A, chol_noise, chol_init, T, init):
    """Simulate ``Z(t) = A Z(t-1) + noise`` for ``T`` steps."""
    d = A.shape[0]
    if init.kind == "exact_stationary":
        z0 = chol_init @ rng.standard_normal(d)
        if T == 1:
            return z0[None, :]
        E = rng.standard_normal((T - 1, d)) @ chol_noise.T
        return np.vstack([z0[None, :], kernels.var_filter(A, z0, E)])
    E = rng.standard_normal((init.burn_in + T, d)) @ chol_noise.T
    return kernels.var_filter(A, np.zeros(d), E)[init.burn_in:]


def simulate(model, gamma, T, seed, init_mode="exact_stationary", replicate=0):
    """Draw a length-``T`` path from the stationary model.

    Exact initialization draws the first state from ``N(0, Gamma)``; factor
    models are simulated through the factor process and ``X = Lambda F + xi``.
    """
    init = InitMode.parse(init_mode)
    if int(T) != T or T < 1:
        raise OutOfRange("T must be a positive integer")
    T = int(T)
    rng = make_rng(seed, replicate)
    if model.kind == "var1":
        path = _recursion(rng, np.asarray(model.A), la.sqrt_sym(model.sigma_xi),
                          la.sqrt_sym(gamma), T, init)
    else:
        GF = factor_covariance(model)
        F = _recursion(rng, np.asarray(model.H), la.sqrt_sym(model.sigma_eta),
                       la.sqrt_sym(GF), T, init)
        xi = rng.standard_normal((T, model.p)) @ la.sqrt_sym(model.sigma_xi).T
        path = F @ np.asarray(model.Lambda).T + xi
    path.setflags(write=False)
    return SimulationRun(seed=seed, T=T, p=model.p, path=path, init_mode=init)


# ---------------------------------------------------------------------------
# estimators

@dataclass(frozen=True)
class EmpiricalEstimates:
    gamma_hat: np.ndarray
    gamma1_hat: np.ndarray
    T: int
    rho1_hat: float | None = None
    rho1_se: float | None = None
    phi2_hat: float | None = None


def empirical_covariances(run):
    """Centered moment estimates of ``Gamma`` and ``Cov(X(t+1), X(t))``, both
    normalized by ``T``."""
    X = np.asarray(run.path if isinstance(run, SimulationRun) else run, dtype=np.float64)
    T, p = X.shape
    if T < p + 2:
        raise InsufficientData("need T >= p + 2 = %d observations, got %d" % (p + 2, T))
    Xc = X - X.mean(axis=0)
    gamma_hat = la.symmetrize(Xc.T @ Xc / T)
    gamma1_hat = Xc[1:].T @ Xc[:-1] / T
    return EmpiricalEstimates(gamma_hat=gamma_hat, gamma1_hat=gamma1_hat, T=T)


def empirical_rho1_plugin(estimates):
    """Top sample canonical correlation at lag 1, after a ``1e-8 tr/p`` ridge."""
    G = estimates.gamma_hat
    p = G.shape[0]
    G = G + RIDGE * np.trace(G) / p * np.eye(p)
    if np.linalg.eigvalsh(G)[0] <= 0.0:
        raise NotPositiveDefinite("sample covariance is singular after ridge")
    r = canonical_correlations(G, estimates.gamma1_hat)
    return float(r[0])


def rho1_standard_error(rho1, T):
    return math.sqrt(max(0.0, 1.0 - rho1 * rho1) / T)


def quantile_codes(x, bins):
    """Equal-count bin index of every sample, from its rank."""
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[0]
    order = np.argsort(x, kind="stable")
    xs = x[order]
    ranks = np.empty(n, dtype=np.int64)
    ranks[order] = np.arange(n)
    codes = ranks * bins // n
    # an edge falling inside a run of ties would split equal values
    edges = np.nonzero(np.diff(np.arange(n) * bins // n))[0] + 1
    if np.any(xs[edges] == xs[edges - 1]):
        raise DegenerateBins("tied values straddle a quantile bin edge")
    return codes


def empirical_phi2_contingency(x, y, bins):
    """Quantile-binned estimate ``chi^2 / n`` of phi-squared between two series."""
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.shape != y.shape:
        raise OutOfRange("x and y must have the same length")
    if int(bins) != bins or bins < 2:
        raise OutOfRange("bins must be an integer >= 2")
    bins = int(bins)
    if x.shape[0] < 10 * bins * bins:
        raise InsufficientData("need at least 10 * bins^2 = %d pairs" % (10 * bins * bins))
    return kernels.contingency_phi2(quantile_codes(x, bins), quantile_codes(y, bins), bins)


def marginal_invariance_check(x, y, transform, bins):
    """True when ``transform`` leaves the binned phi-squared bit-identical."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    base = empirical_phi2_contingency(x, y, bins)
    try:
        moved = empirical_phi2_contingency(transform(x), transform(y), bins)
    except DegenerateBins:
        return False
    return base == moved


def lag_pairs(path, column=0, lag=1):
    col = np.asarray(path)[:, column]
    return col[:-lag], col[lag:]


# ---------------------------------------------------------------------------
# triangular array sweep

@dataclass(frozen=True)
class SweepTargets:
    k: int
    delta: float
    zeta: float
    mu: float
    kind: str = "var1"


def sweep_columns(n_max):
    return (["T", "p", "k", "seed", "phi2_closed", "phi2_general", "phi2_bound"]
            + ["rho%d" % i for i in range(1, n_max + 1)]
            + ["fit_A", "fit_gamma", "rho1_hat", "phi2_hat"])


def _sweep_row(args):
    T, p, seed, targets, n_max, empirical, bins = args
    gen = random_var1 if targets.kind == "var1" else random_varma11
    model = gen(p, targets.k, targets.mu, targets.delta, targets.zeta, seed=(seed, T))
    cov = stationary_covariances(model)
    rho = rho_sequence(model, cov.gamma, n_max)
    try:
        fit_A, fit_gamma = decay_fit(rho)
    except DegenerateInput:
        fit_A = fit_gamma = None
    row = {"T": T, "p": p, "k": targets.k, "seed": seed,
           "phi2_closed": phi2_closed(model, cov.gamma),
           "phi2_general": phi2_general(cov),
           "phi2_bound": phi2_bound(model, targets.delta, targets.zeta,
                                    None if targets.kind == "var1" else targets.mu),
           "fit_A": fit_A, "fit_gamma": fit_gamma, "rho1_hat": None, "phi2_hat": None}
    for i, r in enumerate(rho, start=1):
        row["rho%d" % i] = float(r)
    if empirical:
        run = simulate(model, cov.gamma, T, seed=seed, replicate=T)
        if T >= p + 2:
            row["rho1_hat"] = empirical_rho1_plugin(empirical_covariances(run))
        x, y = lag_pairs(run.path)
        if x.shape[0] >= 10 * bins * bins:
            row["phi2_hat"] = empirical_phi2_contingency(x, y, bins)
    return row


def triangular_array_run(schedule, Ts, targets, seeds, n_max=20, empirical=True,
                         bins=10, jobs=1):
    """One row per ``(T, seed)``: a fresh certified model at dimension ``p_T``,
    its analytic diagnostics and, optionally, plug-in estimates from a
    length-``T`` fragment. Rows are sorted by ``T`` then ``seed``."""
    Ts = sorted(set(int(T) for T in Ts))
    seeds = sorted(set(int(s) for s in seeds))
    if not Ts or not seeds:
        raise OutOfRange("sweep needs at least one T and one seed")
    tasks = [(T, dimension_schedule(schedule, T), s, targets, n_max, empirical, bins)
             for T in Ts for s in seeds]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            rows = list(ex.map(_sweep_row, tasks))
    else:
        rows = [_sweep_row(t) for t in tasks]
    return sorted(rows, key=lambda r: (r["T"], r["seed"]))


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return format(float(v), ".17g")


def sweep_csv(rows, n_max):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    cols = sweep_columns(n_max)
    w.writerow(cols)
    for row in rows:
        w.writerow([_fmt(row.get(c)) for c in cols])
    return buf.getvalue()
