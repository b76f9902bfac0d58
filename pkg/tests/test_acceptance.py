"""Acceptance criteria, each at its stated tolerance.

Every test appends one ``PASS``/``FAIL`` line to the terminal summary (also
printed when run directly with ``python tests/test_acceptance.py``).
"""
import functools
import os
import subprocess
import sys
import time

import numpy as np
import pytest

from rhomix import lemmas
from rhomix.mixing import canonical_correlations, decay_fit, envelope, rho_sequence, \
    submultiplicativity_check
from rhomix.models import DimensionSchedule, certify_assumptions, make_var1, random_var1, \
    random_varma11
from rhomix.montecarlo import (SweepTargets, empirical_covariances,
                               empirical_phi2_contingency, empirical_rho1_plugin, lag_pairs,
                               marginal_invariance_check, simulate, triangular_array_run)
from rhomix.phi2 import bound_holds, phi2_bound, phi2_closed, phi2_from_canonical_corrs, \
    phi2_general
from rhomix.stationary import (factor_covariance, lyapunov_residual, solve_lyapunov,
                               solve_lyapunov_kron, stationary_covariances)

from conftest import ACCEPTANCE_LINES

DELTA, ZETA, MU_VARMA = 0.1, 10.0, 0.5
P_GRID = (2, 5, 10, 30, 50)


def report(num, ok, detail):
    line = "criterion %s: %s  %s" % (num, "PASS" if ok else "FAIL", detail)
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


@functools.lru_cache(maxsize=None)
def model_bank():
    """100 VAR(1) and 100 factor VARMA(1,1) certified models, seeded."""
    var = []
    combos = [(p, k) for p in P_GRID for k in range(4) if k <= p]
    for i in range(100):
        p, k = combos[i % len(combos)]
        mu = (0.3, 0.6, 0.9)[i % 3]
        var.append(random_var1(p, k, mu, DELTA, ZETA, seed=(2024, i)))
    varma = []
    combos = [(p, k) for p in P_GRID for k in (1, 2, 3) if k < p]
    for i in range(100):
        p, k = combos[i % len(combos)]
        varma.append(random_varma11(p, k, MU_VARMA, DELTA, ZETA, seed=(2025, i)))
    return var, varma


def all_models():
    var, varma = model_bank()
    return var + varma


def test_criterion_1_route_equivalence():
    t0 = time.perf_counter()
    worst_gen = worst_can = 0.0
    for m in all_models():
        cov = stationary_covariances(m)
        closed = phi2_closed(m, cov.gamma)
        scale = 1.0 + closed
        worst_gen = max(worst_gen, abs(phi2_general(cov) - closed) / scale)
        r = canonical_correlations(cov.gamma, cov.gamma1)
        worst_can = max(worst_can, abs(phi2_from_canonical_corrs(r) - closed) / scale)
    elapsed = time.perf_counter() - t0
    ok = worst_gen <= 1e-8 and worst_can <= 1e-8 and elapsed < 60
    report(1, ok, "200 models, worst general gap %.2e, canonical gap %.2e, %.1fs"
           % (worst_gen, worst_can, elapsed))
    assert ok


def test_criterion_2_bound_soundness():
    violations, worst_ratio, n = 0, 0.0, 0
    for m in all_models():
        cov = stationary_covariances(m)
        mu = None if m.kind == "var1" else MU_VARMA
        cert = certify_assumptions(m, DELTA, ZETA, cov.gamma, mu=mu)
        assert cert.passed, cert.to_dict()
        closed = phi2_closed(m, cov.gamma)
        bound = phi2_bound(m, DELTA, ZETA, mu)
        n += 1
        if not bound_holds(closed, bound, m.k):
            violations += 1
        if bound > 0:
            worst_ratio = max(worst_ratio, closed / bound)
    ok = violations == 0
    report(2, ok, "%d models, %d violations, max phi2/bound %.3e" % (n, violations, worst_ratio))
    assert ok


def test_criterion_3_scalar_ground_truth():
    worst = 0.0
    for a in (0.1, 0.5, 0.9):
        m = make_var1([[a]], [[1.0]])
        cov = stationary_covariances(m)
        want = a * a / (1 - a * a)
        for got in (phi2_closed(m, cov.gamma), phi2_general(cov)):
            worst = max(worst, abs(got - want) / want)
        rho = rho_sequence(m, cov.gamma, 20)
        worst = max(worst, float(np.max(np.abs(rho - a ** np.arange(1, 21)) / a ** np.arange(1, 21))))
    ok = worst <= 1e-12
    report(3, ok, "a in {0.1, 0.5, 0.9}, worst relative error %.2e" % worst)
    assert ok


def test_criterion_4_lyapunov_accuracy():
    worst_res = worst_kron = 0.0
    solves = compared = 0
    for m in all_models():
        A, Q = (m.A, m.sigma_xi) if m.kind == "var1" else (m.H, m.sigma_eta)
        G, res = solve_lyapunov(A, Q)
        worst_res = max(worst_res, lyapunov_residual(A, Q, G))
        solves += 1
        if m.kind == "var1" and m.p <= 30:
            K = solve_lyapunov_kron(A, Q)
            worst_kron = max(worst_kron, np.linalg.norm(G - K) / np.linalg.norm(K))
            compared += 1
        if m.kind == "varma11":
            assert np.array_equal(G, factor_covariance(m))
    ok = worst_res <= 1e-10 and worst_kron <= 1e-9
    report(4, ok, "%d solves, worst residual %.2e; %d Kronecker comparisons, worst %.2e"
           % (solves, worst_res, compared, worst_kron))
    assert ok


@pytest.mark.parametrize("kind", ["var1", "varma11"])
def test_criterion_5_geometric_decay(kind):
    var, varma = model_bank()
    models = var if kind == "var1" else varma
    env_fail = sub_fail = 0
    worst_sub = -np.inf
    for m in models:
        rho = rho_sequence(m, stationary_covariances(m).gamma, 20)
        if np.any(rho > 0):
            A, g = decay_fit(rho)
            if np.any(rho > envelope(A, g, 20)):
                env_fail += 1
        bad = False
        for N in (1, 2):
            chk = submultiplicativity_check(rho, N, slack=1e-10)
            worst_sub = max(worst_sub, chk.worst)
            bad |= not chk.passed
        sub_fail += bad
    ok = env_fail == 0 and sub_fail == 0
    report("5[%s]" % kind, ok, "%d models, envelope failures %d, submultiplicativity failures "
           "%d, worst rho(mN) - rho(N)^m = %.3e" % (len(models), env_fail, sub_fail, worst_sub))
    assert ok


def test_criterion_6_lemma_suites():
    t0 = time.perf_counter()
    results = lemmas.run_all(instances=500, sizes=(1, 2, 5, 20), seed=0)
    elapsed = time.perf_counter() - t0
    ok = all(r.ok and r.instances == 2000 for r in results) and elapsed < 30
    detail = ", ".join("%s %d/%d" % (r.name, r.passed, r.instances) for r in results)
    report(6, ok, "%s, %.1fs" % (detail, elapsed))
    assert ok


def test_criterion_7_monte_carlo():
    t0 = time.perf_counter()
    m = make_var1([[0.5]], [[1.0]])
    cov = stationary_covariances(m)
    run = simulate(m, cov.gamma, 10**6, seed=0)
    rho_hat = empirical_rho1_plugin(empirical_covariances(run))
    x, y = lag_pairs(run.path)
    phi_hat = empirical_phi2_contingency(x, y, 20)
    invariant = marginal_invariance_check(x, y, np.exp, 20)
    elapsed = time.perf_counter() - t0
    ok = (abs(rho_hat - 0.5) <= 0.01 and abs(phi_hat - 1 / 3) <= 0.15 / 3 and invariant
          and elapsed < 60)
    report(7, ok, "rho_hat %.5f, phi2_hat %.5f (target 1/3), invariance %s, %.1fs"
           % (rho_hat, phi_hat, "bit-exact" if invariant else "BROKEN", elapsed))
    assert ok


def test_criterion_8_triangular_sweep():
    detail, ok = [], True
    for kind in ("var1", "varma11"):
        targets = SweepTargets(k=2, delta=DELTA, zeta=ZETA, mu=0.5, kind=kind)
        rows = triangular_array_run(DimensionSchedule.linear(2), [5, 10, 20, 40], targets, [0],
                                    empirical=False)
        good = all(r["p"] == 2 * r["T"] and bound_holds(r["phi2_closed"], r["phi2_bound"], r["k"])
                   for r in rows)
        ok &= good and len(rows) == 4
        detail.append("%s max phi2 %.4f vs bound %.4g" % (
            kind, max(r["phi2_closed"] for r in rows), min(r["phi2_bound"] for r in rows)))
    report(8, ok, "p_T = 2T, T in {5, 10, 20, 40}: " + "; ".join(detail))
    assert ok


def _cli(args, cwd):
    return subprocess.run([sys.executable, "-m", "rhomix"] + args, cwd=cwd,
                          capture_output=True, text=True)


def test_criterion_9_determinism(tmp_path):
    config = ('seed = 11\n[gen]\np = 6\nk = 2\n[sweep]\nT = [5, 10, 20]\nbins = 3\n'
              '[simulate]\nT = 200\n')
    snapshots = []
    for i in range(2):
        d = tmp_path / ("run%d" % i)
        d.mkdir()
        (d / "run.toml").write_text(config)
        steps = [["gen", "--config", "run.toml", "--out", "m.json"],
                 ["diagnose", "--config", "run.toml", "--model", "m.json", "--out", "report.txt",
                  "--csv", "rho.csv", "--json", "report.json"],
                 ["sweep", "--config", "run.toml", "--out", "sweep.csv"],
                 ["simulate", "--config", "run.toml", "--model", "m.json", "--out", "path.csv"],
                 ["lemmas-selftest", "--config", "run.toml", "--instances", "20",
                  "--out", "lemmas.txt"]]
        for s in steps:
            res = _cli(s, d)
            assert res.returncode == 0, (s, res.stderr)
        snapshots.append({f: (d / f).read_bytes() for f in sorted(os.listdir(d))})
    same = snapshots[0] == snapshots[1]
    report(9, same, "%d files compared across two fresh processes, %s"
           % (len(snapshots[0]), "byte-identical" if same else "DIFFER"))
    assert same


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
