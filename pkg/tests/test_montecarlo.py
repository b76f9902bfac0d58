import numpy as np
import pytest
from hypothesis import given, strategies as st

from rhomix.errors import DegenerateBins, InsufficientData, OutOfRange
from rhomix.models import DimensionSchedule, make_var1, random_var1, random_varma11
from rhomix.montecarlo import (InitMode, SweepTargets, empirical_covariances,
                               empirical_phi2_contingency, empirical_rho1_plugin, lag_pairs,
                               marginal_invariance_check, quantile_codes,
                               rho1_standard_error, simulate, sweep_columns, sweep_csv,
                               triangular_array_run)
from rhomix.stationary import solve_stationary, stationary_covariances


def test_init_mode_parse():
    assert InitMode.parse("exact").kind == "exact_stationary"
    assert InitMode.parse("burn_in").burn_in == 1000
    assert InitMode.parse("burn_in:7").burn_in == 7
    assert str(InitMode.parse("burn_in:7")) == "burn_in:7"
    with pytest.raises(OutOfRange):
        InitMode.parse("warm")


def test_simulation_is_deterministic_and_readonly():
    m = random_var1(3, 2, 0.5, 0.1, 10.0, seed=0)
    g = solve_stationary(m)
    a = simulate(m, g, 200, seed=9)
    b = simulate(m, g, 200, seed=9)
    c = simulate(m, g, 200, seed=10)
    assert np.array_equal(a.path, b.path) and not np.array_equal(a.path, c.path)
    assert a.path.shape == (200, 3) and not a.path.flags.writeable


def test_simulated_moments_match_stationary():
    m = random_var1(3, 2, 0.6, 0.1, 10.0, seed=1)
    g = solve_stationary(m)
    est = empirical_covariances(simulate(m, g, 200_000, seed=2))
    np.testing.assert_allclose(est.gamma_hat, g, atol=0.03 * np.abs(g).max())
    np.testing.assert_allclose(est.gamma1_hat, m.A @ g, atol=0.03 * np.abs(g).max())


def test_burn_in_close_to_exact():
    m = make_var1([[0.5]], [[1.0]])
    g = solve_stationary(m)
    run = simulate(m, g, 100_000, seed=3, init_mode="burn_in:500")
    assert empirical_covariances(run).gamma_hat[0, 0] == pytest.approx(4 / 3, rel=0.03)


def test_factor_simulation_moments():
    m = random_varma11(4, 1, 0.5, 0.1, 10.0, seed=4)
    cov = stationary_covariances(m)
    est = empirical_covariances(simulate(m, cov.gamma, 200_000, seed=5))
    scale = np.abs(cov.gamma).max()
    np.testing.assert_allclose(est.gamma_hat, cov.gamma, atol=0.03 * scale)
    np.testing.assert_allclose(est.gamma1_hat, cov.gamma1, atol=0.03 * scale)


def test_insufficient_data():
    m = random_var1(5, 1, 0.5, 0.1, 10.0, seed=0)
    run = simulate(m, solve_stationary(m), 6, seed=0)
    with pytest.raises(InsufficientData):
        empirical_covariances(run)


def test_rho1_plugin_scalar():
    m = make_var1([[0.5]], [[1.0]])
    run = simulate(m, solve_stationary(m), 100_000, seed=1)
    r = empirical_rho1_plugin(empirical_covariances(run))
    assert abs(r - 0.5) < 5 * rho1_standard_error(0.5, 100_000)


@given(n=st.integers(40, 500), bins=st.integers(2, 6), seed=st.integers(0, 1000))
def test_quantile_codes_balanced(n, bins, seed):
    x = np.random.default_rng(seed).standard_normal(n)
    codes = quantile_codes(x, bins)
    counts = np.bincount(codes, minlength=bins)
    assert counts.max() - counts.min() <= 1
    # codes are monotone in x
    order = np.argsort(x)
    assert np.all(np.diff(codes[order]) >= 0)


def test_quantile_codes_reject_ties_on_edges():
    with pytest.raises(DegenerateBins):
        quantile_codes(np.array([0.0, 0.0, 1.0, 1.0, 1.0, 2.0]), 2)


def test_contingency_independent_is_small(rng):
    x, y = rng.standard_normal((2, 50_000))
    phi = empirical_phi2_contingency(x, y, 10)
    # chi2 / n has mean about (bins - 1)^2 / n under independence
    assert phi < 10 * 81 / 50_000


def test_contingency_requires_data():
    with pytest.raises(InsufficientData):
        empirical_phi2_contingency(np.arange(50.0), np.arange(50.0), 5)


@given(seed=st.integers(0, 1000))
def test_marginal_invariance(seed):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(2000)
    y = 0.5 * x + rng.standard_normal(2000)
    assert marginal_invariance_check(x, y, lambda v: np.exp(v), 5)
    assert marginal_invariance_check(x, y, lambda v: v ** 3 + 2 * v, 5)


def test_lag_pairs():
    path = np.arange(10.0).reshape(5, 2)
    x, y = lag_pairs(path, column=1)
    np.testing.assert_array_equal(x, [1, 3, 5, 7])
    np.testing.assert_array_equal(y, [3, 5, 7, 9])


def test_sweep_rows_and_csv():
    targets = SweepTargets(k=2, delta=0.1, zeta=10.0, mu=0.5)
    rows = triangular_array_run(DimensionSchedule.linear(2), [10, 5], targets, [1, 0],
                                n_max=5, bins=3)
    assert [(r["T"], r["seed"]) for r in rows] == [(5, 0), (5, 1), (10, 0), (10, 1)]
    assert all(r["p"] == 2 * r["T"] for r in rows)
    assert all(r["rho1_hat"] is None for r in rows)  # T < p + 2
    text = sweep_csv(rows, 5)
    lines = text.splitlines()
    assert lines[0].split(",") == sweep_columns(5)
    assert len(lines) == 5
    assert lines[1].endswith(",,")


def test_sweep_parallel_matches_serial():
    targets = SweepTargets(k=1, delta=0.1, zeta=10.0, mu=0.5, kind="varma11")
    args = (DimensionSchedule.fixed(4), [30, 60], targets, [0, 1])
    a = sweep_csv(triangular_array_run(*args, n_max=4, bins=2), 4)
    b = sweep_csv(triangular_array_run(*args, n_max=4, bins=2, jobs=2), 4)
    assert a == b
