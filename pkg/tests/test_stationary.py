import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, strategies as st

from rhomix.errors import ConsistencyFailure, NotPositiveDefinite
from rhomix.models import make_var1, make_varma11, random_var1, random_varma11
from rhomix.stationary import (assemble_joint, factor_covariance, lag_cross_cov,
                               lyapunov_residual, solve_lyapunov, solve_lyapunov_kron,
                               solve_stationary, solve_stationary_varma11,
                               stationary_covariances, varma_consistency_residual)


def test_scalar_lyapunov():
    G, res = solve_lyapunov(np.array([[0.6]]), np.array([[1.0]]))
    assert G[0, 0] == pytest.approx(1.5625, rel=1e-14)
    assert res < 1e-13


def test_scalar_lag_three():
    m = make_var1([[0.6]], [[1.0]])
    g = solve_stationary(m)
    assert lag_cross_cov(m, g, 3)[0, 0] == pytest.approx(0.216 * 1.5625, rel=1e-14)


def test_factor_scalar_gamma_f():
    m = make_varma11([[1.0], [0.0]], [[0.5]], [[1.0]], np.eye(2))
    assert factor_covariance(m)[0, 0] == pytest.approx(4.0 / 3.0, rel=1e-14)
    g = solve_stationary(m)
    np.testing.assert_allclose(g, [[7.0 / 3.0, 0.0], [0.0, 1.0]], rtol=1e-14, atol=1e-15)


@given(p=st.sampled_from([1, 2, 5, 12, 30]), k=st.integers(0, 3), seed=st.integers(0, 2**32))
def test_doubling_agrees_with_oracles(p, k, seed):
    m = random_var1(p, min(k, p), 0.9, 0.1, 10.0, seed=seed)
    G, res = solve_lyapunov(m.A, m.sigma_xi)
    assert res <= 1e-10
    K = solve_lyapunov_kron(m.A, m.sigma_xi)
    S = sla.solve_discrete_lyapunov(m.A, m.sigma_xi)
    scale = np.linalg.norm(G)
    assert np.linalg.norm(G - K) <= 1e-9 * scale
    assert np.linalg.norm(G - S) <= 1e-9 * scale
    np.testing.assert_array_equal(G, G.T)


def test_near_unit_root_converges():
    A = np.diag([0.999, 0.5])
    G, res = solve_lyapunov(A, np.eye(2))
    assert G[0, 0] == pytest.approx(1 / (1 - 0.999**2), rel=1e-9)
    assert res <= 1e-10


def test_residual_helper_is_relative():
    A, Q = np.array([[0.5]]), np.array([[3.0]])
    assert lyapunov_residual(A, Q, np.array([[4.0]])) == pytest.approx(0.0, abs=1e-15)
    assert lyapunov_residual(A, Q, np.array([[5.0]])) > 0.1


@given(pk=st.sampled_from([(2, 1), (5, 2), (10, 3), (30, 3)]), seed=st.integers(0, 2**32))
def test_varma_state_space_consistency(pk, seed):
    m = random_varma11(*pk, 0.5, 0.1, 10.0, seed=seed)
    g = solve_stationary_varma11(m)
    assert varma_consistency_residual(m, g) <= 1e-10
    # Cov(X(t+1), X(t)) = Lambda H Gamma_F Lambda^T from the factor representation
    GF = factor_covariance(m)
    direct = m.Lambda @ m.H @ GF @ m.Lambda.T
    np.testing.assert_allclose(lag_cross_cov(m, g, 1), direct, atol=1e-12 * np.abs(g).max())


def test_varma_inconsistent_noise_is_flagged():
    m = random_varma11(5, 2, 0.5, 0.1, 10.0, seed=3)
    assert varma_consistency_residual(m, np.eye(5) * 100) > 1e-8
    with pytest.raises(ConsistencyFailure):
        from rhomix import stationary
        orig = stationary.varma_noise_term
        try:
            stationary.varma_noise_term = lambda mm: 2 * orig(mm)
            solve_stationary_varma11(m)
        finally:
            stationary.varma_noise_term = orig


def test_joint_covariance_structure():
    m = random_var1(4, 2, 0.5, 0.1, 10.0, seed=2)
    cov = stationary_covariances(m)
    S = cov.sigma2p
    np.testing.assert_array_equal(S[:4, :4], cov.gamma)
    np.testing.assert_array_equal(S[4:, :4], cov.gamma1)
    np.testing.assert_array_equal(S, S.T)
    assert np.all(cov.sigma2p_tilde[:4, 4:] == 0)
    assert not S.flags.writeable


def test_joint_rejects_degenerate_lag():
    g = np.eye(2)
    with pytest.raises(NotPositiveDefinite):
        assemble_joint(g, np.eye(2))
