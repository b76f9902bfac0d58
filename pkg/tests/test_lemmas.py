import numpy as np
import pytest
from hypothesis import given, strategies as st

from rhomix.errors import PreconditionFailed
from rhomix.lemmas import (SUITES, check_invcovdiff_pd, check_product_spectrum,
                           check_schur_eig_map, check_singular_min_bound, invcovdiff_matrix,
                           run_all, run_suite)

from conftest import random_pd


def test_schur_example():
    D = np.array([[np.sqrt(0.36), 0.0], [0.0, np.sqrt(0.09)]])
    chk = check_schur_eig_map(D)
    assert chk.passed
    lam = np.array([0.36, 0.09])
    np.testing.assert_allclose((1 - lam) / (1 + lam), [0.470588235, 0.834862385], atol=1e-9)


def test_invcovdiff_scalar_closed_form():
    # A = 1, B = b: 2/(1-b^2) [[1, -b], [-b, 1]] - I
    b = 0.4
    K = invcovdiff_matrix(np.array([[1.0]]), np.array([[b]]))
    want = 2 / (1 - b * b) * np.array([[1, -b], [-b, 1]]) - np.eye(2)
    np.testing.assert_allclose(K, want, rtol=1e-14)
    assert np.linalg.eigvalsh(K)[0] > 0


@given(n=st.sampled_from([1, 2, 5]), seed=st.integers(0, 2**32), s=st.floats(0, 0.95))
def test_invcovdiff_property(n, seed, s):
    rng = np.random.default_rng(seed)
    A = random_pd(rng, n)
    D = rng.standard_normal((n, n))
    D *= s / max(np.linalg.norm(D, 2), 1e-300)
    w, V = np.linalg.eigh(A)
    Ah = (V * np.sqrt(w)) @ V.T
    assert check_invcovdiff_pd(A, Ah @ D @ Ah).passed


def test_invcovdiff_precondition():
    with pytest.raises(PreconditionFailed):
        check_invcovdiff_pd(np.eye(2), np.eye(2))


@given(n=st.sampled_from([1, 2, 5]), seed=st.integers(0, 2**32))
def test_product_spectrum_property(n, seed):
    rng = np.random.default_rng(seed)
    G = rng.standard_normal((n, max(1, n - 1)))
    assert check_product_spectrum(random_pd(rng, n), G @ G.T).passed


def test_product_spectrum_precondition():
    with pytest.raises(PreconditionFailed):
        check_product_spectrum(np.eye(2), -np.eye(2))


@given(n=st.sampled_from([1, 2, 5, 20]), seed=st.integers(0, 2**32), s=st.floats(0, 0.99))
def test_singular_min_property(n, seed, s):
    L = np.random.default_rng(seed).standard_normal((n, n))
    L *= s / np.linalg.norm(L, 2)
    assert check_singular_min_bound(L).passed


def test_singular_min_precondition():
    with pytest.raises(PreconditionFailed):
        check_singular_min_bound(2 * np.eye(3))


def test_schur_precondition():
    with pytest.raises(PreconditionFailed):
        check_schur_eig_map(np.eye(2))


def test_suites_pass_and_are_deterministic():
    for name in SUITES:
        r = run_suite(name, instances=20, sizes=(1, 3), seed=4)
        assert r.ok and r.instances == 40 and r.passed == 40
    a = run_suite("schur_eig_map", instances=10, sizes=(4,), seed=1)
    b = run_suite("schur_eig_map", instances=10, sizes=(4,), seed=1)
    assert a.worst_violation == b.worst_violation


def test_tolerance_override_produces_witness():
    res = run_all(instances=3, sizes=(2,), seed=0, tol=-1.0)
    assert all(not r.ok and r.witness is not None for r in res)
