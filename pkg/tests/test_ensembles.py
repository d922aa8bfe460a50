"""Finite-n samplers: tridiagonal Hermite entry laws, the nested Jacobi
construction, dense GOE draws and Householder reduction, circular Verblunsky
coefficients, and the 1-d random Schrodinger matrix."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from betalab import tridiag
from betalab.ensembles import (
    DegenerateInputError,
    DenseSymmetric,
    SchrodingerMatrix,
    VerblunskyCoeffs,
    householder_tridiagonalize,
    minor_as_hermite,
    sample_beta_hermite,
    sample_beta_hermite_batch,
    sample_circular_beta,
    sample_circular_beta_batch,
    sample_goe,
    sample_nested_jacobi,
    sample_schrodinger,
    sample_schrodinger_batch,
    sample_spiked_hermite,
)
from betalab.rng import RngStream, ZeroStream
from betalab.stats import ks_distance, ks_two_sample


# ---------------------------------------------------------------------------
# Beta-Hermite entry laws


def test_hermite_single_entry_law():
    # n=1: one diagonal entry ~ N(0, 2/beta)
    diags, offs = sample_beta_hermite_batch(1, 2.0, RngStream(964, 0), 20000)
    assert offs.shape == (20000, 0)
    assert abs(float(np.var(diags[:, 0])) - 1.0) <= 0.05
    assert abs(float(np.mean(diags[:, 0]))) <= 0.035


def test_hermite_offdiag_chi_square_mean():
    # n=2, beta=2: offdiag^2 * n*beta is chi^2 with 2 dof, mean 2
    _, offs = sample_beta_hermite_batch(2, 2.0, RngStream(950, 0), 100000)
    mean = float(np.mean(offs[:, 0] ** 2 * 4.0))
    assert abs(mean / 2.0 - 1.0) <= 0.02


def test_hermite_infinite_beta_deterministic():
    T = sample_beta_hermite(9, float("inf"), RngStream(5, 0))
    assert np.all(T.diag == 0.0)
    assert np.array_equal(T.offdiag, np.sqrt(np.arange(8, 0, -1) / 9.0))
    # the stream is never consumed in the deterministic limit
    T2 = sample_beta_hermite(9, float("inf"), ZeroStream())
    assert np.array_equal(T.offdiag, T2.offdiag)


def test_hermite_entries_uncorrelated():
    diags, offs = sample_beta_hermite_batch(3, 2.0, RngStream(954, 0), 100000)
    for a, b in [(diags[:, 0], diags[:, 1]),
                 (diags[:, 0], offs[:, 0]),
                 (offs[:, 0], offs[:, 1])]:
        assert abs(float(np.corrcoef(a, b)[0, 1])) <= 0.01


def test_hermite_validation():
    with pytest.raises(ValueError):
        sample_beta_hermite(0, 2.0, RngStream(0, 0))
    with pytest.raises(ValueError):
        sample_beta_hermite(4, 0.0, RngStream(0, 0))
    with pytest.raises(ValueError):
        sample_beta_hermite(4, -1.0, RngStream(0, 0))


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 8), st.floats(0.5, 8.0), st.integers(0, 1000))
def test_hermite_structural_invariants(n, beta, seed):
    T = sample_beta_hermite(n, beta, RngStream(seed, 3))
    assert T.diag.size == n and T.offdiag.size == n - 1
    assert np.all(np.isfinite(T.diag))
    assert np.all(T.offdiag > 0)


def test_spiked_zero_is_bitwise_unspiked():
    a = sample_spiked_hermite(12, 2.0, 0.0, RngStream(70, 0))
    b = sample_beta_hermite(12, 2.0, RngStream(70, 0))
    assert np.array_equal(a.diag, b.diag)
    assert np.array_equal(a.offdiag, b.offdiag)


def test_spiked_shifts_only_first_diagonal_entry():
    mu = 0.8
    a = sample_spiked_hermite(10, 2.0, mu, RngStream(71, 0))
    b = sample_beta_hermite(10, 2.0, RngStream(71, 0))
    assert np.array_equal(a.offdiag, b.offdiag)
    assert np.array_equal(a.diag[1:], b.diag[1:])
    assert a.diag[0] == b.diag[0] + mu


# ---------------------------------------------------------------------------
# Nested Jacobi operator


def test_nested_jacobi_free_case():
    J = sample_nested_jacobi(7, float("inf"), ZeroStream())
    assert np.all(J.diag == 0.0)
    assert np.array_equal(J.offdiag, np.sqrt(np.arange(1.0, 7.0)))


def test_nested_jacobi_order_three_free_spectrum():
    J = sample_nested_jacobi(3, float("inf"), ZeroStream())
    lam = tridiag.eigenvalues(J)
    assert np.allclose(lam, [-math.sqrt(3.0), 0.0, math.sqrt(3.0)], atol=1e-10)


def test_nested_jacobi_truncation_is_bitwise_nested():
    # interleaved scalar draws make the order-4 truncation the literal
    # top-left corner of the order-9 draw on the same stream
    small = sample_nested_jacobi(4, 2.0, RngStream(77, 0))
    big = sample_nested_jacobi(9, 2.0, RngStream(77, 0))
    assert np.array_equal(small.diag, big.diag[:4])
    assert np.array_equal(small.offdiag, big.offdiag[:3])


def test_minor_as_hermite_matches_direct_law():
    # order-5 minor of a nested draw, reversed and scaled, carries the
    # direct sampler's entry laws (two-sample KS on three entries)
    B = 10000
    d0 = np.empty(B)
    o0 = np.empty(B)
    o3 = np.empty(B)
    for b in range(B):
        J = sample_nested_jacobi(5, 2.0, RngStream(958, b))
        M = minor_as_hermite(J, 5)
        d0[b], o0[b], o3[b] = M.diag[0], M.offdiag[0], M.offdiag[3]
    diags, offs = sample_beta_hermite_batch(5, 2.0, RngStream(958, 20000), B)
    assert ks_two_sample(d0, diags[:, 0]) <= 0.02
    assert ks_two_sample(o0, offs[:, 0]) <= 0.02
    assert ks_two_sample(o3, offs[:, 3]) <= 0.02


def test_minor_as_hermite_validation():
    J = sample_nested_jacobi(5, 2.0, RngStream(78, 0))
    with pytest.raises(ValueError):
        minor_as_hermite(J, 6)
    with pytest.raises(ValueError):
        minor_as_hermite(J, 0)


def test_truncation_consistency_top_eigenvalue():
    # dropping the root-side row of an order-6 draw and rescaling gives
    # the order-5 law; compared on the top eigenvalue
    B = 10000
    d6, o6 = sample_beta_hermite_batch(6, 2.0, RngStream(957, 0), B)
    s = math.sqrt(6.0 / 5.0)
    top_minor = tridiag.eigenvalues_by_index_batch(d6[:, 1:] * s, o6[:, 1:] * s, 4)
    d5, o5 = sample_beta_hermite_batch(5, 2.0, RngStream(957, 1), B)
    top_direct = tridiag.eigenvalues_by_index_batch(d5, o5, 4)
    assert ks_two_sample(top_minor, top_direct) <= 0.02


# ---------------------------------------------------------------------------
# Dense GOE and Householder reduction


def test_goe_entry_variances():
    B = 4000
    a11 = np.empty(B)
    a12 = np.empty(B)
    for b in range(B):
        A = sample_goe(2, 0.0, RngStream(962, b)).matrix
        assert A[0, 1] == A[1, 0]
        a11[b], a12[b] = A[0, 0], A[0, 1]
    assert abs(float(np.var(a11)) - 2.0) <= 0.15
    assert abs(float(np.var(a12)) - 1.0) <= 0.08


def test_goe_trace_centred():
    B = 4000
    tr = np.empty(B)
    for b in range(B):
        tr[b] = np.trace(sample_goe(10, 0.0, RngStream(963, b)).matrix)
    # Var(tr) = 2n, so the sample mean sits within 5 standard errors
    assert abs(float(np.mean(tr))) <= 5.0 * math.sqrt(20.0 / B)


def test_goe_spike_is_constant_shift():
    base = sample_goe(5, 0.0, RngStream(79, 0)).matrix
    spiked = sample_goe(5, 0.7, RngStream(79, 0)).matrix
    assert np.allclose(spiked - base, 0.7 / math.sqrt(5.0), atol=1e-12)


def test_householder_fixes_jacobi_matrices():
    T = sample_beta_hermite(6, 2.0, RngStream(80, 0))
    back = householder_tridiagonalize(DenseSymmetric(matrix=T.matrix()))
    assert np.max(np.abs(back.diag - T.diag)) <= 1e-12
    assert np.max(np.abs(back.offdiag - T.offdiag)) <= 1e-12


def test_householder_two_by_two_sign_normalization():
    A = DenseSymmetric(matrix=np.array([[0.4, -0.9], [-0.9, -0.1]]))
    T = householder_tridiagonalize(A)
    assert np.array_equal(T.diag, [0.4, -0.1])
    assert T.offdiag[0] == 0.9


def test_householder_preserves_spectrum():
    A = sample_goe(8, 0.0, RngStream(81, 0))
    lam_dense = np.linalg.eigvalsh(A.matrix)
    lam_tri = tridiag.eigenvalues(householder_tridiagonalize(A), tol=1e-12)
    assert np.max(np.abs(lam_dense - lam_tri)) <= 1e-9


def test_householder_rejects_noncyclic_first_coordinate():
    with pytest.raises(DegenerateInputError):
        householder_tridiagonalize(DenseSymmetric(matrix=np.diag([1.0, 1.0, 2.0])))


def test_dense_symmetric_validation():
    with pytest.raises(ValueError):
        DenseSymmetric(matrix=np.array([[0.0, 1.0], [0.5, 0.0]]))
    with pytest.raises(ValueError):
        DenseSymmetric(matrix=np.zeros((2, 3)))


# ---------------------------------------------------------------------------
# Circular Verblunsky coefficients


def test_circular_single_coefficient_uniform_on_circle():
    alpha = sample_circular_beta_batch(1, 2.0, RngStream(965, 0), 100000)[:, 0]
    assert np.max(np.abs(np.abs(alpha) - 1.0)) <= 1e-12
    phases = np.mod(np.angle(alpha), 2.0 * math.pi)
    uniform = lambda t: np.clip(np.asarray(t) / (2.0 * math.pi), 0.0, 1.0)
    assert ks_distance(phases, uniform) <= 0.01


def test_circular_first_modulus_beta_mean():
    # |alpha_0|^2 ~ Beta(1, (n-1)beta/2): mean 1/3 at n=3, beta=2
    alpha = sample_circular_beta_batch(3, 2.0, RngStream(966, 0), 100000)
    mean = float(np.mean(np.abs(alpha[:, 0]) ** 2))
    assert abs(mean * 3.0 - 1.0) <= 0.02


def test_circular_moduli_bounds():
    for b in range(50):
        coeffs = sample_circular_beta(6, 1.0, RngStream(967, b))
        mods = np.abs(coeffs.alpha)
        assert np.all(mods[:-1] <= 1.0 + 1e-12)
        assert abs(mods[-1] - 1.0) <= 1e-12


def test_circular_validation():
    with pytest.raises(ValueError):
        sample_circular_beta(0, 2.0, RngStream(0, 0))
    with pytest.raises(ValueError):
        sample_circular_beta(3, float("inf"), RngStream(0, 0))


def test_verblunsky_type_validation():
    with pytest.raises(ValueError):
        VerblunskyCoeffs(alpha=np.array([0.5 + 0.0j, 0.5 + 0.0j]))  # last not unimodular
    with pytest.raises(ValueError):
        VerblunskyCoeffs(alpha=np.array([1.5 + 0.0j, 1.0 + 0.0j]))
    ok = VerblunskyCoeffs(alpha=np.array([0.3 + 0.4j, 1.0j]))
    assert ok.n == 2


# ---------------------------------------------------------------------------
# 1-d random Schrodinger


def test_schrodinger_structure_and_rademacher_moduli():
    H = sample_schrodinger(64, 1.5, "rademacher", RngStream(82, 0))
    T = H.tridiagonal
    assert np.all(T.offdiag == 1.0)
    assert np.allclose(np.abs(T.diag) * math.sqrt(64.0), 1.5, atol=1e-13)


def test_schrodinger_weak_potential_near_free_spectrum():
    n = 12
    H = sample_schrodinger(n, 1e-8, "gaussian", RngStream(83, 0))
    lam = tridiag.eigenvalues(H.tridiagonal)
    free = np.sort(2.0 * np.cos(np.arange(1, n + 1) * math.pi / (n + 1)))
    assert np.max(np.abs(lam - free)) <= 1e-6


def test_schrodinger_diag_variance():
    H = sample_schrodinger(10000, 1.3, "gaussian", RngStream(959, 0))
    v = H.tridiagonal.diag * math.sqrt(10000.0)
    assert abs(float(np.var(v)) / 1.69 - 1.0) <= 0.02


@pytest.mark.parametrize("dist", ["gaussian", "rademacher", "uniform"])
def test_omega_distributions_standardized(dist):
    rows = sample_schrodinger_batch(100, 1.0, dist, RngStream(84, 0), 1000)
    omega = rows.ravel() * math.sqrt(100.0)
    assert abs(float(np.mean(omega))) <= 0.02
    assert abs(float(np.var(omega)) - 1.0) <= 0.02
    if dist == "uniform":
        assert np.max(np.abs(omega)) <= math.sqrt(3.0) + 1e-12
    if dist == "rademacher":
        assert set(np.unique(omega)) == {-1.0, 1.0}


def test_schrodinger_validation():
    with pytest.raises(ValueError):
        sample_schrodinger(0, 1.0, "gaussian", RngStream(0, 0))
    with pytest.raises(ValueError):
        sample_schrodinger(5, 0.0, "gaussian", RngStream(0, 0))
    with pytest.raises(ValueError):
        sample_schrodinger(5, 1.0, "cauchy", RngStream(0, 0))
    with pytest.raises(ValueError):
        SchrodingerMatrix(
            tridiagonal=tridiag.SymTridiagonal(diag=np.zeros(3),
                                               offdiag=np.array([1.0, 0.5])),
            sigma=1.0, n=3, omega_dist="gaussian")
