"""Spectral tools for symmetric tridiagonal matrices: Sturm counts against
a characteristic-polynomial oracle, bisection eigenvalues, inverse-iteration
eigenvectors, spectral measures and their moment identities, the orthogonal
polynomial recursion, and the semicircle diagnostics."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from betalab import ensembles
from betalab.rng import RngStream, ZeroStream
from betalab.stats import ks_distance
from betalab.tridiag import (
    CATALAN_MOMENTS,
    DegenerateSpectrumError,
    SymTridiagonal,
    WeightedPointMeasure,
    arcsine_cdf,
    dense_representative,
    eigenvalue_by_index,
    eigenvalues,
    eigenvalues_by_index_batch,
    eigenvector,
    orthopoly_eval,
    quadrature_weights_from_polys,
    semicircle_cdf,
    semicircle_diagnostics,
    spectral_measure,
    sturm_count,
    sturm_counts_batch,
)


def charpoly_sign_changes(T, x):
    """Independent Sturm oracle: evaluate the leading-principal-minor
    determinant recursion d_k = (a_k - x) d_{k-1} - b_{k-1}^2 d_{k-2} and
    count sign changes (a zero takes the sign opposite its predecessor)."""
    a, b = T.diag, T.offdiag
    d_prev, d = 1.0, a[0] - x
    changes = 0
    s_prev = 1.0
    for k in range(T.n):
        if k > 0:
            d_prev, d = d, (a[k] - x) * d - b[k - 1] ** 2 * d_prev
        s = math.copysign(1.0, d) if d != 0 else -s_prev
        if s != s_prev:
            changes += 1
        s_prev = s
    return changes


def first_entry_power(T, k):
    """(T^k)_{11} by repeated matvec on e_1."""
    v = np.zeros(T.n)
    v[0] = 1.0
    for _ in range(k):
        v = T.matvec(v)
    return float(v[0])


# ---------------------------------------------------------------------------
# Sturm counts


def test_sturm_count_two_by_two():
    T = SymTridiagonal(diag=np.zeros(2), offdiag=np.ones(1))
    # eigenvalues are -1 and +1
    assert sturm_count(T, 0.0) == 1
    assert sturm_count(T, -1.5) == 0
    assert sturm_count(T, 1.5) == 2


def test_sturm_count_outside_gershgorin():
    T = ensembles.sample_beta_hermite(17, 2.0, RngStream(930, 0))
    lo, hi = T.gershgorin()
    assert sturm_count(T, lo - 1e-9) == 0
    assert sturm_count(T, hi + 1e-9) == T.n


def test_sturm_count_jump_equals_multiplicity():
    # the count jumps by the eigenvalue multiplicity across 0.7 (exact
    # ties follow the pivot-clamp convention, so probe either side)
    T = SymTridiagonal(diag=np.full(5, 0.7), offdiag=np.zeros(4))
    assert sturm_count(T, 0.7 - 1e-9) == 0
    assert sturm_count(T, 0.7 + 1e-9) == 5


def test_sturm_count_matches_charpoly_oracle():
    T = ensembles.sample_beta_hermite(50, 2.0, RngStream(931, 0))
    dense = T.matrix()
    lam = np.linalg.eigvalsh(dense)
    for x in np.linspace(-2.5, 2.5, 100):
        c = sturm_count(T, x)
        assert c == charpoly_sign_changes(T, x)
        assert c == int(np.sum(lam < x))


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.floats(-5, 5), min_size=2, max_size=8),
    st.data(),
)
def test_sturm_count_monotone(diag, data):
    off = data.draw(
        st.lists(st.floats(0.01, 3.0), min_size=len(diag) - 1,
                 max_size=len(diag) - 1))
    T = SymTridiagonal(diag=np.array(diag), offdiag=np.array(off))
    x = data.draw(st.floats(-12, 12))
    y = data.draw(st.floats(-12, 12))
    x, y = min(x, y), max(x, y)
    assert sturm_count(T, x) <= sturm_count(T, y)


# ---------------------------------------------------------------------------
# Eigenvalues


def test_eigenvalues_free_operator_order_three():
    # zero diagonal, off-diagonal (1, sqrt 2): char poly x^3 - 3x
    J = ensembles.sample_nested_jacobi(3, float("inf"), ZeroStream())
    lam = eigenvalues(J)
    assert np.allclose(lam, [-math.sqrt(3.0), 0.0, math.sqrt(3.0)], atol=1e-10)


def test_eigenvalues_constant_diagonal():
    T = SymTridiagonal(diag=np.full(7, 0.3), offdiag=np.zeros(6))
    assert np.allclose(eigenvalues(T), 0.3, atol=1e-12)


def test_eigenvalues_single_entry():
    T = SymTridiagonal(diag=np.array([2.0]), offdiag=np.zeros(0))
    assert eigenvalues(T)[0] == pytest.approx(2.0, abs=1e-12)


def test_eigenvalues_consistent_with_sturm_counts():
    tol = 1e-10
    T = ensembles.sample_beta_hermite(25, 1.0, RngStream(932, 0))
    lam = eigenvalues(T, tol=tol)
    for i, v in enumerate(lam):
        assert sturm_count(T, v - 2 * tol) == i
        assert sturm_count(T, v + 2 * tol) >= i + 1


def test_eigenvalue_by_index_matches_full_solve():
    T = ensembles.sample_beta_hermite(30, 2.0, RngStream(933, 0))
    lam = eigenvalues(T, tol=1e-12)
    for k in (0, 7, 29):
        assert eigenvalue_by_index(T, k) == pytest.approx(lam[k], abs=1e-10)
    with pytest.raises(ValueError):
        eigenvalue_by_index(T, 30)


def test_eigenvalues_interlace_under_truncation():
    T = ensembles.sample_beta_hermite(12, 1.0, RngStream(903, 0))
    lam = eigenvalues(T)
    minor = SymTridiagonal(diag=T.diag[:-1].copy(), offdiag=T.offdiag[:-1].copy())
    lam_m = eigenvalues(minor)
    for i in range(11):
        assert lam[i] < lam_m[i] < lam[i + 1]


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=2, max_size=6), st.data())
def test_interlacing_property(diag, data):
    off = data.draw(
        st.lists(st.floats(0.1, 2.0), min_size=len(diag) - 1,
                 max_size=len(diag) - 1))
    T = SymTridiagonal(diag=np.array(diag), offdiag=np.array(off))
    lam = eigenvalues(T)
    minor = SymTridiagonal(diag=T.diag[:-1].copy(), offdiag=T.offdiag[:-1].copy())
    lam_m = eigenvalues(minor)
    # 1e-9 slack absorbs the bisection bracket width on adversarial input
    for i in range(T.n - 1):
        assert lam[i] - 1e-9 <= lam_m[i] <= lam[i + 1] + 1e-9


# ---------------------------------------------------------------------------
# Eigenvectors


def test_eigenvector_two_by_two():
    T = SymTridiagonal(diag=np.zeros(2), offdiag=np.ones(1))
    top = eigenvector(T, 1.0)
    assert np.allclose(top.vector, [1.0, 1.0] / np.sqrt(2.0), atol=1e-8)
    bottom = eigenvector(T, -1.0)
    assert np.allclose(bottom.vector, [1.0, -1.0] / np.sqrt(2.0), atol=1e-8)
    # sign convention: first appreciable component positive
    assert top.vector[0] > 0 and bottom.vector[0] > 0


def test_eigenvector_residuals_on_random_draw():
    T = ensembles.sample_beta_hermite(200, 2.0, RngStream(934, 0))
    lam = eigenvalues(T, tol=1e-13)
    for v in lam[::20]:
        pair = eigenvector(T, v)
        assert np.max(np.abs(T.matvec(pair.vector) - v * pair.vector)) <= 1e-10
        assert np.linalg.norm(pair.vector) == pytest.approx(1.0, abs=1e-12)


def test_eigenvector_orthogonality():
    T = ensembles.sample_beta_hermite(30, 2.0, RngStream(935, 0))
    lam = eigenvalues(T, tol=1e-13)
    V = np.stack([eigenvector(T, v).vector for v in lam], axis=1)
    gram = V.T @ V
    assert np.max(np.abs(gram - np.eye(30))) <= 1e-8


# ---------------------------------------------------------------------------
# Spectral measures


def test_spectral_measure_weights_sum_to_one():
    T = ensembles.sample_beta_hermite(12, 2.0, RngStream(920, 0))
    mu = spectral_measure(T)
    assert abs(mu.weights.sum() - 1.0) <= 1e-10
    assert np.all(np.diff(mu.points) > 0)


def test_spectral_measure_moment_identity():
    # sum q_i lam_i^k equals (T^k)_{11} for k <= 2n-2; the tolerance is
    # scaled by the moment size because high moments reach ~1e4 here and
    # double precision carries ~1e-12 of that
    T = ensembles.sample_beta_hermite(12, 2.0, RngStream(920, 0))
    mu = spectral_measure(T, tol=1e-15)
    for k in range(2 * 12 - 1):
        ref = first_entry_power(T, k)
        assert abs(mu.moment(k) - ref) <= 1e-8 * max(1.0, abs(ref))


def test_spectral_measure_degenerate_spectrum():
    T = SymTridiagonal(diag=np.array([0.5, 0.5]), offdiag=np.array([1e-13]))
    with pytest.raises(DegenerateSpectrumError):
        spectral_measure(T)


def test_weighted_point_measure_validation():
    with pytest.raises(ValueError):
        WeightedPointMeasure(points=np.array([0.0, 1.0]),
                             weights=np.array([0.4, 0.4]))
    with pytest.raises(ValueError):
        WeightedPointMeasure(points=np.array([1.0, 0.0]),
                             weights=np.array([0.5, 0.5]))
    mu = WeightedPointMeasure(points=np.array([-1.0, 1.0]),
                              weights=np.array([0.25, 0.75]))
    assert mu.moment(2) == pytest.approx(1.0)
    assert mu.moment(1) == pytest.approx(0.5)


def test_dense_representative_roundtrip():
    T = ensembles.sample_beta_hermite(10, 2.0, RngStream(904, 0))
    mu = spectral_measure(T)
    back = ensembles.householder_tridiagonalize(dense_representative(mu))
    assert np.max(np.abs(back.diag - T.diag)) <= 1e-8
    assert np.max(np.abs(back.offdiag - T.offdiag)) <= 1e-8


def test_spectral_weights_average_to_uniform():
    # E q_i = 1/n for Hermite draws (Dirichlet(beta/2, ..., beta/2) law);
    # batched bisection for the nodes, Christoffel formula for the weights
    B, n = 10000, 4
    diags, offs = ensembles.sample_beta_hermite_batch(n, 2.0, RngStream(907, 0), B)
    nodes = np.stack(
        [eigenvalues_by_index_batch(diags, offs, k) for k in range(n)], axis=1)
    mean_q = np.zeros(n)
    for b in range(B):
        T = SymTridiagonal(diag=diags[b], offdiag=offs[b])
        mean_q += quadrature_weights_from_polys(T, nodes[b])
    mean_q /= B
    assert np.max(np.abs(n * mean_q - 1.0)) <= 0.02


# ---------------------------------------------------------------------------
# Orthogonal polynomials


def test_orthopoly_free_operator_odd_values_vanish():
    J = ensembles.sample_nested_jacobi(10, float("inf"), ZeroStream())
    p = orthopoly_eval(J, 0.0)
    assert all(p[k] == 0.0 for k in range(1, 11, 2))


def test_orthopoly_zero_offdiagonal_rejected():
    T = SymTridiagonal(diag=np.zeros(3), offdiag=np.array([1.0, 0.0]))
    with pytest.raises(ValueError):
        orthopoly_eval(T, 0.5)


def test_orthopoly_top_roots_are_eigenvalues():
    """Roots of p_n, located by an independent grid-bracketing bisection,
    coincide with the bisection eigenvalues."""
    T = ensembles.sample_beta_hermite(8, 2.0, RngStream(902, 0))
    lam = eigenvalues(T)
    lo, hi = T.gershgorin()
    grid = np.linspace(lo - 0.1, hi + 0.1, 4001)
    vals = orthopoly_eval(T, grid)[-1]
    sign = np.sign(vals)
    brackets = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
    assert brackets.size == 8
    roots = []
    for i in brackets:
        a, b = float(grid[i]), float(grid[i + 1])
        fa = float(orthopoly_eval(T, np.array([a]))[-1][0])
        for _ in range(60):
            m = 0.5 * (a + b)
            fm = float(orthopoly_eval(T, np.array([m]))[-1][0])
            if fa * fm <= 0:
                b = m
            else:
                a, fa = m, fm
        roots.append(0.5 * (a + b))
    assert np.max(np.abs(np.sort(roots) - lam)) <= 1e-8


def test_orthopoly_sign_changes_count_minor_eigenvalues():
    # with the (x - a_k) normalization, sign changes along p_0..p_k count
    # the eigenvalues of the order-k minor above x, so k minus the changes
    # is the Sturm count below x
    T = ensembles.sample_beta_hermite(10, 2.0, RngStream(936, 0))
    for x in np.linspace(-2.2, 2.2, 17):
        p = orthopoly_eval(T, float(x))
        for k in (3, 7, 10):
            seq = p[: k + 1]
            sign = np.sign(seq)
            changes = int(np.sum(sign[:-1] * sign[1:] < 0))
            minor = SymTridiagonal(diag=T.diag[:k].copy(),
                                   offdiag=T.offdiag[: k - 1].copy())
            assert k - changes == sturm_count(minor, float(x))


def test_quadrature_weights_match_eigenvector_route():
    # Christoffel formula vs squared first eigenvector components
    T = ensembles.sample_beta_hermite(9, 2.0, RngStream(937, 0))
    mu = spectral_measure(T, tol=1e-14)
    q = quadrature_weights_from_polys(T, mu.points)
    assert np.max(np.abs(q - mu.weights)) <= 1e-10


def test_gauss_quadrature_exact_on_nested_operator():
    # nodes/weights from the order-5 minor integrate x^k for k <= 9
    # against the spectral measure of the containing order-8 operator
    J = ensembles.sample_nested_jacobi(8, 2.0, RngStream(901, 0))
    minor = SymTridiagonal(diag=J.diag[:5].copy(), offdiag=J.offdiag[:4].copy())
    nodes = eigenvalues(minor)
    q = quadrature_weights_from_polys(minor, nodes)
    for k in range(10):
        ref = first_entry_power(J, k)
        assert abs(float(np.dot(q, nodes**k)) - ref) <= 1e-7


# ---------------------------------------------------------------------------
# Reference laws and diagnostics


def test_semicircle_cdf_shape():
    assert semicircle_cdf(-2.0) == 0.0
    assert semicircle_cdf(0.0) == pytest.approx(0.5, abs=1e-15)
    assert semicircle_cdf(2.0) == 1.0
    assert semicircle_cdf(-5.0) == 0.0 and semicircle_cdf(5.0) == 1.0
    x = np.linspace(-2, 2, 101)
    assert np.all(np.diff(semicircle_cdf(x)) > 0)


def test_arcsine_cdf_shape():
    assert arcsine_cdf(0.0) == pytest.approx(0.5, abs=1e-15)
    assert arcsine_cdf(-2.0) == 0.0 and arcsine_cdf(2.0) == 1.0
    assert arcsine_cdf(0.0, half_width=3.0) == pytest.approx(0.5, abs=1e-15)
    assert arcsine_cdf(-7.0, half_width=3.0) == 0.0


def dyck_path_count(k):
    """Number of +-1 walks of length 2k, start and end at 0, never
    negative (dynamic programming, no closed form used)."""
    heights = {0: 1}
    for _ in range(2 * k):
        nxt = {}
        for h, c in heights.items():
            for h2 in (h - 1, h + 1):
                if h2 >= 0:
                    nxt[h2] = nxt.get(h2, 0) + c
        heights = nxt
    return heights.get(0, 0)


def test_catalan_moments_match_path_count():
    for two_k, value in CATALAN_MOMENTS.items():
        assert value == float(dyck_path_count(two_k // 2))


def test_semicircle_diagnostics_free_operator():
    # deterministic input, so the tolerances are deterministic too
    T = ensembles.sample_beta_hermite(600, float("inf"), ZeroStream())
    d = semicircle_diagnostics(eigenvalues(T, tol=1e-11))
    assert d["ks_distance"] <= 0.01
    m = d["moments"]
    for two_k, target in CATALAN_MOMENTS.items():
        assert abs(m[two_k - 1] / target - 1.0) <= 0.02
    for odd in (1, 3, 5, 7):
        assert abs(m[odd - 1]) <= 1e-6


def test_cycle_spectrum_gives_arcsine_not_semicircle():
    # real parts of equally spaced points on the radius-2 circle
    n = 1000
    eigs = np.sort(2.0 * np.cos(2.0 * np.pi * np.arange(n) / n))
    assert ks_distance(eigs, arcsine_cdf) <= 0.01
    assert semicircle_diagnostics(eigs)["ks_distance"] >= 0.1


def test_semicircle_diagnostics_hermite_draw():
    T = ensembles.sample_beta_hermite(1500, 2.0, RngStream(938, 0))
    d = semicircle_diagnostics(eigenvalues(T, tol=1e-11))
    assert d["ks_distance"] <= 0.05


def test_semicircle_diagnostics_empty_input():
    with pytest.raises(ValueError):
        semicircle_diagnostics(np.array([]))


# ---------------------------------------------------------------------------
# Batched kernels


def test_batch_kernels_match_scalar_routines():
    diags, offs = ensembles.sample_beta_hermite_batch(
        9, 2.0, RngStream(939, 0), 6)
    xs = np.linspace(-1.5, 1.5, 6)
    counts = sturm_counts_batch(diags, offs, xs)
    ks = np.array([0, 2, 4, 5, 7, 8])
    lam = eigenvalues_by_index_batch(diags, offs, ks)
    for b in range(6):
        T = SymTridiagonal(diag=diags[b], offdiag=offs[b])
        assert counts[b] == sturm_count(T, float(xs[b]))
        assert lam[b] == pytest.approx(
            eigenvalue_by_index(T, int(ks[b])), abs=1e-9)


def test_batch_index_validation():
    diags, offs = ensembles.sample_beta_hermite_batch(
        5, 2.0, RngStream(940, 0), 3)
    with pytest.raises(ValueError):
        eigenvalues_by_index_batch(diags, offs, np.array([0, 5, 1]))


def test_matvec_matches_dense():
    T = ensembles.sample_beta_hermite(13, 2.0, RngStream(941, 0))
    v = RngStream(941, 1).generator().normal(0.0, 1.0, 13)
    assert np.allclose(T.matvec(v), T.matrix() @ v, atol=1e-14)


def test_symtridiagonal_validation():
    with pytest.raises(ValueError):
        SymTridiagonal(diag=np.zeros(4), offdiag=np.zeros(4))
