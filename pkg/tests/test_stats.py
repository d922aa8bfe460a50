"""ECDFs, KS distances, Wilson intervals, least squares."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from betalab.rng import RngStream
from betalab.stats import (CdfTable, Ecdf, counts_histogram, ks_distance,
                           ks_two_sample, linear_fit, wilson_interval)

finite_samples = st.lists(
    st.floats(-50, 50, allow_nan=False, allow_infinity=False),
    min_size=1, max_size=40)


def test_ks_identical_samples_zero():
    x = np.array([0.3, -1.0, 2.5, 0.3])
    assert ks_two_sample(x, x) == 0.0


def test_ks_disjoint_supports_one():
    assert ks_two_sample([1.0, 2.0, 3.0], [10.0, 11.0]) == 1.0


def test_ks_uniform_sample_vs_uniform_cdf_matches_bruteforce():
    u = RngStream(17, 0).generator().random(10_000)
    cdf = lambda t: np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    d = ks_distance(u, cdf)
    assert d <= 0.02
    # brute force: the sup is attained just left or right of a sample point
    s = np.sort(u)
    n = s.size
    grid_hi = np.arange(1, n + 1) / n - cdf(s)
    grid_lo = cdf(s) - np.arange(0, n) / n
    assert d == pytest.approx(max(grid_hi.max(), grid_lo.max()), abs=1e-15)


@given(finite_samples, finite_samples)
@settings(max_examples=60, deadline=None)
def test_ks_two_sample_symmetry(a, b):
    assert ks_two_sample(a, b) == pytest.approx(ks_two_sample(b, a), abs=1e-15)


@given(finite_samples, finite_samples, finite_samples)
@settings(max_examples=60, deadline=None)
def test_ks_triangle_bound(a, b, c):
    ab = ks_two_sample(a, b)
    bc = ks_two_sample(b, c)
    ac = ks_two_sample(a, c)
    assert ac <= ab + bc + 1e-12


def test_ecdf_evaluation_right_continuous():
    e = Ecdf(np.array([1.0, 2.0, 2.0, 4.0]))
    assert e(0.5) == 0.0
    assert e(1.0) == 0.25
    assert e(2.0) == 0.75
    assert e(3.9999) == 0.75
    assert e(4.0) == 1.0
    assert e.quantile(0.5) == 2.0


def test_wilson_edge_cases():
    lo, _ = wilson_interval(0, 50)
    assert lo == 0.0
    _, hi = wilson_interval(50, 50)
    assert hi == 1.0


def test_wilson_center_symmetric_and_closed_form():
    lo, hi = wilson_interval(50, 100)
    assert (lo + hi) / 2 == pytest.approx(0.5, abs=1e-12)
    z = 1.959963984540054
    half = (z / (1 + z * z / 100)) * math.sqrt(0.25 / 100 + z * z / 40_000)
    assert (hi - lo) / 2 == pytest.approx(half, abs=1e-3)


@given(st.integers(0, 200), st.integers(1, 200))
@settings(max_examples=60, deadline=None)
def test_wilson_interval_contains_mle_and_orders(successes, trials):
    if successes > trials:
        return
    lo, hi = wilson_interval(successes, trials)
    assert 0.0 <= lo <= successes / trials <= hi <= 1.0


def test_linear_fit_exact_line():
    x = np.array([0.0, 1.0, 2.0, 5.0])
    slope, intercept, r2 = linear_fit(x, 3.0 * x - 1.0)
    assert slope == pytest.approx(3.0, abs=1e-12)
    assert intercept == pytest.approx(-1.0, abs=1e-12)
    assert r2 == pytest.approx(1.0, abs=1e-12)


def test_linear_fit_constant_y():
    slope, intercept, _ = linear_fit([1.0, 2.0, 3.0], [4.0, 4.0, 4.0])
    assert slope == 0.0
    assert intercept == 4.0


def test_linear_fit_noisy_slope():
    gen = RngStream(23, 0).generator()
    x = np.linspace(0, 1, 100)
    y = 2.0 * x + gen.normal(0.0, 0.01, 100)
    slope, _, r2 = linear_fit(x, y)
    assert abs(slope - 2.0) < 0.01
    assert r2 > 0.99


def test_linear_fit_degenerate_x():
    with pytest.raises(ValueError):
        linear_fit([2.0, 2.0], [0.0, 1.0])


def test_counts_histogram_dense_range():
    values, freq = counts_histogram([3, 5, 3, 3])
    np.testing.assert_array_equal(values, [3, 4, 5])
    np.testing.assert_array_equal(freq, [3, 0, 1])


def test_cdf_table_checks_monotone():
    t = CdfTable(grid=np.array([0.0, 1.0]), values=np.array([0.2, 0.7]),
                 ci_halfwidth=np.array([0.01, 0.01]), meta={})
    t.check()
    with pytest.raises(ValueError):
        CdfTable(grid=np.array([0.0, 1.0]), values=np.array([0.7, 0.2]),
                 ci_halfwidth=np.array([0.01, 0.01]), meta={}).check()
