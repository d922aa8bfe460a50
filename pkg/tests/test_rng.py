"""Counter-based streams: reproducibility, splitting, the zero stream,
and the scalar SDE reference integrator."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from betalab.rng import (BrownianPath, ExplosionPolicy, RngStream, ZeroStream,
                         beta_variate, brownian_path, chi, gaussian,
                         integrate_sde)


def test_same_key_same_sequence():
    a = RngStream(123, 7).generator().standard_normal(64)
    b = RngStream(123, 7).generator().standard_normal(64)
    np.testing.assert_array_equal(a, b)


def test_generator_restarts_from_counter_zero():
    s = RngStream(5, 1)
    first = s.generator().standard_normal(8)
    s.generator().standard_normal(1000)  # drawing does not advance siblings
    again = s.generator().standard_normal(8)
    np.testing.assert_array_equal(first, again)


def test_split_changes_stream():
    root = RngStream(9, 0)
    a = root.split(0).generator().standard_normal(32)
    b = root.split(1).generator().standard_normal(32)
    assert not np.allclose(a, b)


def test_split_is_deterministic_and_nested():
    root = RngStream(42, 3)
    assert root.split(1, 2).stream_id == root.split(1).split(2).stream_id
    assert root.split(1, 2).seed == 42


@given(st.integers(0, 2**63), st.integers(0, 100), st.integers(0, 100))
@settings(max_examples=40, deadline=None)
def test_split_injective_on_small_indices(seed, i, j):
    root = RngStream(seed, 0)
    if i != j:
        assert root.split(i).stream_id != root.split(j).stream_id


def test_zero_stream_emits_zeros():
    z = ZeroStream()
    assert np.all(z.generator().standard_normal(10) == 0.0)
    assert np.all(z.generator().normal(3.0, 2.0, 5) == 3.0)
    assert z.split(4).generator().standard_normal() == 0.0


def test_chi_moments_and_validation():
    draws = chi(RngStream(1, 0), 3.0, 200_000)
    # E chi_k^2 = k
    assert abs(np.mean(draws**2) - 3.0) < 0.03
    with pytest.raises(ValueError):
        chi(RngStream(1, 0), 0.0)


def test_beta_variate_range_and_mean():
    draws = beta_variate(RngStream(2, 0), 1.0, 4.0, 100_000)
    assert np.all((draws >= 0) & (draws <= 1))
    assert abs(np.mean(draws) - 0.2) < 0.005
    with pytest.raises(ValueError):
        beta_variate(RngStream(2, 0), -1.0, 1.0)


def test_gaussian_mean_std():
    draws = gaussian(RngStream(3, 0), 100_000, mean=1.0, std=2.0)
    assert abs(np.mean(draws) - 1.0) < 0.03
    assert abs(np.std(draws) - 2.0) < 0.03


def test_brownian_path_grid_and_variance():
    path = brownian_path(RngStream(4, 0), 0.0, 2.0, 0.5)
    np.testing.assert_allclose(path.times, [0.0, 0.5, 1.0, 1.5, 2.0])
    assert path.values[0] == 0.0
    many = np.array([brownian_path(RngStream(4, i), 0.0, 1.0, 1.0).values[-1]
                     for i in range(4000)])
    assert abs(np.var(many) - 1.0) < 0.08


def test_brownian_path_ragged_endpoint():
    path = brownian_path(RngStream(4, 0), 0.0, 1.0, 0.3)
    assert path.times[-1] == 1.0
    assert np.all(np.diff(path.times) > 0)


def test_brownian_path_validation():
    with pytest.raises(ValueError):
        brownian_path(RngStream(0, 0), 1.0, 0.0, 0.1)
    with pytest.raises(ValueError):
        BrownianPath(times=np.array([0.0, 0.0]), values=np.array([0.0, 1.0]))


def test_integrate_sde_ou_moments():
    # dx = -x dt + dB has stationary variance 1/2; the correlation time is
    # 1, so a horizon of 1000 leaves ~500 effective samples in the tail
    res = integrate_sde(lambda t, x: -x, lambda t, x: 1.0, 0.0, 0.0, 1000.0,
                        0.02, RngStream(6, 0))
    tail = res.values[len(res.values) // 5:]
    assert abs(np.var(tail) - 0.5) < 0.1
    assert res.explosion_count == 0


def test_integrate_sde_explosion_restart():
    # strong downward drift crosses the chart and restarts on top
    res = integrate_sde(lambda t, x: -(1.0 + x * x), lambda t, x: 0.0,
                        0.0, 0.0, 8.0, 1e-3, ZeroStream(),
                        ExplosionPolicy(threshold=100.0))
    assert res.explosion_count >= 1
    assert res.explosion_times[0] < 2.0  # arctan blowup of the ODE is pi/2
    # restart point sits at the top of the chart
    i = np.searchsorted(res.times, res.explosion_times[0])
    assert res.values[i] == pytest.approx(100.0, abs=1e-9)
