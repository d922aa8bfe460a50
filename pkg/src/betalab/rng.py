"""Seedable stochastic primitives.

Every random quantity in the package flows from an explicit
:class:`RngStream`, a (seed, stream_id) pair fed to a counter-based
generator (Philox).  Distinct ids give statistically independent streams,
and a given pair always reproduces the same draw sequence, so Monte Carlo
pipelines can be chunked across threads without changing a single bit of
output: each chunk owns a child stream derived from its chunk index, and
results are concatenated in index order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

_MASK64 = 0xFFFFFFFFFFFFFFFF
_GOLDEN = 0x9E3779B97F4A7C15


def _mix64(x: int) -> int:
    """SplitMix64 finalizer; a cheap bijective scramble of a 64-bit word."""
    x = (x + _GOLDEN) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (x ^ (x >> 31)) & _MASK64


@dataclass(frozen=True)
class RngStream:
    """Keyed handle into the Philox counter-based generator.

    ``generator()`` always starts from counter zero, so the sequence drawn
    through one stream does not depend on who used a sibling stream first.
    Operations that need several independent sources derive children with
    ``split``.
    """

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        key = np.array([self.seed & _MASK64, self.stream_id & _MASK64],
                       dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def split(self, *indices: int) -> "RngStream":
        """Child stream for a sub-task (chunk index, axis index, ...)."""
        sid = self.stream_id & _MASK64
        for k in indices:
            sid = _mix64(sid ^ _mix64(k & _MASK64))
        return RngStream(self.seed, sid)


class _ZeroGenerator:
    """Quacks like ``np.random.Generator`` but emits only zeros (for the
    Gaussian-type channels) so driving noise can be switched off exactly."""

    @staticmethod
    def _zeros(size):
        return 0.0 if size is None else np.zeros(size)

    def standard_normal(self, size=None):
        return self._zeros(size)

    def normal(self, loc=0.0, scale=1.0, size=None):
        return loc + scale * self._zeros(size)


@dataclass(frozen=True)
class ZeroStream:
    """Degenerate drop-in for :class:`RngStream` with all noise set to zero.

    Useful for checking the deterministic skeleton of an SDE scheme: with
    the noise removed, trajectories must follow the drift alone.  Only the
    Gaussian channels are supported.
    """

    def generator(self) -> "_ZeroGenerator":
        return _ZeroGenerator()

    def split(self, *indices: int) -> "ZeroStream":
        return self


def gaussian(stream: RngStream, size=None, mean: float = 0.0,
             std: float = 1.0):
    """Normal draws from the stream."""
    return stream.generator().normal(mean, std, size)


def chi(stream: RngStream, k, size=None):
    """chi_k draws (k degrees of freedom, any positive real k; k may be an
    array for entrywise-varying dof).

    Uses chi_k = sqrt(2 * Gamma(k/2)); the gamma sampler underneath is the
    usual rejection scheme with a squeeze, boosted for shape < 1.
    """
    k = np.asarray(k, dtype=float)
    if np.any(k <= 0):
        raise ValueError("chi needs k > 0 everywhere")
    g = stream.generator().standard_gamma(k / 2.0, size)
    return np.sqrt(2.0 * g)


def beta_variate(stream: RngStream, a: float, b: float, size=None):
    """Beta(a, b) draws."""
    if a <= 0 or b <= 0:
        raise ValueError("beta_variate needs positive shape parameters")
    return stream.generator().beta(a, b, size)


@dataclass
class BrownianPath:
    """Standard Brownian path sampled on a grid.

    ``diffusion`` is the variance rate: increments have variance
    diffusion * dt.
    """

    times: np.ndarray
    values: np.ndarray
    diffusion: float = 1.0

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if self.times.shape != np.shape(self.values):
            raise ValueError("times and values must have equal shapes")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")

    def increments(self) -> np.ndarray:
        return np.diff(self.values)


def brownian_path(stream: RngStream, t0: float, t1: float, dt: float,
                  start: float = 0.0, diffusion: float = 1.0) -> BrownianPath:
    """Sample a Brownian path on [t0, t1] with step dt (last step shortened
    so the endpoint lands exactly on t1)."""
    if t1 <= t0:
        raise ValueError("need t1 > t0")
    if dt <= 0:
        raise ValueError("need dt > 0")
    n_full = int(math.floor((t1 - t0) / dt + 1e-12))
    times = t0 + dt * np.arange(n_full + 1)
    if times[-1] < t1 - 1e-12 * max(1.0, abs(t1)):
        times = np.append(times, t1)
    steps = np.diff(times)
    xi = stream.generator().standard_normal(steps.size)
    values = np.empty(times.size)
    values[0] = start
    values[1:] = start + np.cumsum(np.sqrt(diffusion * steps) * xi)
    return BrownianPath(times=times, values=values, diffusion=diffusion)


@dataclass
class ExplosionPolicy:
    """What to do when a trajectory dives below the working chart.

    The canonical use is the Riccati diffusion, whose solutions reach -inf
    in finite time and continue from +inf.  We chart that circle as
    [-threshold, threshold]: a crossing of -threshold is recorded as one
    explosion and the state restarts at +threshold.
    """

    restart: bool = True
    threshold: float = 1.0e4
    refine_levels: int = 10  # step halvings near the threshold, dt/2**10


@dataclass
class SdeResult:
    times: np.ndarray
    values: np.ndarray
    explosion_times: list[float] = field(default_factory=list)
    flags: dict = field(default_factory=dict)

    @property
    def explosion_count(self) -> int:
        return len(self.explosion_times)


def integrate_sde(drift: Callable[[float, float], float],
                  noise: Callable[[float, float], float],
                  x0: float, t0: float, t1: float, dt: float,
                  stream: RngStream,
                  policy: ExplosionPolicy | None = None) -> SdeResult:
    """Euler--Maruyama on a scalar SDE dx = drift dt + noise dB.

    Reference (non-vectorized) integrator.  Near the explosion threshold
    the step is halved geometrically, at most ``refine_levels`` times, to
    localize the crossing; each sub-step consumes its own normal draw so
    the schedule stays reproducible for a fixed stream.
    """
    if policy is None:
        policy = ExplosionPolicy()
    gen = stream.generator()
    x = float(x0)
    if math.isinf(x):
        x = policy.threshold if x > 0 else -policy.threshold
    t = float(t0)
    times = [t]
    values = [x]
    explosion_times: list[float] = []
    min_dt = dt / (1 << policy.refine_levels)
    while t < t1 - 1e-12:
        h = min(dt, t1 - t)
        # geometric refinement: shrink until the drift move is modest
        while h > min_dt and abs(drift(t, x)) * h > 0.5 * (1.0 + abs(x)):
            h *= 0.5
        xi = gen.standard_normal()
        x = x + drift(t, x) * h + noise(t, x) * math.sqrt(h) * xi
        t += h
        if x <= -policy.threshold:
            if policy.restart:
                explosion_times.append(t)
                x = policy.threshold
            else:
                x = -policy.threshold
        elif x >= policy.threshold:
            x = policy.threshold
        times.append(t)
        values.append(x)
    return SdeResult(times=np.asarray(times), values=np.asarray(values),
                     explosion_times=explosion_times)
