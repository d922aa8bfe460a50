"""Small statistical toolkit shared by the samplers and the verification
pipelines: ECDFs, Kolmogorov-Smirnov distances, Wilson score intervals,
least-squares fits, and the CdfTable record produced by the Monte Carlo
cdf estimators.

KS thresholds used in tests are fixed constants chosen for the sample
sizes at hand, not p-values; runs are seeded, so a pass is reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtri


@dataclass
class Ecdf:
    """Right-continuous empirical distribution function."""

    x: np.ndarray

    def __post_init__(self):
        self.x = np.sort(np.asarray(self.x, dtype=float))
        if self.x.size == 0:
            raise ValueError("Ecdf needs at least one sample")

    def __call__(self, t):
        return np.searchsorted(self.x, t, side="right") / self.x.size

    def quantile(self, p: float) -> float:
        if not 0.0 < p <= 1.0:
            raise ValueError("quantile level must be in (0, 1]")
        k = int(math.ceil(p * self.x.size)) - 1
        return float(self.x[k])


def ks_distance(a, b) -> float:
    """sup |F_a - F_b| between an empirical cdf and a reference.

    ``a`` is a sample array or an :class:`Ecdf`.  ``b`` may be another
    ``Ecdf`` (two-sample distance), a :class:`CdfTable` (evaluated by
    linear interpolation, clamped to its end values outside the grid), or
    any callable cdf.
    """
    x = a.x if isinstance(a, Ecdf) else np.sort(np.asarray(a, dtype=float))
    if isinstance(b, Ecdf):
        return ks_two_sample(x, b.x)
    if isinstance(b, CdfTable):
        grid, vals = b.grid, b.values
        f = np.interp(x, grid, vals, left=float(vals[0]), right=float(vals[-1]))
    else:
        f = np.asarray(b(x), dtype=float)
    n = x.size
    hi = np.max(np.arange(1, n + 1) / n - f)
    lo = np.max(f - np.arange(0, n) / n)
    return float(max(hi, lo))


def ks_two_sample(a, b) -> float:
    """sup distance between two empirical cdfs."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    grid = np.concatenate([a, b])
    fa = np.searchsorted(a, grid, side="right") / a.size
    fb = np.searchsorted(b, grid, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


def wilson_interval(successes: int, trials: int, level: float = 0.95):
    """Wilson score interval for a binomial proportion at the given
    two-sided confidence level."""
    if trials <= 0:
        raise ValueError("wilson_interval needs trials > 0")
    if not 0 <= successes <= trials:
        raise ValueError("successes out of range")
    if not 0.0 < level < 1.0:
        raise ValueError("confidence level must be in (0, 1)")
    z = float(ndtri(0.5 * (1.0 + level)))
    p = successes / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    # at the boundary counts the score equation has an exact root at 0 / 1
    lo = 0.0 if successes == 0 else max(0.0, center - half)
    hi = 1.0 if successes == trials else min(1.0, center + half)
    return lo, hi


def linear_fit(x, y):
    """Least squares y ~ a*x + b; returns (slope, intercept, r_squared)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size != y.size or x.size < 2:
        raise ValueError("linear_fit needs two same-length vectors, n >= 2")
    if np.all(x == x[0]):
        raise ValueError("linear_fit needs at least two distinct x values")
    if np.all(y == y[0]):
        # flat data: the least-squares line is exactly horizontal
        return 0.0, float(y[0]), 1.0
    xm = x - x.mean()
    ym = y - y.mean()
    slope = float(np.dot(xm, ym)) / float(np.dot(xm, xm))
    intercept = float(y.mean() - slope * x.mean())
    resid = y - (slope * x + intercept)
    ss_res = float(np.dot(resid, resid))
    ss_tot = float(np.dot(ym, ym))
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return slope, intercept, r2


@dataclass
class CdfTable:
    """Monte Carlo (or deterministic) cdf estimate on a grid.

    ``ci_halfwidth`` entries are Wilson 95% half-widths for Monte Carlo
    tables and zeros for deterministic ones.
    """

    grid: np.ndarray
    values: np.ndarray
    ci_halfwidth: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        self.ci_halfwidth = np.asarray(self.ci_halfwidth, dtype=float)
        if not (self.grid.shape == self.values.shape == self.ci_halfwidth.shape):
            raise ValueError("grid, values, ci_halfwidth must share a shape")

    def check(self):
        """Invariants: grid sorted, values in [0,1] and non-decreasing
        beyond confidence slack."""
        if np.any(np.diff(self.grid) <= 0):
            raise ValueError("cdf grid must be strictly increasing")
        if np.any(self.values < -1e-12) or np.any(self.values > 1 + 1e-12):
            raise ValueError("cdf values must lie in [0, 1]")
        slack = self.ci_halfwidth[1:] + self.ci_halfwidth[:-1]
        if np.any(np.diff(self.values) < -(slack + 1e-12)):
            raise ValueError("cdf values decrease beyond confidence slack")
        return True


def counts_histogram(counts):
    """Tabulate integer samples as ``(values, frequencies)`` over the full
    observed range (zeros included for unobserved intermediate values)."""
    c = np.asarray(counts)
    if c.size == 0:
        raise ValueError("counts_histogram needs at least one sample")
    c = c.astype(np.int64)
    lo, hi = int(c.min()), int(c.max())
    values = np.arange(lo, hi + 1)
    freq = np.bincount(c - lo, minlength=values.size)
    return values, freq
